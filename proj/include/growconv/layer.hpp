#ifndef GROWCONV_LAYER_HPP
#define GROWCONV_LAYER_HPP

#include <vector>

#include "growconv/tensor.hpp"

namespace growconv {

// sigmoid(0.5), the default activation threshold.
inline constexpr double kDefaultAlpha = 0.62245933120185459;

// One pattern detector: k x k x C weights plus a scalar bias.
struct Kernel {
    std::vector<double> weights;
    double bias = 0.0;
};

// The growing artifact: an append-only ordered list of kernels sharing one
// kernel size and input channel count. Growth never reorders or edits
// existing kernels.
struct GrowableLayer {
    int kernel_size = 0;
    int in_channels = 0;
    double alpha = kDefaultAlpha;
    std::vector<Kernel> kernels;
};

// Layer holding the single black-patch detector: weights uniformly -2,
// bias 1, so an all-zero patch responds with sigmoid(1).
GrowableLayer init_seed_layer(int kernel_size, int channels, double alpha = kDefaultAlpha);

// <weights, patch> + bias, no activation.
double kernel_preactivation(const Kernel& kernel, const Patch& patch);

// sigmoid of the pre-activation.
double kernel_response(const Kernel& kernel, const Patch& patch);

}  // namespace growconv

#endif
