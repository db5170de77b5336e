#include "growconv/layer.hpp"

#include <string>

#include "growconv/errors.hpp"
#include "growconv/ops.hpp"

namespace growconv {

GrowableLayer init_seed_layer(int kernel_size, int channels, double alpha) {
    GrowableLayer layer;
    layer.kernel_size = kernel_size;
    layer.in_channels = channels;
    layer.alpha = alpha;
    Kernel seed;
    seed.weights.assign(static_cast<std::size_t>(kernel_size) * kernel_size * channels, -2.0);
    seed.bias = 1.0;
    layer.kernels.push_back(std::move(seed));
    return layer;
}

double kernel_preactivation(const Kernel& kernel, const Patch& patch) {
    if (kernel.weights.size() != patch.values.size())
        throw DimensionError("kernel_response: kernel has " +
                             std::to_string(kernel.weights.size()) + " weights, patch has " +
                             std::to_string(patch.values.size()) + " values");
    double z = kernel.bias;
    for (std::size_t i = 0; i < patch.values.size(); ++i)
        z += kernel.weights[i] * patch.values[i];
    return z;
}

double kernel_response(const Kernel& kernel, const Patch& patch) {
    return sigmoid(kernel_preactivation(kernel, patch));
}

}  // namespace growconv
