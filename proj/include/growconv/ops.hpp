#ifndef GROWCONV_OPS_HPP
#define GROWCONV_OPS_HPP

#include <span>
#include <vector>

#include "growconv/layer.hpp"
#include "growconv/tensor.hpp"

namespace growconv {

double sigmoid(double x);

enum class Activation { kIdentity, kRelu, kSigmoid };

// Valid convolution, stride 1, no padding: output is
// (H-k+1) x (W-k+1) x |kernels|, each value sigmoid(<W, patch> + bias).
// OpenMP-parallel over output rows; see reference::conv2d_valid for the
// serial naive version used as the test oracle and benchmark baseline.
Tensor3 conv2d_valid(const Tensor3& input, const GrowableLayer& layer);

struct PoolResult {
    Tensor3 output;
    // Flat input index of the max for every output element, for the
    // backward pass (each output gradient routes to exactly one input).
    std::vector<int> argmax;
};

// Non-overlapping 2x2 per-channel max; an odd trailing row/col is dropped.
PoolResult max_pool_2x2(const Tensor3& input);

// activation(W x + b) with W row-major (out_dim x in_dim).
std::vector<double> dense_forward(std::span<const double> input,
                                  std::span<const double> weights,
                                  std::span<const double> bias,
                                  int out_dim, Activation activation);

struct SoftmaxResult {
    double loss = 0.0;
    std::vector<double> probs;
};

// Max-subtracted softmax; loss = -log p[label].
SoftmaxResult softmax_cross_entropy(std::span<const double> logits, int label);

// v <- momentum v + g; p <- p - lr v. Throws NumericError (naming the
// block) on a non-finite gradient.
void sgd_update(std::span<double> params, std::span<const double> grads,
                std::span<double> velocity, double lr, double momentum,
                const char* block_name);

}  // namespace growconv

#endif
