#include "growconv/ops.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "growconv/errors.hpp"

namespace growconv {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Patch extract_patch(const Tensor3& t, int row, int col, int side) {
    Patch p(side, t.channels);
    std::size_t idx = 0;
    for (int r = 0; r < side; ++r) {
        const double* src = &t.data[(static_cast<std::size_t>(row + r) * t.width + col) * t.channels];
        for (int c = 0; c < side * t.channels; ++c) p.values[idx++] = src[c];
    }
    return p;
}

Tensor3 conv2d_valid(const Tensor3& input, const GrowableLayer& layer) {
    if (input.channels != layer.in_channels)
        throw DimensionError("conv2d_valid: input has " + std::to_string(input.channels) +
                             " channels, layer expects " + std::to_string(layer.in_channels));
    const int k = layer.kernel_size;
    if (input.height < k || input.width < k)
        throw DimensionError("conv2d_valid: input " + std::to_string(input.height) + "x" +
                             std::to_string(input.width) + " smaller than kernel size " +
                             std::to_string(k));
    const int out_h = input.height - k + 1;
    const int out_w = input.width - k + 1;
    const int n_kernels = static_cast<int>(layer.kernels.size());
    const int ch = input.channels;
    const int row_span = k * ch;  // contiguous values per patch row

    Tensor3 out(out_h, out_w, n_kernels);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < out_h; ++i) {
        for (int j = 0; j < out_w; ++j) {
            double* dst = &out.data[(static_cast<std::size_t>(i) * out_w + j) * n_kernels];
            for (int f = 0; f < n_kernels; ++f) {
                const Kernel& kern = layer.kernels[f];
                double z = kern.bias;
                const double* w = kern.weights.data();
                for (int r = 0; r < k; ++r) {
                    const double* src =
                        &input.data[(static_cast<std::size_t>(i + r) * input.width + j) * ch];
                    for (int c = 0; c < row_span; ++c) z += w[c] * src[c];
                    w += row_span;
                }
                dst[f] = sigmoid(z);
            }
        }
    }
    return out;
}

PoolResult max_pool_2x2(const Tensor3& input) {
    if (input.height < 2 || input.width < 2)
        throw DimensionError("max_pool_2x2: input " + std::to_string(input.height) + "x" +
                             std::to_string(input.width) + " smaller than the 2x2 window");
    const int out_h = input.height / 2;
    const int out_w = input.width / 2;
    const int ch = input.channels;
    PoolResult res{Tensor3(out_h, out_w, ch),
                   std::vector<int>(static_cast<std::size_t>(out_h) * out_w * ch)};
    for (int i = 0; i < out_h; ++i) {
        for (int j = 0; j < out_w; ++j) {
            for (int c = 0; c < ch; ++c) {
                int best = ((2 * i) * input.width + 2 * j) * ch + c;
                double best_v = input.data[best];
                const int cand[3] = {((2 * i) * input.width + 2 * j + 1) * ch + c,
                                     ((2 * i + 1) * input.width + 2 * j) * ch + c,
                                     ((2 * i + 1) * input.width + 2 * j + 1) * ch + c};
                for (int idx : cand) {
                    if (input.data[idx] > best_v) {
                        best_v = input.data[idx];
                        best = idx;
                    }
                }
                const std::size_t o = (static_cast<std::size_t>(i) * out_w + j) * ch + c;
                res.output.data[o] = best_v;
                res.argmax[o] = best;
            }
        }
    }
    return res;
}

std::vector<double> dense_forward(std::span<const double> input,
                                  std::span<const double> weights,
                                  std::span<const double> bias,
                                  int out_dim, Activation activation) {
    const std::size_t in_dim = input.size();
    if (weights.size() != in_dim * static_cast<std::size_t>(out_dim) ||
        bias.size() != static_cast<std::size_t>(out_dim))
        throw DimensionError("dense_forward: weights " + std::to_string(weights.size()) +
                             ", bias " + std::to_string(bias.size()) + " do not match " +
                             std::to_string(out_dim) + "x" + std::to_string(in_dim));
    std::vector<double> out(out_dim);
    for (int o = 0; o < out_dim; ++o) {
        const double* w = weights.data() + static_cast<std::size_t>(o) * in_dim;
        double z = bias[o];
        for (std::size_t i = 0; i < in_dim; ++i) z += w[i] * input[i];
        switch (activation) {
            case Activation::kIdentity: out[o] = z; break;
            case Activation::kRelu: out[o] = z > 0.0 ? z : 0.0; break;
            case Activation::kSigmoid: out[o] = sigmoid(z); break;
        }
    }
    return out;
}

SoftmaxResult softmax_cross_entropy(std::span<const double> logits, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size())
        throw DimensionError("softmax_cross_entropy: label " + std::to_string(label) +
                             " out of range for " + std::to_string(logits.size()) + " logits");
    double mx = logits[0];
    for (double v : logits)
        if (v > mx) mx = v;
    SoftmaxResult res;
    res.probs.resize(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        res.probs[i] = std::exp(logits[i] - mx);
        sum += res.probs[i];
    }
    for (double& p : res.probs) p /= sum;
    // log-sum-exp form, exact even when p[label] underflows
    res.loss = std::log(sum) - (logits[label] - mx);
    return res;
}

void sgd_update(std::span<double> params, std::span<const double> grads,
                std::span<double> velocity, double lr, double momentum,
                const char* block_name) {
    if (params.size() != grads.size() || params.size() != velocity.size())
        throw DimensionError(std::string("sgd_update: size mismatch in block ") + block_name);
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!std::isfinite(grads[i]))
            throw NumericError(std::string("sgd_update: non-finite gradient in block ") +
                               block_name + " at index " + std::to_string(i));
        velocity[i] = momentum * velocity[i] + grads[i];
        params[i] -= lr * velocity[i];
    }
}

}  // namespace growconv
