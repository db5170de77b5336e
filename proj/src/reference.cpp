#include "growconv/reference.hpp"

#include <cmath>

namespace growconv::reference {

// Naive nested loops, one multiply at a time. Deliberately plain; this is
// the oracle the fast path is checked against.
Tensor3 conv2d_valid(const Tensor3& input, const GrowableLayer& layer) {
    const int k = layer.kernel_size;
    const int out_h = input.height - k + 1;
    const int out_w = input.width - k + 1;
    const int n_kernels = static_cast<int>(layer.kernels.size());
    Tensor3 out(out_h, out_w, n_kernels);
    for (int i = 0; i < out_h; ++i)
        for (int j = 0; j < out_w; ++j)
            for (int f = 0; f < n_kernels; ++f) {
                double z = layer.kernels[f].bias;
                for (int r = 0; r < k; ++r)
                    for (int c = 0; c < k; ++c)
                        for (int ch = 0; ch < input.channels; ++ch)
                            z += layer.kernels[f].weights[(r * k + c) * input.channels + ch] *
                                 input.at(i + r, j + c, ch);
                out.at(i, j, f) = 1.0 / (1.0 + std::exp(-z));
            }
    return out;
}

Tensor3 max_pool_2x2(const Tensor3& input) {
    Tensor3 out(input.height / 2, input.width / 2, input.channels);
    for (int i = 0; i < out.height; ++i)
        for (int j = 0; j < out.width; ++j)
            for (int c = 0; c < input.channels; ++c) {
                double m = input.at(2 * i, 2 * j, c);
                for (int di = 0; di < 2; ++di)
                    for (int dj = 0; dj < 2; ++dj)
                        m = std::max(m, input.at(2 * i + di, 2 * j + dj, c));
                out.at(i, j, c) = m;
            }
    return out;
}

std::vector<double> dense_forward(const std::vector<double>& input,
                                  const std::vector<double>& weights,
                                  const std::vector<double>& bias,
                                  int out_dim, Activation activation) {
    std::vector<double> out(out_dim);
    for (int o = 0; o < out_dim; ++o) {
        double z = bias[o];
        for (std::size_t i = 0; i < input.size(); ++i)
            z += weights[o * input.size() + i] * input[i];
        if (activation == Activation::kRelu && z < 0.0) z = 0.0;
        if (activation == Activation::kSigmoid) z = 1.0 / (1.0 + std::exp(-z));
        out[o] = z;
    }
    return out;
}

}  // namespace growconv::reference
