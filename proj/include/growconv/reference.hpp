#ifndef GROWCONV_REFERENCE_HPP
#define GROWCONV_REFERENCE_HPP

#include "growconv/layer.hpp"
#include "growconv/ops.hpp"
#include "growconv/tensor.hpp"

// Serial naive implementations, written independently of the parallel
// kernels in ops.cpp. Tests compare the two paths; bench_kernels times them.
namespace growconv::reference {

Tensor3 conv2d_valid(const Tensor3& input, const GrowableLayer& layer);

Tensor3 max_pool_2x2(const Tensor3& input);

std::vector<double> dense_forward(const std::vector<double>& input,
                                  const std::vector<double>& weights,
                                  const std::vector<double>& bias,
                                  int out_dim, Activation activation);

}  // namespace growconv::reference

#endif
