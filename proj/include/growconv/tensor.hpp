#ifndef GROWCONV_TENSOR_HPP
#define GROWCONV_TENSOR_HPP

#include <cstddef>
#include <vector>

namespace growconv {

// H x W x C dense array, row-major in (row, col, channel) order.
// Images and sigmoid feature maps keep every value inside [0, 1].
struct Tensor3 {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {}

    double& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    double at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    std::size_t size() const { return data.size(); }
};

// k x k x C window of an image at one valid-convolution position.
struct Patch {
    int side = 0;
    int channels = 0;
    std::vector<double> values;

    Patch() = default;
    Patch(int k, int c, double fill = 0.0)
        : side(k), channels(c), values(static_cast<std::size_t>(k) * k * c, fill) {}

    std::size_t size() const { return values.size(); }
};

// Copies the k x k x C window whose top-left corner is (row, col).
Patch extract_patch(const Tensor3& t, int row, int col, int side);

}  // namespace growconv

#endif
