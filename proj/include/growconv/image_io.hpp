#ifndef GROWCONV_IMAGE_IO_HPP
#define GROWCONV_IMAGE_IO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "growconv/growth.hpp"
#include "growconv/tensor.hpp"

namespace growconv {

void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& gray);

void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& rgb);

// Fixed palette: kernel i gets hue i * golden angle (mod 360) at full
// saturation and value, so viz outputs are hash-stable.
std::array<std::uint8_t, 3> kernel_color(int kernel_index);

// Max response scaled to 0..255.
void write_activity_pgm(const ActivationMap& map, const std::string& path);

// Dominant kernel per position in the palette color; inactive positions black.
void write_dominant_ppm(const ActivationMap& map, const std::string& path);

// Source image as PGM (1 channel) or PPM (3 channels).
void write_image_file(const Tensor3& image, const std::string& path_prefix);

}  // namespace growconv

#endif
