#ifndef GROWCONV_SYNTH_HPP
#define GROWCONV_SYNTH_HPP

#include <cstdint>
#include <string>

#include "growconv/data.hpp"

namespace growconv {

// Procedural stand-in datasets for tests and demos when the real archives
// are not on disk. Deterministic in the seed.

// 28x28x1 stroke-rendered digit glyphs, ten classes, jittered affine,
// stroke width, brightness and noise.
Dataset make_synth_digits(int n, std::uint64_t seed);

// 32x32x3 textured scenes, ten classes (hue x orientation families).
Dataset make_synth_scenes10(int n, std::uint64_t seed);

// 32x32x3 textured scenes, one hundred classes; a wider pattern family
// than the ten-class set, so layers grown on scenes10 meet unseen
// patterns here.
Dataset make_synth_scenes100(int n, std::uint64_t seed);

// Writers for the standard binary containers (exact inverses of load_idx
// and load_cifar; values are rounded back to bytes).
void write_idx(const Dataset& dataset, const std::string& images_path,
               const std::string& labels_path);
void write_cifar(const Dataset& dataset, const std::string& path, CifarVariant variant);

}  // namespace growconv

#endif
