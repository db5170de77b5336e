#include "growconv/image_io.hpp"

#include <cmath>
#include <fstream>

#include "growconv/errors.hpp"

namespace growconv {

namespace {

void write_pnm(const std::string& path, const char* magic, int width, int height,
               const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    f << magic << '\n' << width << ' ' << height << '\n' << "255\n";
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw DataError("failed writing " + path);
}

std::uint8_t to_byte(double v) {
    const double scaled = std::lround(v * 255.0);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

}  // namespace

void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& gray) {
    if (static_cast<int>(gray.size()) != width * height)
        throw DimensionError("write_pgm: byte count does not match dimensions");
    write_pnm(path, "P5", width, height, gray);
}

void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& rgb) {
    if (static_cast<int>(rgb.size()) != width * height * 3)
        throw DimensionError("write_ppm: byte count does not match dimensions");
    write_pnm(path, "P6", width, height, rgb);
}

std::array<std::uint8_t, 3> kernel_color(int kernel_index) {
    constexpr double kGoldenAngle = 137.50776405003785;
    double h = std::fmod(kernel_index * kGoldenAngle, 360.0) / 60.0;
    const int i = static_cast<int>(h);
    const double f = h - i;
    // s = v = 1
    const double q = 1.0 - f, t = f;
    double r = 0, g = 0, b = 0;
    switch (i % 6) {
        case 0: r = 1; g = t; b = 0; break;
        case 1: r = q; g = 1; b = 0; break;
        case 2: r = 0; g = 1; b = t; break;
        case 3: r = 0; g = q; b = 1; break;
        case 4: r = t; g = 0; b = 1; break;
        default: r = 1; g = 0; b = q; break;
    }
    return {to_byte(r), to_byte(g), to_byte(b)};
}

void write_activity_pgm(const ActivationMap& map, const std::string& path) {
    std::vector<std::uint8_t> gray(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) gray[i] = to_byte(map.max_response[i]);
    write_pgm(path, map.width, map.height, gray);
}

void write_dominant_ppm(const ActivationMap& map, const std::string& path) {
    std::vector<std::uint8_t> rgb(map.size() * 3, 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (!map.active[i]) continue;
        const auto color = kernel_color(map.argmax_kernel[i]);
        rgb[3 * i] = color[0];
        rgb[3 * i + 1] = color[1];
        rgb[3 * i + 2] = color[2];
    }
    write_ppm(path, map.width, map.height, rgb);
}

void write_image_file(const Tensor3& image, const std::string& path_prefix) {
    if (image.channels == 1) {
        std::vector<std::uint8_t> gray(image.size());
        for (std::size_t i = 0; i < image.size(); ++i) gray[i] = to_byte(image.data[i]);
        write_pgm(path_prefix + ".pgm", image.width, image.height, gray);
    } else if (image.channels == 3) {
        std::vector<std::uint8_t> rgb(image.size());
        for (std::size_t i = 0; i < image.size(); ++i) rgb[i] = to_byte(image.data[i]);
        write_ppm(path_prefix + ".ppm", image.width, image.height, rgb);
    } else {
        throw DimensionError("write_image_file: expected 1 or 3 channels, got " +
                             std::to_string(image.channels));
    }
}

}  // namespace growconv
