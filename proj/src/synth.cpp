#include "growconv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "growconv/errors.hpp"

namespace growconv {

namespace {

struct Pt {
    double x, y;
};

// Polyline skeletons for the ten glyph classes on a unit box (y down).
const std::vector<std::vector<std::vector<Pt>>> kGlyphs = {
    {{{0.5, 0.05}, {0.85, 0.3}, {0.85, 0.7}, {0.5, 0.95}, {0.15, 0.7}, {0.15, 0.3}, {0.5, 0.05}}},
    {{{0.3, 0.25}, {0.55, 0.05}, {0.55, 0.95}}, {{0.3, 0.95}, {0.8, 0.95}}},
    {{{0.15, 0.25}, {0.5, 0.05}, {0.85, 0.3}, {0.2, 0.95}, {0.85, 0.95}}},
    {{{0.15, 0.1}, {0.8, 0.1}, {0.45, 0.45}, {0.85, 0.7}, {0.5, 0.95}, {0.15, 0.8}}},
    {{{0.7, 0.95}, {0.7, 0.05}, {0.15, 0.65}, {0.9, 0.65}}},
    {{{0.85, 0.05}, {0.2, 0.05}, {0.15, 0.45}, {0.6, 0.4}, {0.85, 0.65}, {0.6, 0.95}, {0.15, 0.85}}},
    {{{0.7, 0.05}, {0.25, 0.5}, {0.15, 0.8}, {0.5, 0.95}, {0.8, 0.75}, {0.6, 0.5}, {0.2, 0.65}}},
    {{{0.15, 0.05}, {0.85, 0.05}, {0.4, 0.95}}, {{0.3, 0.5}, {0.7, 0.5}}},
    {{{0.5, 0.05}, {0.8, 0.25}, {0.5, 0.48}, {0.2, 0.25}, {0.5, 0.05}},
     {{0.5, 0.48}, {0.85, 0.72}, {0.5, 0.95}, {0.15, 0.72}, {0.5, 0.48}}},
    {{{0.8, 0.35}, {0.5, 0.55}, {0.2, 0.35}, {0.5, 0.05}, {0.8, 0.3}, {0.75, 0.7}, {0.45, 0.95}}},
};

// Gaussian-profile stroke stamp along a segment.
void stamp_segment(Tensor3& img, double x0, double y0, double x1, double y1,
                   double thick, double fg) {
    const int size = img.height;
    const double len = std::hypot(x1 - x0, y1 - y0);
    const int steps = std::max(2, static_cast<int>(len * 3.0));
    for (int s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) / (steps - 1);
        const double cx = x0 + (x1 - x0) * t;
        const double cy = y0 + (y1 - y0) * t;
        const int lo_i = std::max(0, static_cast<int>(cy - 2.0));
        const int hi_i = std::min(size - 1, static_cast<int>(cy + 2.0));
        const int lo_j = std::max(0, static_cast<int>(cx - 2.0));
        const int hi_j = std::min(size - 1, static_cast<int>(cx + 2.0));
        for (int i = lo_i; i <= hi_i; ++i)
            for (int j = lo_j; j <= hi_j; ++j) {
                const double d2 = (i - cy) * (i - cy) + (j - cx) * (j - cx);
                const double v = fg * std::exp(-d2 / (2.0 * thick * thick));
                double& px = img.at(i, j, 0);
                if (v > px) px = v;
            }
    }
}

Tensor3 render_glyph(int digit, Rng& rng) {
    const int size = 28;
    Tensor3 img(size, size, 1);
    const double ang = rng.uniform(-0.22, 0.22);
    const double sc = rng.uniform(0.75, 1.05);
    const double shx = rng.uniform(-0.15, 0.15);
    const double tx = rng.uniform(-2.5, 2.5);
    const double ty = rng.uniform(-2.5, 2.5);
    const double ca = std::cos(ang), sa = std::sin(ang);
    const double box = 20.0;
    const double off = (size - box) / 2.0;
    const double thick = rng.uniform(1.3, 2.2);
    const double fg = rng.uniform(0.55, 1.0);

    for (const auto& line : kGlyphs[digit]) {
        std::vector<Pt> pts;
        pts.reserve(line.size());
        for (const Pt& p : line) {
            const double x = p.x + rng.uniform(-0.04, 0.04);
            const double y = p.y + rng.uniform(-0.04, 0.04);
            const double u = (x - 0.5) * box * sc;
            const double v = (y - 0.5) * box * sc;
            const double u2 = u * ca - v * sa + shx * v;
            const double v2 = u * sa + v * ca;
            pts.push_back({u2 + box / 2 + off + tx, v2 + box / 2 + off + ty});
        }
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            stamp_segment(img, pts[i].x, pts[i].y, pts[i + 1].x, pts[i + 1].y, thick, fg);
    }
    // mild sensor noise; uniform avoids the unbounded tail
    for (double& v : img.data) {
        v += rng.uniform(-0.04, 0.04);
        v = std::clamp(v, 0.0, 1.0);
    }
    return img;
}

void hsv_to_rgb(double h, double s, double v, double rgb[3]) {
    h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0) / 60.0;
    const int i = static_cast<int>(h);
    const double f = h - i;
    const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
    switch (i % 6) {
        case 0: rgb[0] = v; rgb[1] = t; rgb[2] = p; break;
        case 1: rgb[0] = q; rgb[1] = v; rgb[2] = p; break;
        case 2: rgb[0] = p; rgb[1] = v; rgb[2] = t; break;
        case 3: rgb[0] = p; rgb[1] = q; rgb[2] = v; break;
        case 4: rgb[0] = t; rgb[1] = p; rgb[2] = v; break;
        default: rgb[0] = v; rgb[1] = p; rgb[2] = q; break;
    }
}

// Textured 32x32x3 scene: tinted background, oriented stripe or dot field,
// one filled disc. The (hue, orientation, texture) triple is the class.
Tensor3 render_scene(double hue, double stripe_angle, bool dots, Rng& rng) {
    const int size = 32;
    Tensor3 img(size, size, 3);
    double base[3];
    hsv_to_rgb(hue, rng.uniform(0.55, 0.85), rng.uniform(0.35, 0.6), base);
    double stripe_col[3];
    hsv_to_rgb(hue + 40.0, rng.uniform(0.6, 0.9), rng.uniform(0.75, 1.0), stripe_col);

    const double freq = rng.uniform(0.9, 1.3);
    const double phase = rng.uniform(0.0, 6.28318);
    const double ca = std::cos(stripe_angle), sa = std::sin(stripe_angle);
    const double dcx = rng.uniform(6.0, 26.0), dcy = rng.uniform(6.0, 26.0);
    const double dr = rng.uniform(3.0, 6.0);
    double disc[3];
    hsv_to_rgb(hue + 180.0, 0.7, rng.uniform(0.6, 0.95), disc);

    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const double u = ca * j + sa * i;
            double m;
            if (dots) {
                const double gx = std::sin(freq * j + phase), gy = std::sin(freq * i + phase);
                m = std::max(0.0, gx * gy);
            } else {
                m = 0.5 + 0.5 * std::sin(freq * u + phase);
            }
            m = m * m;  // sharpen
            for (int c = 0; c < 3; ++c) {
                double v = base[c] * (1.0 - m) + stripe_col[c] * m;
                if ((i - dcy) * (i - dcy) + (j - dcx) * (j - dcx) < dr * dr) v = disc[c];
                v += rng.uniform(-0.03, 0.03);
                img.at(i, j, c) = std::clamp(v, 0.0, 1.0);
            }
        }
    return img;
}

}  // namespace

Dataset make_synth_digits(int n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.name = "synth-digits";
    ds.n_classes = 10;
    ds.images.reserve(n);
    ds.labels.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int label = rng.below(10);
        ds.images.push_back(render_glyph(label, rng));
        ds.labels.push_back(label);
    }
    return ds;
}

Dataset make_synth_scenes10(int n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.name = "synth-scenes10";
    ds.n_classes = 10;
    for (int i = 0; i < n; ++i) {
        const int label = rng.below(10);
        // ten hues on even 36-degree steps, five stripe orientations
        const double hue = label * 36.0;
        const double angle = (label % 5) * 0.628318;
        ds.images.push_back(render_scene(hue, angle, false, rng));
        ds.labels.push_back(label);
    }
    return ds;
}

Dataset make_synth_scenes100(int n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.name = "synth-scenes100";
    ds.n_classes = 100;
    for (int i = 0; i < n; ++i) {
        const int label = rng.below(100);
        // finer hue wheel and orientations than scenes10, and half the
        // classes carry a dot field the ten-class set never shows
        const double hue = label * 3.6 + 7.0;
        const double angle = (label % 10) * 0.314159 + 0.1;
        const bool dots = (label / 10) % 2 == 1;
        ds.images.push_back(render_scene(hue, angle, dots, rng));
        ds.labels.push_back(label);
    }
    return ds;
}

namespace {

void put_be32(std::ofstream& f, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

unsigned char to_byte(double v) {
    const double scaled = v * 255.0;
    const double clamped = std::clamp(scaled, 0.0, 255.0);
    return static_cast<unsigned char>(std::lround(clamped));
}

}  // namespace

void write_idx(const Dataset& dataset, const std::string& images_path,
               const std::string& labels_path) {
    if (dataset.images.empty()) throw DataError("write_idx: empty dataset");
    const Tensor3& first = dataset.images.front();
    if (first.channels != 1) throw DataError("write_idx: IDX holds single-channel images");

    std::ofstream fi(images_path, std::ios::binary);
    if (!fi) throw DataError("cannot write " + images_path);
    put_be32(fi, 2051);
    put_be32(fi, static_cast<std::uint32_t>(dataset.size()));
    put_be32(fi, static_cast<std::uint32_t>(first.height));
    put_be32(fi, static_cast<std::uint32_t>(first.width));
    for (const Tensor3& img : dataset.images)
        for (double v : img.data) fi.put(static_cast<char>(to_byte(v)));

    std::ofstream fl(labels_path, std::ios::binary);
    if (!fl) throw DataError("cannot write " + labels_path);
    put_be32(fl, 2049);
    put_be32(fl, static_cast<std::uint32_t>(dataset.size()));
    for (int label : dataset.labels) fl.put(static_cast<char>(label));
}

void write_cifar(const Dataset& dataset, const std::string& path, CifarVariant variant) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    for (int i = 0; i < dataset.size(); ++i) {
        const Tensor3& img = dataset.images[i];
        if (img.height != 32 || img.width != 32 || img.channels != 3)
            throw DataError("write_cifar: images must be 32x32x3");
        if (variant == CifarVariant::kCifar100Fine)
            f.put(static_cast<char>(dataset.labels[i] / 5));  // coarse stand-in
        f.put(static_cast<char>(dataset.labels[i]));
        for (int c = 0; c < 3; ++c)
            for (int r = 0; r < 32; ++r)
                for (int col = 0; col < 32; ++col)
                    f.put(static_cast<char>(to_byte(img.at(r, col, c))));
    }
}

}  // namespace growconv
