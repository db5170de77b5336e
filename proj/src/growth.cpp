#include "growconv/growth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "growconv/errors.hpp"
#include "growconv/ops.hpp"

namespace growconv {

ActivationMap activation_map(const GrowableLayer& layer, const Tensor3& image) {
    if (layer.kernels.empty())
        throw DimensionError("activation_map: layer has no kernels");
    if (image.channels != layer.in_channels)
        throw DimensionError("activation_map: image has " + std::to_string(image.channels) +
                             " channels, layer expects " + std::to_string(layer.in_channels));
    const int k = layer.kernel_size;
    if (image.height < k || image.width < k)
        throw DimensionError("activation_map: image " + std::to_string(image.height) + "x" +
                             std::to_string(image.width) + " smaller than kernel size " +
                             std::to_string(k));

    ActivationMap map;
    map.height = image.height - k + 1;
    map.width = image.width - k + 1;
    const std::size_t n = static_cast<std::size_t>(map.height) * map.width;
    map.max_response.resize(n);
    map.argmax_kernel.resize(n);
    map.active.resize(n);

    const int ch = image.channels;
    const int row_span = k * ch;
    const int n_kernels = static_cast<int>(layer.kernels.size());

#pragma omp parallel for schedule(static)
    for (int i = 0; i < map.height; ++i) {
        for (int j = 0; j < map.width; ++j) {
            double best = -1.0;
            int best_f = 0;
            for (int f = 0; f < n_kernels; ++f) {
                const Kernel& kern = layer.kernels[f];
                double z = kern.bias;
                const double* w = kern.weights.data();
                for (int r = 0; r < k; ++r) {
                    const double* src =
                        &image.data[(static_cast<std::size_t>(i + r) * image.width + j) * ch];
                    for (int c = 0; c < row_span; ++c) z += w[c] * src[c];
                    w += row_span;
                }
                const double resp = sigmoid(z);
                if (resp > best) {  // first max wins ties
                    best = resp;
                    best_f = f;
                }
            }
            const std::size_t idx = static_cast<std::size_t>(i) * map.width + j;
            map.max_response[idx] = best;
            map.argmax_kernel[idx] = best_f;
            map.active[idx] = best > layer.alpha ? 1 : 0;  // strict
        }
    }
    return map;
}

double inactive_ratio(const ActivationMap& map) {
    const std::size_t n = map.size();
    std::size_t active = 0;
    for (std::uint8_t a : map.active) active += a;
    return static_cast<double>(n - active) / static_cast<double>(n);
}

Patch center_patch(const Patch& patch) {
    Patch omega = patch;
    const double mean =
        std::accumulate(omega.values.begin(), omega.values.end(), 0.0) /
        static_cast<double>(omega.values.size());
    for (double& v : omega.values) v -= mean;
    return omega;
}

Patch normalize_to_unit(const Patch& omega, const Patch& patch) {
    if (omega.values.size() != patch.values.size())
        throw DimensionError("normalize_to_unit: omega and patch sizes differ");
    double denom = 0.0;
    for (std::size_t i = 0; i < omega.values.size(); ++i)
        denom += omega.values[i] * patch.values[i];
    if (std::abs(denom) <= 1e-12) throw NoContrastError();
    Patch c = omega;
    for (double& v : c.values) v /= denom;
    return c;
}

Patch boost_contrast(const Patch& omega) {
    Patch out = omega;
    for (double& v : out.values) v = v >= 0.0 ? v * v : -(v * v);
    return out;
}

Patch boost_contrast_literal(const Patch& omega) {
    Patch out = omega;
    for (double& v : out.values) v = v * v;
    return out;
}

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

Kernel init_kernel_from_patch(const Patch& patch, const GrowthConfig& config,
                              InitKernelInfo* info) {
    Patch omega = center_patch(patch);
    Patch c = normalize_to_unit(omega, patch);

    InitKernelInfo local;
    local.preboost_max_weight = max_abs(c.values);

    double best = local.preboost_max_weight;
    for (int it = 0; it < config.boost_max_iters && best > config.boost_trigger; ++it) {
        Patch boosted = config.literal_boost ? boost_contrast_literal(omega)
                                             : boost_contrast(omega);
        boosted = center_patch(boosted);
        Patch candidate;
        try {
            candidate = normalize_to_unit(boosted, patch);
        } catch (const NoContrastError&) {
            break;  // boosting squashed the patch flat; keep what we have
        }
        const double cand_max = max_abs(candidate.values);
        if (cand_max >= best) break;  // no longer improving
        omega = std::move(boosted);
        c = std::move(candidate);
        best = cand_max;
        local.boost_iters = it + 1;
    }
    local.warn = best > config.boost_trigger;
    if (info) *info = local;

    Kernel kernel;
    kernel.weights = std::move(c.values);
    kernel.bias = 0.0;
    return kernel;
}

std::vector<Patch> collect_negatives(const GrowableLayer& layer, const Tensor3& image,
                                     const ActivationMap& map, int n) {
    // (response, row-major index) of active positions, best first
    std::vector<std::pair<double, int>> order;
    for (std::size_t i = 0; i < map.size(); ++i)
        if (map.active[i]) order.emplace_back(map.max_response[i], static_cast<int>(i));
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (static_cast<int>(order.size()) > n) order.resize(n);

    std::vector<Patch> negatives;
    negatives.reserve(order.size());
    for (const auto& [resp, idx] : order)
        negatives.push_back(
            extract_patch(image, idx / map.width, idx % map.width, layer.kernel_size));
    return negatives;
}

GeneralizeResult generalize_kernel(const Kernel& kernel, const Patch& p_s,
                                   const std::vector<Patch>& negatives,
                                   const GrowthConfig& config) {
    GeneralizeResult res;
    res.kernel = kernel;
    std::vector<double>& w = res.kernel.weights;
    double& b = res.kernel.bias;
    const std::size_t dim = w.size();
    const double lambda = config.lambda_target;
    const double inv_n = negatives.empty() ? 0.0 : 1.0 / static_cast<double>(negatives.size());

    auto loss_of = [&]() {
        const double fp = kernel_response(res.kernel, p_s);
        double l = (fp - lambda) * (fp - lambda);
        double neg = 0.0;
        for (const Patch& s : negatives) {
            const double fs = kernel_response(res.kernel, s);
            neg += fs * fs;
        }
        return l + neg * inv_n;
    };

    std::vector<double> grad(dim);
    for (int step = 0; step < config.train_steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;

        const double fp = kernel_response(res.kernel, p_s);
        const double gp = 2.0 * (fp - lambda) * fp * (1.0 - fp);
        for (std::size_t i = 0; i < dim; ++i) grad[i] += gp * p_s.values[i];
        grad_b += gp;

        for (const Patch& s : negatives) {
            const double fs = kernel_response(res.kernel, s);
            const double gs = 2.0 * fs * fs * (1.0 - fs) * inv_n;
            for (std::size_t i = 0; i < dim; ++i) grad[i] += gs * s.values[i];
            grad_b += gs;
        }

        for (std::size_t i = 0; i < dim; ++i) w[i] -= config.train_lr * grad[i];
        b -= config.train_lr * grad_b;
    }

    res.final_loss = loss_of();
    if (!std::isfinite(res.final_loss))
        throw NumericError("generalize_kernel: loss is not finite");
    return res;
}

GrowResult grow(const GrowableLayer& layer, const std::vector<Tensor3>& images,
                const GrowthConfig& config) {
    GrowResult res;
    res.layer = layer;
    GrowthLog& log = res.log;

    std::deque<double> window;
    double window_sum = 0.0;
    bool done = false;

    for (int epoch = 0; epoch < config.epochs && !done; ++epoch) {
        double epoch_h_sum = 0.0;
        int epoch_images = 0;

        for (std::size_t img_idx = 0; img_idx < images.size(); ++img_idx) {
            const Tensor3& image = images[img_idx];
            ActivationMap map = activation_map(res.layer, image);
            const double h = inactive_ratio(map);
            ++log.images_seen;
            epoch_h_sum += h;
            ++epoch_images;

            window.push_back(h);
            window_sum += h;
            if (static_cast<int>(window.size()) > config.stop_batch) {
                window_sum -= window.front();
                window.pop_front();
            }
            log.final_batch_mean_h = window_sum / static_cast<double>(window.size());
            if (static_cast<int>(window.size()) == config.stop_batch &&
                log.final_batch_mean_h < config.stop_ratio) {
                log.stopped_by_ratio = true;
                done = true;
                break;
            }

            if (static_cast<int>(res.layer.kernels.size()) >= config.max_kernels) {
                done = true;
                break;
            }
            if (h < config.stop_ratio) continue;  // this image is mostly recognized

            // Inactive positions, strongest rejection first (row-major ties).
            std::vector<std::pair<double, int>> candidates;
            for (std::size_t i = 0; i < map.size(); ++i)
                if (!map.active[i])
                    candidates.emplace_back(map.max_response[i], static_cast<int>(i));
            std::sort(candidates.begin(), candidates.end());

            for (const auto& [resp, idx] : candidates) {
                const int row = idx / map.width;
                const int col = idx % map.width;
                Patch p_s = extract_patch(image, row, col, res.layer.kernel_size);
                try {
                    InitKernelInfo info;
                    Kernel fresh = init_kernel_from_patch(p_s, config, &info);
                    std::vector<Patch> negatives = collect_negatives(
                        res.layer, image, map, config.negatives_per_kernel);
                    GeneralizeResult trained =
                        generalize_kernel(fresh, p_s, negatives, config);

                    res.layer.kernels.push_back(std::move(trained.kernel));
                    KernelRecord rec;
                    rec.epoch = epoch;
                    rec.image_id = static_cast<int>(img_idx);
                    rec.row = row;
                    rec.col = col;
                    rec.preboost_max_weight = info.preboost_max_weight;
                    rec.boost_iters = info.boost_iters;
                    rec.boost_warn = info.warn;
                    rec.final_loss = trained.final_loss;
                    rec.n_negatives = static_cast<int>(negatives.size());
                    log.kernels.push_back(rec);
                    break;  // one kernel per image visit
                } catch (const NoContrastError&) {
                    ++log.patches_skipped;
                } catch (const NumericError&) {
                    ++log.patches_skipped;
                }
            }
        }

        if (epoch_images > 0) {
            log.epoch_mean_h.push_back(epoch_h_sum / epoch_images);
            log.epoch_kernel_count.push_back(static_cast<int>(res.layer.kernels.size()));
        }
    }
    return res;
}

}  // namespace growconv
