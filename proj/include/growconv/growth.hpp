#ifndef GROWCONV_GROWTH_HPP
#define GROWCONV_GROWTH_HPP

#include <cstdint>
#include <vector>

#include "growconv/layer.hpp"
#include "growconv/tensor.hpp"

namespace growconv {

// Per-position layer response over the valid-convolution grid.
// active[i] holds max_response[i] > alpha, with strict inequality: a
// response exactly equal to alpha counts as inactive.
struct ActivationMap {
    int height = 0;
    int width = 0;
    std::vector<double> max_response;
    std::vector<int> argmax_kernel;
    std::vector<std::uint8_t> active;

    std::size_t size() const { return max_response.size(); }
};

struct GrowthConfig {
    double alpha = kDefaultAlpha;
    double stop_ratio = 0.1;
    // Acceptance target for the selected patch during generalization;
    // kept equal to alpha by default.
    double lambda_target = kDefaultAlpha;
    int max_kernels = 150;
    int negatives_per_kernel = 16;
    double boost_trigger = 10.0;
    int boost_max_iters = 5;
    int train_steps = 200;
    double train_lr = 0.1;
    int epochs = 8;
    // Window (in images) for the running-mean stopping test.
    int stop_batch = 32;
    // Use the printed form of the contrast boost (positive and negative
    // parts squared and summed, losing signs) instead of the
    // sign-preserving square. Kept for comparison; off by default.
    bool literal_boost = false;
    std::uint64_t rng_seed = 0;
};

struct KernelRecord {
    int epoch = 0;
    int image_id = 0;
    int row = 0;
    int col = 0;
    double preboost_max_weight = 0.0;
    int boost_iters = 0;
    bool boost_warn = false;
    double final_loss = 0.0;
    int n_negatives = 0;
};

struct GrowthLog {
    std::vector<KernelRecord> kernels;   // one record per kernel added
    std::vector<double> epoch_mean_h;    // mean inactive ratio per epoch
    std::vector<int> epoch_kernel_count; // layer size at each epoch end
    int images_seen = 0;
    int patches_skipped = 0;
    double final_batch_mean_h = 1.0;
    bool stopped_by_ratio = false;
};

// One entry per valid position; OpenMP-parallel over rows.
ActivationMap activation_map(const GrowableLayer& layer, const Tensor3& image);

// Fraction of positions no kernel accepts.
double inactive_ratio(const ActivationMap& map);

// Omega = P - mean(P).
Patch center_patch(const Patch& patch);

// C = Omega / sum(Omega o P), so that <C, P> = 1. Throws NoContrastError
// when the denominator is degenerate (constant patch).
Patch normalize_to_unit(const Patch& omega, const Patch& patch);

// One sign-preserving elementwise-square step: x -> sign(x) * x^2.
Patch boost_contrast(const Patch& omega);

// The printed variant: Omega+ o Omega+ + Omega- o Omega- (all entries
// become non-negative).
Patch boost_contrast_literal(const Patch& omega);

struct InitKernelInfo {
    double preboost_max_weight = 0.0;
    int boost_iters = 0;
    bool warn = false;  // still above the trigger after boosting
};

// Center, scale to unit response, and if max|weight| exceeds the trigger,
// boost contrast / re-center / re-scale for up to boost_max_iters rounds.
// A round that fails to lower max|weight| is discarded and ends the loop,
// so max|weight| never increases across rounds. The returned kernel has
// bias 0 and pre-activation 1 on the source patch.
Kernel init_kernel_from_patch(const Patch& patch, const GrowthConfig& config,
                              InitKernelInfo* info = nullptr);

// The <= n patches at active positions with the largest max response,
// ordered by descending response (ties broken row-major).
std::vector<Patch> collect_negatives(const GrowableLayer& layer, const Tensor3& image,
                                     const ActivationMap& map, int n);

struct GeneralizeResult {
    Kernel kernel;
    double final_loss = 0.0;
};

// Full-batch gradient descent on
//   L = (F(P_S) - lambda)^2 + mean over S- of F(s)^2
// where F is the post-sigmoid response. Only this kernel moves. Throws
// NumericError if the loss turns non-finite.
GeneralizeResult generalize_kernel(const Kernel& kernel, const Patch& p_s,
                                   const std::vector<Patch>& negatives,
                                   const GrowthConfig& config);

struct GrowResult {
    GrowableLayer layer;
    GrowthLog log;
};

// Drives layer expansion over the image stream until the running mean of
// the inactive ratio over the last stop_batch images drops below
// stop_ratio, max_kernels is reached, or epochs run out. At most one
// kernel is appended per image visit: the inactive position with the
// lowest max response seeds it (row-major tie-break), top active patches
// become its negatives. Appends are the only mutation.
GrowResult grow(const GrowableLayer& layer, const std::vector<Tensor3>& images,
                const GrowthConfig& config);

}  // namespace growconv

#endif
