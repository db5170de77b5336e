#ifndef GROWCONV_MODEL_HPP
#define GROWCONV_MODEL_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "growconv/data.hpp"
#include "growconv/growth.hpp"
#include "growconv/ops.hpp"

namespace growconv {

enum class Topology { kModel1, kModel2 };

// conv(k=4) -> pool -> [conv(k=3) -> pool, model 1 only] -> dense(128) -> output(n).
struct ConvStage {
    GrowableLayer layer;
    bool frozen = false;
    bool generated = false;  // loaded from a grown layer file
};

struct DenseStage {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weights;  // row-major out_dim x in_dim
    std::vector<double> bias;
    bool frozen = false;
};

struct ClassifierModel {
    Topology topology = Topology::kModel2;
    int n_classes = 0;
    int in_height = 0, in_width = 0, in_channels = 0;
    Activation conv_activation = Activation::kSigmoid;
    std::vector<ConvStage> convs;  // one stage (model 2) or two (model 1)
    DenseStage hidden;             // relu
    DenseStage output;             // identity; softmax applied by the loss
    std::uint64_t rng_seed = 0;
};

struct ModelBuildSpec {
    Topology topology = Topology::kModel2;
    int n_classes = 10;
    int in_height = 28, in_width = 28, in_channels = 1;
    int conv0_kernels = 32;  // ordinary-random sizes, ignored when substituted
    int conv1_kernels = 32;
    int hidden_width = 128;
    // conv-stage index (0 or 1) -> generated layer to load verbatim
    std::map<int, GrowableLayer> substitutions;
    std::set<int> freeze;  // conv-stage indices excluded from updates
    Activation conv_activation = Activation::kSigmoid;
    std::uint64_t rng_seed = 0;
};

// Unsubstituted parameters drawn from seeded uniform(-b, b), b = 1/sqrt(fan_in);
// substituted conv layers are loaded verbatim. Dense dims follow from shape
// propagation. Throws DimensionError on an incompatible substitution.
ClassifierModel build_model(const ModelBuildSpec& spec);

// Gradient blocks mirror the parameter blocks; frozen stages get empty ones.
struct ConvGrad {
    std::vector<double> dweights;  // kernel-major, row-major within a kernel
    std::vector<double> dbias;     // one per kernel
};
struct DenseGrad {
    std::vector<double> dweights;
    std::vector<double> dbias;
};
struct Gradients {
    std::vector<ConvGrad> convs;
    DenseGrad hidden;
    DenseGrad output;
    double loss = 0.0;  // mean over the batch
    int correct = 0;
};

// Exact analytic gradients of the mean batch loss for every unfrozen
// parameter. Deterministic for a fixed batch regardless of thread count:
// the batch is cut into fixed blocks accumulated in block order.
Gradients backward_gradients(const ClassifierModel& model,
                             const std::vector<const Tensor3*>& batch,
                             const std::vector<int>& labels);

std::vector<double> forward_logits(const ClassifierModel& model, const Tensor3& image);

struct TrainConfig {
    int epochs = 5;
    int batch_size = 64;
    double lr = 0.01;
    double momentum = 0.9;
    std::uint64_t rng_seed = 0;
    int train_subset = 0;  // 0 = whole set
    int eval_subset = 0;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> train_acc;
    std::vector<double> test_loss;  // empty when no test set was given
    std::vector<double> test_acc;
};

// Minibatch SGD with momentum over seeded epoch shuffles. Frozen layers are
// untouched. Aborts with NumericError (reporting lr, epoch, batch) if the
// loss turns non-finite.
TrainHistory train_supervised(ClassifierModel& model, const Dataset& train,
                              const Dataset* test, const TrainConfig& config);

// Softmax probability rows, one per image.
std::vector<std::vector<double>> predict_scores(const ClassifierModel& model,
                                                const std::vector<Tensor3>& images);

std::pair<double, double> evaluate_loss_accuracy(const ClassifierModel& model,
                                                 const Dataset& data, int limit = 0);

}  // namespace growconv

#endif
