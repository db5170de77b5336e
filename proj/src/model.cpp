#include "growconv/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "growconv/errors.hpp"
#include "growconv/rng.hpp"

namespace growconv {

namespace {

GrowableLayer random_conv_layer(int kernel_size, int in_channels, int out_kernels,
                                double alpha, Rng& rng) {
    GrowableLayer layer;
    layer.kernel_size = kernel_size;
    layer.in_channels = in_channels;
    layer.alpha = alpha;
    const int fan_in = kernel_size * kernel_size * in_channels;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    layer.kernels.resize(out_kernels);
    for (Kernel& k : layer.kernels) {
        k.weights.resize(fan_in);
        for (double& w : k.weights) w = rng.uniform(-bound, bound);
        k.bias = rng.uniform(-bound, bound);
    }
    return layer;
}

DenseStage random_dense(int in_dim, int out_dim, Rng& rng) {
    DenseStage d;
    d.in_dim = in_dim;
    d.out_dim = out_dim;
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    d.weights.resize(static_cast<std::size_t>(out_dim) * in_dim);
    for (double& w : d.weights) w = rng.uniform(-bound, bound);
    d.bias.assign(out_dim, 0.0);
    for (double& b : d.bias) b = rng.uniform(-bound, bound);
    return d;
}

}  // namespace

ClassifierModel build_model(const ModelBuildSpec& spec) {
    ClassifierModel m;
    m.topology = spec.topology;
    m.n_classes = spec.n_classes;
    m.in_height = spec.in_height;
    m.in_width = spec.in_width;
    m.in_channels = spec.in_channels;
    m.conv_activation = spec.conv_activation;
    m.rng_seed = spec.rng_seed;

    Rng rng(spec.rng_seed);
    const int n_convs = spec.topology == Topology::kModel1 ? 2 : 1;
    const int kernel_sizes[2] = {4, 3};

    int h = spec.in_height, w = spec.in_width, ch = spec.in_channels;
    for (int s = 0; s < n_convs; ++s) {
        const int ksize = kernel_sizes[s];
        ConvStage stage;
        auto sub = spec.substitutions.find(s);
        if (sub != spec.substitutions.end()) {
            const GrowableLayer& src = sub->second;
            if (src.kernel_size != ksize || src.in_channels != ch)
                throw DimensionError(
                    "build_model: substitution for conv " + std::to_string(s) + " is " +
                    std::to_string(src.kernel_size) + "x" + std::to_string(src.kernel_size) +
                    "x" + std::to_string(src.in_channels) + ", expected " +
                    std::to_string(ksize) + "x" + std::to_string(ksize) + "x" +
                    std::to_string(ch));
            stage.layer = src;
            stage.generated = true;
        } else {
            const int out = s == 0 ? spec.conv0_kernels : spec.conv1_kernels;
            stage.layer = random_conv_layer(ksize, ch, out, kDefaultAlpha, rng);
        }
        stage.frozen = spec.freeze.count(s) > 0;
        ch = static_cast<int>(stage.layer.kernels.size());
        h = (h - ksize + 1) / 2;  // conv then 2x2 pool
        w = (w - ksize + 1) / 2;
        if (h <= 0 || w <= 0)
            throw DimensionError("build_model: input too small for the topology");
        m.convs.push_back(std::move(stage));
    }

    const int flat = h * w * ch;
    m.hidden = random_dense(flat, spec.hidden_width, rng);
    m.output = random_dense(spec.hidden_width, spec.n_classes, rng);
    return m;
}

namespace {

double activate(double z, Activation act) {
    switch (act) {
        case Activation::kIdentity: return z;
        case Activation::kRelu: return z > 0.0 ? z : 0.0;
        case Activation::kSigmoid: return sigmoid(z);
    }
    return z;
}

// d(activation)/dz expressed through the activated value y (and z for relu).
double activate_grad(double y, Activation act) {
    switch (act) {
        case Activation::kIdentity: return 1.0;
        case Activation::kRelu: return y > 0.0 ? 1.0 : 0.0;
        case Activation::kSigmoid: return y * (1.0 - y);
    }
    return 1.0;
}

struct SampleTrace {
    std::vector<Tensor3> conv_out;    // activated conv outputs
    std::vector<PoolResult> pooled;
    std::vector<double> hidden_pre;
    std::vector<double> hidden_out;
    std::vector<double> logits;
};

Tensor3 conv_forward(const Tensor3& input, const GrowableLayer& layer, Activation act) {
    if (act == Activation::kSigmoid) return conv2d_valid(input, layer);
    const int k = layer.kernel_size;
    const int out_h = input.height - k + 1, out_w = input.width - k + 1;
    const int n_k = static_cast<int>(layer.kernels.size());
    const int ch = input.channels;
    const int row_span = k * ch;
    Tensor3 out(out_h, out_w, n_k);
    for (int i = 0; i < out_h; ++i)
        for (int j = 0; j < out_w; ++j) {
            double* dst = &out.data[(static_cast<std::size_t>(i) * out_w + j) * n_k];
            for (int f = 0; f < n_k; ++f) {
                const Kernel& kern = layer.kernels[f];
                double z = kern.bias;
                const double* w = kern.weights.data();
                for (int r = 0; r < k; ++r) {
                    const double* src =
                        &input.data[(static_cast<std::size_t>(i + r) * input.width + j) * ch];
                    for (int c = 0; c < row_span; ++c) z += w[c] * src[c];
                    w += row_span;
                }
                dst[f] = activate(z, act);
            }
        }
    return out;
}

void forward_sample(const ClassifierModel& model, const Tensor3& image, SampleTrace& tr) {
    tr.conv_out.clear();
    tr.pooled.clear();
    const Tensor3* x = &image;
    for (const ConvStage& stage : model.convs) {
        tr.conv_out.push_back(conv_forward(*x, stage.layer, model.conv_activation));
        tr.pooled.push_back(max_pool_2x2(tr.conv_out.back()));
        x = &tr.pooled.back().output;
    }
    const std::vector<double>& flat = x->data;  // (row, col, channel) row-major
    tr.hidden_pre.assign(model.hidden.out_dim, 0.0);
    for (int o = 0; o < model.hidden.out_dim; ++o) {
        const double* wrow = model.hidden.weights.data() +
                             static_cast<std::size_t>(o) * model.hidden.in_dim;
        double z = model.hidden.bias[o];
        for (int i = 0; i < model.hidden.in_dim; ++i) z += wrow[i] * flat[i];
        tr.hidden_pre[o] = z;
    }
    tr.hidden_out.resize(model.hidden.out_dim);
    for (int o = 0; o < model.hidden.out_dim; ++o)
        tr.hidden_out[o] = tr.hidden_pre[o] > 0.0 ? tr.hidden_pre[o] : 0.0;
    tr.logits = dense_forward(tr.hidden_out, model.output.weights, model.output.bias,
                              model.output.out_dim, Activation::kIdentity);
}

struct BlockAccum {
    std::vector<ConvGrad> convs;
    DenseGrad hidden, output;
    double loss = 0.0;
    int correct = 0;

    explicit BlockAccum(const ClassifierModel& model) {
        convs.resize(model.convs.size());
        for (std::size_t s = 0; s < model.convs.size(); ++s) {
            if (model.convs[s].frozen) continue;  // frozen: no gradient entries
            const GrowableLayer& l = model.convs[s].layer;
            convs[s].dweights.assign(l.kernels.size() * l.kernels[0].weights.size(), 0.0);
            convs[s].dbias.assign(l.kernels.size(), 0.0);
        }
        if (!model.hidden.frozen) {
            hidden.dweights.assign(model.hidden.weights.size(), 0.0);
            hidden.dbias.assign(model.hidden.bias.size(), 0.0);
        }
        if (!model.output.frozen) {
            output.dweights.assign(model.output.weights.size(), 0.0);
            output.dbias.assign(model.output.bias.size(), 0.0);
        }
    }
};

void backward_sample(const ClassifierModel& model, const Tensor3& image, int label,
                     SampleTrace& tr, BlockAccum& acc) {
    forward_sample(model, image, tr);
    SoftmaxResult sm = softmax_cross_entropy(tr.logits, label);
    acc.loss += sm.loss;
    int pred = 0;
    for (std::size_t i = 1; i < tr.logits.size(); ++i)
        if (tr.logits[i] > tr.logits[pred]) pred = static_cast<int>(i);
    if (pred == label) ++acc.correct;

    std::vector<double> dlogits = sm.probs;
    dlogits[label] -= 1.0;

    // output dense
    if (!model.output.frozen)
        for (int o = 0; o < model.output.out_dim; ++o) {
            double* dw = acc.output.dweights.data() +
                         static_cast<std::size_t>(o) * model.output.in_dim;
            for (int i = 0; i < model.output.in_dim; ++i)
                dw[i] += dlogits[o] * tr.hidden_out[i];
            acc.output.dbias[o] += dlogits[o];
        }
    std::vector<double> dhidden(model.output.in_dim, 0.0);
    for (int o = 0; o < model.output.out_dim; ++o) {
        const double* wrow = model.output.weights.data() +
                             static_cast<std::size_t>(o) * model.output.in_dim;
        for (int i = 0; i < model.output.in_dim; ++i) dhidden[i] += wrow[i] * dlogits[o];
    }
    for (int i = 0; i < model.hidden.out_dim; ++i)
        if (tr.hidden_pre[i] <= 0.0) dhidden[i] = 0.0;

    // hidden dense
    const std::vector<double>& flat = tr.pooled.back().output.data;
    if (!model.hidden.frozen)
        for (int o = 0; o < model.hidden.out_dim; ++o) {
            double* dw = acc.hidden.dweights.data() +
                         static_cast<std::size_t>(o) * model.hidden.in_dim;
            for (int i = 0; i < model.hidden.in_dim; ++i) dw[i] += dhidden[o] * flat[i];
            acc.hidden.dbias[o] += dhidden[o];
        }

    // does any conv stage below still need a gradient?
    const int n_convs = static_cast<int>(model.convs.size());
    int deepest_unfrozen = -1;
    for (int s = 0; s < n_convs; ++s)
        if (!model.convs[s].frozen) deepest_unfrozen = s;
    if (deepest_unfrozen < 0) return;

    std::vector<double> dflat(model.hidden.in_dim, 0.0);
    for (int o = 0; o < model.hidden.out_dim; ++o) {
        if (dhidden[o] == 0.0) continue;
        const double* wrow = model.hidden.weights.data() +
                             static_cast<std::size_t>(o) * model.hidden.in_dim;
        for (int i = 0; i < model.hidden.in_dim; ++i) dflat[i] += wrow[i] * dhidden[o];
    }

    // walk conv stages top-down; dflat holds d(pooled output) of stage s
    std::vector<double> dpooled = std::move(dflat);
    for (int s = n_convs - 1; s >= 0; --s) {
        const ConvStage& stage = model.convs[s];
        const Tensor3& y = tr.conv_out[s];
        const PoolResult& pool = tr.pooled[s];

        // route pooled gradients to the recorded argmax positions
        std::vector<double> dz(y.size(), 0.0);
        for (std::size_t o = 0; o < pool.argmax.size(); ++o) {
            if (dpooled[o] == 0.0) continue;
            const int src = pool.argmax[o];
            dz[src] += dpooled[o] * activate_grad(y.data[src], model.conv_activation);
        }

        const Tensor3& input = s == 0 ? image : tr.pooled[s - 1].output;
        const GrowableLayer& layer = stage.layer;
        const int k = layer.kernel_size;
        const int n_k = static_cast<int>(layer.kernels.size());
        const int ch = input.channels;
        const int wsize = k * k * ch;

        if (!stage.frozen) {
            ConvGrad& cg = acc.convs[s];
            for (int i = 0; i < y.height; ++i)
                for (int j = 0; j < y.width; ++j) {
                    const double* dzp =
                        &dz[(static_cast<std::size_t>(i) * y.width + j) * n_k];
                    for (int f = 0; f < n_k; ++f) {
                        const double g = dzp[f];
                        if (g == 0.0) continue;
                        double* dw = cg.dweights.data() + static_cast<std::size_t>(f) * wsize;
                        for (int r = 0; r < k; ++r) {
                            const double* src = &input.data[(static_cast<std::size_t>(i + r) *
                                                                 input.width + j) * ch];
                            double* dwr = dw + r * k * ch;
                            for (int c = 0; c < k * ch; ++c) dwr[c] += g * src[c];
                        }
                        cg.dbias[f] += g;
                    }
                }
        }

        if (s == 0) break;
        bool lower_needs_gradient = false;
        for (int t = 0; t < s; ++t)
            if (!model.convs[t].frozen) lower_needs_gradient = true;
        if (!lower_needs_gradient) break;

        // propagate into the previous stage's pooled output
        std::vector<double> dinput(input.size(), 0.0);
        for (int i = 0; i < y.height; ++i)
            for (int j = 0; j < y.width; ++j) {
                const double* dzp = &dz[(static_cast<std::size_t>(i) * y.width + j) * n_k];
                for (int f = 0; f < n_k; ++f) {
                    const double g = dzp[f];
                    if (g == 0.0) continue;
                    const double* w = layer.kernels[f].weights.data();
                    for (int r = 0; r < k; ++r) {
                        double* dst = &dinput[(static_cast<std::size_t>(i + r) *
                                                   input.width + j) * ch];
                        const double* wr = w + r * k * ch;
                        for (int c = 0; c < k * ch; ++c) dst[c] += g * wr[c];
                    }
                }
            }
        dpooled = std::move(dinput);
    }
}

}  // namespace

std::vector<double> forward_logits(const ClassifierModel& model, const Tensor3& image) {
    SampleTrace tr;
    forward_sample(model, image, tr);
    return tr.logits;
}

Gradients backward_gradients(const ClassifierModel& model,
                             const std::vector<const Tensor3*>& batch,
                             const std::vector<int>& labels) {
    if (batch.size() != labels.size())
        throw DimensionError("backward_gradients: batch and label sizes differ");
    const int n = static_cast<int>(batch.size());
    // Fixed-size blocks accumulated in block order, so the sum does not
    // depend on the number of threads.
    const int block = 8;
    const int n_blocks = (n + block - 1) / block;
    std::vector<BlockAccum> accums(n_blocks, BlockAccum(model));

#pragma omp parallel for schedule(static)
    for (int b = 0; b < n_blocks; ++b) {
        SampleTrace tr;
        const int lo = b * block, hi = std::min(n, lo + block);
        for (int i = lo; i < hi; ++i)
            backward_sample(model, *batch[i], labels[i], tr, accums[b]);
    }

    Gradients g;
    g.convs.resize(model.convs.size());
    for (std::size_t s = 0; s < model.convs.size(); ++s) {
        g.convs[s].dweights.assign(accums[0].convs[s].dweights.size(), 0.0);
        g.convs[s].dbias.assign(accums[0].convs[s].dbias.size(), 0.0);
    }
    g.hidden.dweights.assign(accums[0].hidden.dweights.size(), 0.0);
    g.hidden.dbias.assign(accums[0].hidden.dbias.size(), 0.0);
    g.output.dweights.assign(accums[0].output.dweights.size(), 0.0);
    g.output.dbias.assign(accums[0].output.dbias.size(), 0.0);

    for (const BlockAccum& a : accums) {
        g.loss += a.loss;
        g.correct += a.correct;
        for (std::size_t s = 0; s < g.convs.size(); ++s) {
            for (std::size_t i = 0; i < g.convs[s].dweights.size(); ++i)
                g.convs[s].dweights[i] += a.convs[s].dweights[i];
            for (std::size_t i = 0; i < g.convs[s].dbias.size(); ++i)
                g.convs[s].dbias[i] += a.convs[s].dbias[i];
        }
        for (std::size_t i = 0; i < g.hidden.dweights.size(); ++i)
            g.hidden.dweights[i] += a.hidden.dweights[i];
        for (std::size_t i = 0; i < g.hidden.dbias.size(); ++i)
            g.hidden.dbias[i] += a.hidden.dbias[i];
        for (std::size_t i = 0; i < g.output.dweights.size(); ++i)
            g.output.dweights[i] += a.output.dweights[i];
        for (std::size_t i = 0; i < g.output.dbias.size(); ++i)
            g.output.dbias[i] += a.output.dbias[i];
    }

    const double inv = 1.0 / n;
    g.loss *= inv;
    for (auto& cg : g.convs) {
        for (double& v : cg.dweights) v *= inv;
        for (double& v : cg.dbias) v *= inv;
    }
    for (double& v : g.hidden.dweights) v *= inv;
    for (double& v : g.hidden.dbias) v *= inv;
    for (double& v : g.output.dweights) v *= inv;
    for (double& v : g.output.dbias) v *= inv;
    return g;
}

namespace {

struct Velocity {
    std::vector<std::vector<double>> conv_w;  // per stage, kernel-major flat
    std::vector<std::vector<double>> conv_b;
    std::vector<double> hidden_w, hidden_b, output_w, output_b;

    explicit Velocity(const ClassifierModel& m) {
        conv_w.resize(m.convs.size());
        conv_b.resize(m.convs.size());
        for (std::size_t s = 0; s < m.convs.size(); ++s) {
            const GrowableLayer& l = m.convs[s].layer;
            conv_w[s].assign(l.kernels.size() * l.kernels[0].weights.size(), 0.0);
            conv_b[s].assign(l.kernels.size(), 0.0);
        }
        hidden_w.assign(m.hidden.weights.size(), 0.0);
        hidden_b.assign(m.hidden.bias.size(), 0.0);
        output_w.assign(m.output.weights.size(), 0.0);
        output_b.assign(m.output.bias.size(), 0.0);
    }
};

void apply_update(ClassifierModel& model, const Gradients& g, Velocity& vel,
                  double lr, double momentum) {
    for (std::size_t s = 0; s < model.convs.size(); ++s) {
        if (model.convs[s].frozen || g.convs[s].dweights.empty()) continue;
        GrowableLayer& l = model.convs[s].layer;
        const std::size_t wsize = l.kernels[0].weights.size();
        const std::string name = "conv" + std::to_string(s);
        for (std::size_t f = 0; f < l.kernels.size(); ++f) {
            sgd_update(l.kernels[f].weights,
                       std::span<const double>(g.convs[s].dweights.data() + f * wsize, wsize),
                       std::span<double>(vel.conv_w[s].data() + f * wsize, wsize), lr,
                       momentum, name.c_str());
            sgd_update(std::span<double>(&l.kernels[f].bias, 1),
                       std::span<const double>(&g.convs[s].dbias[f], 1),
                       std::span<double>(&vel.conv_b[s][f], 1), lr, momentum, name.c_str());
        }
    }
    if (!model.hidden.frozen && !g.hidden.dweights.empty()) {
        sgd_update(model.hidden.weights, g.hidden.dweights, vel.hidden_w, lr, momentum,
                   "hidden");
        sgd_update(model.hidden.bias, g.hidden.dbias, vel.hidden_b, lr, momentum, "hidden");
    }
    if (!model.output.frozen && !g.output.dweights.empty()) {
        sgd_update(model.output.weights, g.output.dweights, vel.output_w, lr, momentum,
                   "output");
        sgd_update(model.output.bias, g.output.dbias, vel.output_b, lr, momentum, "output");
    }
}

}  // namespace

TrainHistory train_supervised(ClassifierModel& model, const Dataset& train,
                              const Dataset* test, const TrainConfig& config) {
    if (train.n_classes != model.n_classes)
        throw DimensionError("train_supervised: dataset has " +
                             std::to_string(train.n_classes) + " classes, model expects " +
                             std::to_string(model.n_classes));
    if (config.lr <= 0.0) throw ConfigError("train_supervised: lr must be positive");
    if (config.momentum < 0.0 || config.momentum >= 1.0)
        throw ConfigError("train_supervised: momentum must lie in [0,1)");

    TrainHistory history;
    Velocity vel(model);
    Rng rng(config.rng_seed);
    const int n = train.size();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<int> order = rng.permutation(n);
        double loss_sum = 0.0;
        int correct = 0, seen = 0, batch_index = 0;

        for (int s = 0; s < n; s += config.batch_size, ++batch_index) {
            const int hi = std::min(n, s + config.batch_size);
            std::vector<const Tensor3*> batch;
            std::vector<int> labels;
            batch.reserve(hi - s);
            for (int i = s; i < hi; ++i) {
                batch.push_back(&train.images[order[i]]);
                labels.push_back(train.labels[order[i]]);
            }
            Gradients g = backward_gradients(model, batch, labels);
            if (!std::isfinite(g.loss))
                throw NumericError("train_supervised: non-finite loss (lr=" +
                                   std::to_string(config.lr) + ", epoch=" +
                                   std::to_string(epoch) + ", batch=" +
                                   std::to_string(batch_index) + ")");
            loss_sum += g.loss * (hi - s);
            correct += g.correct;
            seen += hi - s;
            apply_update(model, g, vel, config.lr, config.momentum);
        }

        history.train_loss.push_back(loss_sum / seen);
        history.train_acc.push_back(static_cast<double>(correct) / seen);
        if (test != nullptr) {
            auto [tl, ta] = evaluate_loss_accuracy(model, *test);
            history.test_loss.push_back(tl);
            history.test_acc.push_back(ta);
        }
    }
    return history;
}

std::vector<std::vector<double>> predict_scores(const ClassifierModel& model,
                                                const std::vector<Tensor3>& images) {
    std::vector<std::vector<double>> scores(images.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(images.size()); ++i) {
        SampleTrace tr;
        forward_sample(model, images[i], tr);
        SoftmaxResult sm = softmax_cross_entropy(tr.logits, 0);
        scores[i] = std::move(sm.probs);
    }
    return scores;
}

std::pair<double, double> evaluate_loss_accuracy(const ClassifierModel& model,
                                                 const Dataset& data, int limit) {
    const int n = limit > 0 ? std::min(limit, data.size()) : data.size();
    // fixed blocks, reduced in order, so the loss sum is bit-reproducible
    const int block = 64;
    const int n_blocks = (n + block - 1) / block;
    std::vector<double> block_loss(n_blocks, 0.0);
    std::vector<int> block_correct(n_blocks, 0);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < n_blocks; ++b) {
        SampleTrace tr;
        const int lo = b * block, hi = std::min(n, lo + block);
        for (int i = lo; i < hi; ++i) {
            forward_sample(model, data.images[i], tr);
            SoftmaxResult sm = softmax_cross_entropy(tr.logits, data.labels[i]);
            block_loss[b] += sm.loss;
            int pred = 0;
            for (std::size_t c = 1; c < tr.logits.size(); ++c)
                if (tr.logits[c] > tr.logits[pred]) pred = static_cast<int>(c);
            if (pred == data.labels[i]) ++block_correct[b];
        }
    }
    double loss = 0.0;
    int correct = 0;
    for (int b = 0; b < n_blocks; ++b) {
        loss += block_loss[b];
        correct += block_correct[b];
    }
    return {loss / n, static_cast<double>(correct) / n};
}

}  // namespace growconv
