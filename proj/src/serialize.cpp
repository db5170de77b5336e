#include "growconv/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "growconv/errors.hpp"

namespace growconv {

using nlohmann::json;

std::string format_double17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv1a_hex(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    f << content;
    if (!f) throw DataError("failed writing " + path);
}

namespace {

void append_weights(std::string& out, const std::vector<double>& w) {
    out += '[';
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ',';
        out += format_double17(w[i]);
    }
    out += ']';
}

std::string kernel_lines(const std::vector<Kernel>& kernels, const std::string& indent) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        out += indent + "  {\"weights\": ";
        append_weights(out, kernels[i].weights);
        out += ", \"bias\": " + format_double17(kernels[i].bias) + "}";
        if (i + 1 < kernels.size()) out += ',';
        out += '\n';
    }
    out += indent + ']';
    return out;
}

std::vector<Kernel> parse_kernels(const json& arr, int expected_len, const std::string& path) {
    std::vector<Kernel> kernels;
    for (const json& jk : arr) {
        Kernel k;
        k.bias = jk.at("bias").get<double>();
        k.weights = jk.at("weights").get<std::vector<double>>();
        if (static_cast<int>(k.weights.size()) != expected_len)
            throw DataError(path + ": kernel has " + std::to_string(k.weights.size()) +
                            " weights, expected " + std::to_string(expected_len));
        kernels.push_back(std::move(k));
    }
    return kernels;
}

}  // namespace

void save_layer_file(const GrowableLayer& layer, const LayerProvenance& prov,
                     const std::string& path) {
    std::string out = "{\n";
    out += "  \"format_version\": 1,\n";
    out += "  \"kernel_size\": " + std::to_string(layer.kernel_size) + ",\n";
    out += "  \"in_channels\": " + std::to_string(layer.in_channels) + ",\n";
    out += "  \"alpha\": " + format_double17(layer.alpha) + ",\n";
    out += "  \"kernels\": " + kernel_lines(layer.kernels, "  ") + ",\n";
    out += "  \"provenance\": {\"dataset\": " + json(prov.dataset).dump() +
           ", \"n_images\": " + std::to_string(prov.n_images) +
           ", \"config_hash\": \"" + prov.config_hash +
           "\", \"growth_epochs\": " + std::to_string(prov.growth_epochs) + "}\n";
    out += "}\n";
    write_text_file(path, out);
}

GrowableLayer load_layer_file(const std::string& path, LayerProvenance* prov) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != 1)
            throw DataError(path + ": unsupported format_version " + std::to_string(version));
        GrowableLayer layer;
        layer.kernel_size = j.at("kernel_size").get<int>();
        layer.in_channels = j.at("in_channels").get<int>();
        layer.alpha = j.at("alpha").get<double>();
        layer.kernels = parse_kernels(j.at("kernels"),
                                      layer.kernel_size * layer.kernel_size * layer.in_channels,
                                      path);
        if (layer.kernels.empty()) throw DataError(path + ": layer has no kernels");
        if (prov != nullptr && j.contains("provenance")) {
            const json& p = j["provenance"];
            prov->dataset = p.value("dataset", "");
            prov->n_images = p.value("n_images", 0);
            prov->config_hash = p.value("config_hash", "");
            prov->growth_epochs = p.value("growth_epochs", 0);
        }
        return layer;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

void save_model_file(const ClassifierModel& model, const std::string& path) {
    std::string out = "{\n";
    out += "  \"format_version\": 1,\n";
    out += std::string("  \"topology\": \"") +
           (model.topology == Topology::kModel1 ? "model1" : "model2") + "\",\n";
    out += "  \"n_classes\": " + std::to_string(model.n_classes) + ",\n";
    out += "  \"input\": [" + std::to_string(model.in_height) + ", " +
           std::to_string(model.in_width) + ", " + std::to_string(model.in_channels) + "],\n";
    out += std::string("  \"conv_activation\": \"") +
           (model.conv_activation == Activation::kRelu ? "relu" : "sigmoid") + "\",\n";
    out += "  \"rng_seed\": " + std::to_string(model.rng_seed) + ",\n";
    out += "  \"layers\": [\n";
    for (const ConvStage& s : model.convs) {
        out += "    {\"kind\": \"conv\", \"kernel_size\": " +
               std::to_string(s.layer.kernel_size) +
               ", \"in_channels\": " + std::to_string(s.layer.in_channels) +
               ", \"alpha\": " + format_double17(s.layer.alpha) +
               std::string(", \"frozen\": ") + (s.frozen ? "true" : "false") +
               ", \"generated\": " + (s.generated ? "true" : "false") +
               ", \"kernels\": " + kernel_lines(s.layer.kernels, "    ") + "},\n";
        out += "    {\"kind\": \"maxpool2\"},\n";
    }
    const auto dense_json = [&](const DenseStage& d, const char* kind) {
        std::string s = "    {\"kind\": \"";
        s += kind;
        s += "\", \"in_dim\": " + std::to_string(d.in_dim) +
             ", \"out_dim\": " + std::to_string(d.out_dim) +
             std::string(", \"frozen\": ") + (d.frozen ? "true" : "false") +
             ", \"weights\": ";
        append_weights(s, d.weights);
        s += ", \"bias\": ";
        append_weights(s, d.bias);
        s += "}";
        return s;
    };
    out += dense_json(model.hidden, "dense") + ",\n";
    out += dense_json(model.output, "output") + "\n";
    out += "  ]\n}\n";
    write_text_file(path, out);
}

ClassifierModel load_model_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != 1)
            throw DataError(path + ": unsupported format_version " + std::to_string(version));
        ClassifierModel m;
        const std::string topo = j.at("topology").get<std::string>();
        if (topo == "model1") m.topology = Topology::kModel1;
        else if (topo == "model2") m.topology = Topology::kModel2;
        else throw DataError(path + ": unknown topology " + topo);
        m.n_classes = j.at("n_classes").get<int>();
        const json& in = j.at("input");
        m.in_height = in.at(0).get<int>();
        m.in_width = in.at(1).get<int>();
        m.in_channels = in.at(2).get<int>();
        m.conv_activation = j.at("conv_activation").get<std::string>() == "relu"
                                ? Activation::kRelu
                                : Activation::kSigmoid;
        m.rng_seed = j.value("rng_seed", 0ULL);
        for (const json& jl : j.at("layers")) {
            const std::string kind = jl.at("kind").get<std::string>();
            if (kind == "conv") {
                ConvStage stage;
                stage.layer.kernel_size = jl.at("kernel_size").get<int>();
                stage.layer.in_channels = jl.at("in_channels").get<int>();
                stage.layer.alpha = jl.at("alpha").get<double>();
                stage.layer.kernels = parse_kernels(
                    jl.at("kernels"),
                    stage.layer.kernel_size * stage.layer.kernel_size * stage.layer.in_channels,
                    path);
                stage.frozen = jl.at("frozen").get<bool>();
                stage.generated = jl.value("generated", false);
                m.convs.push_back(std::move(stage));
            } else if (kind == "dense" || kind == "output") {
                DenseStage d;
                d.in_dim = jl.at("in_dim").get<int>();
                d.out_dim = jl.at("out_dim").get<int>();
                d.frozen = jl.at("frozen").get<bool>();
                d.weights = jl.at("weights").get<std::vector<double>>();
                d.bias = jl.at("bias").get<std::vector<double>>();
                if (static_cast<int>(d.weights.size()) != d.in_dim * d.out_dim ||
                    static_cast<int>(d.bias.size()) != d.out_dim)
                    throw DataError(path + ": dense dims do not match weight array");
                (kind == "dense" ? m.hidden : m.output) = std::move(d);
            } else if (kind != "maxpool2") {
                throw DataError(path + ": unknown layer kind " + kind);
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_growth_log_csv(const GrowthLog& log, const std::string& path) {
    std::string out = "epoch,image_id,row,col,boost_iters,final_loss,n_negatives\n";
    for (const KernelRecord& r : log.kernels) {
        out += std::to_string(r.epoch) + ',' + std::to_string(r.image_id) + ',' +
               std::to_string(r.row) + ',' + std::to_string(r.col) + ',' +
               std::to_string(r.boost_iters) + ',' + format_double17(r.final_loss) + ',' +
               std::to_string(r.n_negatives) + '\n';
    }
    write_text_file(path, out);
}

void write_growth_summary_json(const GrowthLog& log, const std::string& path) {
    std::string out = "{\n  \"epochs\": " + std::to_string(log.epoch_mean_h.size()) + ",\n";
    out += "  \"per_epoch_mean_h\": [";
    for (std::size_t i = 0; i < log.epoch_mean_h.size(); ++i) {
        if (i) out += ", ";
        out += format_double17(log.epoch_mean_h[i]);
    }
    out += "],\n  \"per_epoch_kernel_count\": [";
    for (std::size_t i = 0; i < log.epoch_kernel_count.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(log.epoch_kernel_count[i]);
    }
    out += "],\n  \"kernels_added\": " + std::to_string(log.kernels.size());
    out += ",\n  \"images_seen\": " + std::to_string(log.images_seen);
    out += ",\n  \"patches_skipped\": " + std::to_string(log.patches_skipped);
    out += ",\n  \"final_batch_mean_h\": " + format_double17(log.final_batch_mean_h);
    out += std::string(",\n  \"stopped_by_ratio\": ") +
           (log.stopped_by_ratio ? "true" : "false") + "\n}\n";
    write_text_file(path, out);
}

void write_report_json(const EvalReport& report, const std::string& path) {
    json j;
    j["accuracy"] = report.accuracy;
    j["macro_precision"] = report.macro_precision;
    j["macro_recall"] = report.macro_recall;
    j["macro_f1"] = report.macro_f1;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    j["auc"] = report.auc;
    j["n_samples"] = report.n_samples;
    j["seed"] = report.seed;
    j["undefined_flag"] = report.undefined_flag;
    write_text_file(path, j.dump(2) + "\n");
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::string out = "class,precision,recall,f1,auc\n";
    for (int c = 0; c < report.n_classes(); ++c)
        out += std::to_string(c) + ',' + format_double17(report.precision[c]) + ',' +
               format_double17(report.recall[c]) + ',' + format_double17(report.f1[c]) + ',' +
               format_double17(report.auc[c]) + '\n';
    double mean_auc = 0.0;
    for (double a : report.auc) mean_auc += a;
    if (report.n_classes() > 0) mean_auc /= report.n_classes();
    out += "macro," + format_double17(report.macro_precision) + ',' +
           format_double17(report.macro_recall) + ',' + format_double17(report.macro_f1) +
           ',' + format_double17(mean_auc) + '\n';
    write_text_file(path, out);
}

void write_roc_csv(const EvalReport& report, const std::string& path) {
    std::string out = "class,fpr,tpr\n";
    for (int c = 0; c < report.n_classes(); ++c)
        for (const auto& [fpr, tpr] : report.roc[c])
            out += std::to_string(c) + ',' + format_double17(fpr) + ',' +
                   format_double17(tpr) + '\n';
    write_text_file(path, out);
}

}  // namespace growconv
