#ifndef GROWCONV_SERIALIZE_HPP
#define GROWCONV_SERIALIZE_HPP

#include <string>
#include <string_view>

#include "growconv/growth.hpp"
#include "growconv/layer.hpp"
#include "growconv/metrics.hpp"
#include "growconv/model.hpp"

namespace growconv {

struct LayerProvenance {
    std::string dataset;
    int n_images = 0;
    std::string config_hash;
    int growth_epochs = 0;
};

// Layer and model files are JSON written by a canonical writer (fixed key
// order, doubles at 17 significant digits) so save -> load -> save is
// byte-identical and 64-bit weights round-trip exactly.

void save_layer_file(const GrowableLayer& layer, const LayerProvenance& prov,
                     const std::string& path);
GrowableLayer load_layer_file(const std::string& path, LayerProvenance* prov = nullptr);

void save_model_file(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model_file(const std::string& path);

void write_growth_log_csv(const GrowthLog& log, const std::string& path);
void write_growth_summary_json(const GrowthLog& log, const std::string& path);

void write_report_json(const EvalReport& report, const std::string& path);
void write_report_csv(const EvalReport& report, const std::string& path);
void write_roc_csv(const EvalReport& report, const std::string& path);

// Shortest decimal form that parses back to the same double; plain digits
// for integral values.
std::string format_double17(double v);

std::string fnv1a_hex(std::string_view s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace growconv

#endif
