#ifndef GROWCONV_METRICS_HPP
#define GROWCONV_METRICS_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace growconv {

struct EvalReport {
    double accuracy = 0.0;
    std::vector<double> precision;  // per class
    std::vector<double> recall;
    std::vector<double> f1;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    // Per class: (fpr, tpr) points from (0,0) to (1,1), fpr non-decreasing.
    std::vector<std::vector<std::pair<double, double>>> roc;
    std::vector<double> auc;
    int n_samples = 0;
    std::uint64_t seed = 0;
    // Some class had a zero denominator (reported as 0).
    bool undefined_flag = false;

    int n_classes() const { return static_cast<int>(precision.size()); }
};

// Predictions are per-row argmax (lowest index wins ties). One-vs-rest ROC
// per class by sweeping the unique scores of that class's column; AUC by
// trapezoid, which matches pair counting with midrank tie handling.
EvalReport evaluate(const std::vector<std::vector<double>>& scores,
                    const std::vector<int>& labels);

// Arithmetic mean of the scalar metrics; ROC curves averaged vertically on
// a fixed 101-point fpr grid.
EvalReport aggregate(const std::vector<EvalReport>& reports);

}  // namespace growconv

#endif
