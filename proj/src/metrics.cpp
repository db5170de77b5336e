#include "growconv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "growconv/errors.hpp"

namespace growconv {

namespace {

// One-vs-rest ROC by sweeping the unique scores of one class column.
// Tied scores move as one step, which makes the trapezoid AUC equal to
// pair counting with midranks.
std::vector<std::pair<double, double>> roc_curve(const std::vector<double>& score,
                                                 const std::vector<char>& positive) {
    const int n = static_cast<int>(score.size());
    int n_pos = 0;
    for (char p : positive) n_pos += p;
    const int n_neg = n - n_pos;

    std::vector<std::pair<double, double>> points;
    points.emplace_back(0.0, 0.0);
    if (n_pos == 0 || n_neg == 0) {
        points.emplace_back(1.0, 1.0);
        return points;
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return score[a] > score[b]; });

    int tp = 0, fp = 0;
    int i = 0;
    while (i < n) {
        const double s = score[order[i]];
        while (i < n && score[order[i]] == s) {
            if (positive[order[i]]) ++tp; else ++fp;
            ++i;
        }
        points.emplace_back(static_cast<double>(fp) / n_neg,
                            static_cast<double>(tp) / n_pos);
    }
    return points;  // last point is (1,1) by construction
}

double trapezoid_auc(const std::vector<std::pair<double, double>>& points) {
    double auc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        auc += (points[i].first - points[i - 1].first) *
               (points[i].second + points[i - 1].second) * 0.5;
    return auc;
}

}  // namespace

EvalReport evaluate(const std::vector<std::vector<double>>& scores,
                    const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size())
        throw DimensionError("evaluate: need equally many non-empty scores and labels");
    const int n = static_cast<int>(scores.size());
    const int n_classes = static_cast<int>(scores[0].size());

    EvalReport rep;
    rep.n_samples = n;
    rep.precision.assign(n_classes, 0.0);
    rep.recall.assign(n_classes, 0.0);
    rep.f1.assign(n_classes, 0.0);

    std::vector<int> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
    int correct = 0;
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(scores[i].size()) != n_classes)
            throw DimensionError("evaluate: ragged score rows");
        if (labels[i] < 0 || labels[i] >= n_classes)
            throw DimensionError("evaluate: label " + std::to_string(labels[i]) +
                                 " out of range");
        int pred = 0;  // lowest index wins ties
        for (int c = 1; c < n_classes; ++c)
            if (scores[i][c] > scores[i][pred]) pred = c;
        if (pred == labels[i]) {
            ++correct;
            ++tp[pred];
        } else {
            ++fp[pred];
            ++fn[labels[i]];
        }
    }
    rep.accuracy = static_cast<double>(correct) / n;

    for (int c = 0; c < n_classes; ++c) {
        if (tp[c] + fp[c] > 0)
            rep.precision[c] = static_cast<double>(tp[c]) / (tp[c] + fp[c]);
        else
            rep.undefined_flag = true;
        if (tp[c] + fn[c] > 0)
            rep.recall[c] = static_cast<double>(tp[c]) / (tp[c] + fn[c]);
        else
            rep.undefined_flag = true;
        const double pr = rep.precision[c] + rep.recall[c];
        rep.f1[c] = pr > 0.0 ? 2.0 * rep.precision[c] * rep.recall[c] / pr : 0.0;
    }
    rep.macro_precision =
        std::accumulate(rep.precision.begin(), rep.precision.end(), 0.0) / n_classes;
    rep.macro_recall =
        std::accumulate(rep.recall.begin(), rep.recall.end(), 0.0) / n_classes;
    rep.macro_f1 = std::accumulate(rep.f1.begin(), rep.f1.end(), 0.0) / n_classes;

    rep.roc.resize(n_classes);
    rep.auc.assign(n_classes, 0.0);
    std::vector<double> column(n);
    std::vector<char> positive(n);
    for (int c = 0; c < n_classes; ++c) {
        for (int i = 0; i < n; ++i) {
            column[i] = scores[i][c];
            positive[i] = labels[i] == c ? 1 : 0;
        }
        rep.roc[c] = roc_curve(column, positive);
        rep.auc[c] = trapezoid_auc(rep.roc[c]);
    }
    return rep;
}

namespace {

// tpr at the given fpr, linear between vertices; at a shared fpr the
// latest (highest) point wins, giving the curve's upper envelope.
double interp_tpr(const std::vector<std::pair<double, double>>& points, double x) {
    if (x <= points.front().first) return points.front().second;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (x > points[i].first) continue;
        const auto [x0, y0] = points[i - 1];
        const auto [x1, y1] = points[i];
        if (x == x1) {
            double best = y1;
            for (std::size_t j = i + 1; j < points.size() && points[j].first == x1; ++j)
                best = points[j].second;
            return best;
        }
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
    return points.back().second;
}

}  // namespace

EvalReport aggregate(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw DimensionError("aggregate: no reports");
    const int n_classes = reports[0].n_classes();
    for (const EvalReport& r : reports)
        if (r.n_classes() != n_classes)
            throw DimensionError("aggregate: mixed class counts (" +
                                 std::to_string(n_classes) + " vs " +
                                 std::to_string(r.n_classes()) + ")");

    const double inv = 1.0 / reports.size();
    EvalReport out;
    out.precision.assign(n_classes, 0.0);
    out.recall.assign(n_classes, 0.0);
    out.f1.assign(n_classes, 0.0);
    out.auc.assign(n_classes, 0.0);
    out.roc.assign(n_classes, {});

    constexpr int kGrid = 101;
    for (int c = 0; c < n_classes; ++c) {
        out.roc[c].resize(kGrid);
        for (int g = 0; g < kGrid; ++g) out.roc[c][g] = {g / 100.0, 0.0};
    }

    for (const EvalReport& r : reports) {
        out.accuracy += r.accuracy * inv;
        out.macro_precision += r.macro_precision * inv;
        out.macro_recall += r.macro_recall * inv;
        out.macro_f1 += r.macro_f1 * inv;
        out.n_samples += r.n_samples;
        out.undefined_flag = out.undefined_flag || r.undefined_flag;
        for (int c = 0; c < n_classes; ++c) {
            out.precision[c] += r.precision[c] * inv;
            out.recall[c] += r.recall[c] * inv;
            out.f1[c] += r.f1[c] * inv;
            out.auc[c] += r.auc[c] * inv;
            for (int g = 0; g < kGrid; ++g)
                out.roc[c][g].second += interp_tpr(r.roc[c], g / 100.0) * inv;
        }
    }
    return out;
}

}  // namespace growconv
