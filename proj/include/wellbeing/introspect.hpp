#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"
#include "wellbeing/features.hpp"
#include "wellbeing/model.hpp"
#include "wellbeing/stats.hpp"

namespace wellbeing {

struct ChannelCorrelation {
    std::optional<double> r;  // empty for constant columns
    double p_value = 1.0;
    bool significant = false;  // p < 0.05 / n_features (Bonferroni)
};

struct ImportanceReport {
    std::vector<std::string> feature_names;
    std::vector<double> importance;       // mean |conv weight| across channels
    std::vector<size_t> ranking;          // feature indices, most important first
    // [feature][channel]
    std::vector<std::vector<ChannelCorrelation>> correlations;
};

// importance_j = mean over channels of |kernel_c[j]|. Absolute values: signed
// averaging would let opposing channels cancel.
inline std::vector<double> conv_weight_importance(const MTMLNetwork& net) {
    if (!net.trained()) throw UntrainedModel("importance of an untrained model");
    const Conv1DLayer& conv = net.conv();
    std::vector<double> importance(conv.width(), 0.0);
    for (size_t c = 0; c < conv.channels(); ++c) {
        for (size_t j = 0; j < conv.width(); ++j) {
            importance[j] += std::fabs(conv.kernels()[c * conv.width() + j]);
        }
    }
    for (auto& v : importance) v /= static_cast<double>(conv.channels());
    return importance;
}

// Pearson correlation between every conv output channel and every input
// feature over the given rows (scaled exactly as the model saw them).
// Constant columns yield missing entries rather than failures.
inline std::vector<std::vector<ChannelCorrelation>> cnn_output_correlation(
    const MTMLNetwork& net, const std::vector<DailyFeatureVector>& rows) {
    if (!net.trained()) throw UntrainedModel("correlation on an untrained model");
    if (rows.size() < 3) throw InsufficientRows("need >= 3 feature rows");

    const size_t width = net.conv().width();
    const size_t channels = net.conv().channels();
    Tensor2D x(rows.size(), width);
    for (size_t r = 0; r < rows.size(); ++r) net.scaler().apply(rows[r], x.row(r));
    const Tensor2D out = net.conv().forward(x);

    const double bonferroni = 0.05 / static_cast<double>(width);
    std::vector<std::vector<ChannelCorrelation>> result(
        width, std::vector<ChannelCorrelation>(channels));
    for (size_t j = 0; j < width; ++j) {
        std::vector<double> xj(rows.size());
        for (size_t r = 0; r < rows.size(); ++r) xj[r] = x.at(r, j);
        for (size_t c = 0; c < channels; ++c) {
            std::vector<double> oc(rows.size());
            for (size_t r = 0; r < rows.size(); ++r) oc[r] = out.at(r, c);
            try {
                const PearsonResult pr = pearson_r(xj, oc);
                result[j][c].r = pr.r;
                result[j][c].p_value = pr.p_value;
                result[j][c].significant = pr.p_value < bonferroni;
            } catch (const DegenerateVariance&) {
                // constant feature or dead channel: leave the entry missing
            }
        }
    }
    return result;
}

inline ImportanceReport analyze_model(const MTMLNetwork& net,
                                      const std::vector<DailyFeatureVector>& rows) {
    ImportanceReport report;
    report.feature_names = FeatureSchema::names();
    report.importance = conv_weight_importance(net);
    report.correlations = cnn_output_correlation(net, rows);
    report.ranking.resize(report.importance.size());
    for (size_t i = 0; i < report.ranking.size(); ++i) report.ranking[i] = i;
    std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](size_t a, size_t b) {
        return report.importance[a] > report.importance[b];
    });
    return report;
}

inline CsvTable importance_to_csv(const ImportanceReport& report) {
    CsvTable t;
    t.header = {"feature", "importance", "rank", "max_abs_r", "mean_abs_r",
                "significant_channels"};
    std::vector<size_t> rank_of(report.feature_names.size());
    for (size_t pos = 0; pos < report.ranking.size(); ++pos) rank_of[report.ranking[pos]] = pos + 1;
    for (size_t j = 0; j < report.feature_names.size(); ++j) {
        double max_r = 0.0, sum_r = 0.0;
        size_t n_r = 0, n_sig = 0;
        for (const auto& cc : report.correlations[j]) {
            if (!cc.r) continue;
            max_r = std::max(max_r, std::fabs(*cc.r));
            sum_r += std::fabs(*cc.r);
            ++n_r;
            if (cc.significant) ++n_sig;
        }
        t.rows.push_back({report.feature_names[j], format_double(report.importance[j]),
                          std::to_string(rank_of[j]), n_r ? format_double(max_r) : "",
                          n_r ? format_double(sum_r / static_cast<double>(n_r)) : "",
                          std::to_string(n_sig)});
    }
    return t;
}

}  // namespace wellbeing
