#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"
#include "wellbeing/features.hpp"
#include "wellbeing/model.hpp"
#include "wellbeing/stats.hpp"

namespace wellbeing {

// ---------------------------------------------------------------------------
// Label discretization
// ---------------------------------------------------------------------------

enum class LabelView { binary, three_class };

// binary: 0-50 low / 51-100 high; three-class: 0-33 / 34-66 / 67-100
inline int discretize(double label, LabelView view) {
    if (!(label >= 0.0 && label <= 100.0)) {
        throw OutOfRange("label " + format_double(label) + " outside [0,100]");
    }
    if (view == LabelView::binary) return label <= 50.0 ? 0 : 1;
    if (label <= 33.0) return 0;
    if (label <= 66.0) return 1;
    return 2;
}

inline LabelView view_for(TaskMode task) {
    return task == TaskMode::binary ? LabelView::binary : LabelView::three_class;
}

// ---------------------------------------------------------------------------
// Split plan: 10 seeded 80/20 repetitions with 10-fold CV inside each
// training partition. Splits are by participant-day row (the paper's counts
// are row-level); --by-participant switches to participant-level splitting.
// ---------------------------------------------------------------------------

struct SplitRepetition {
    uint64_t seed = 0;
    std::vector<size_t> train_idx;
    std::vector<size_t> test_idx;
    std::vector<int> fold_of;  // aligned with train_idx, values 0..n_folds-1
};

struct SplitPlan {
    uint64_t master_seed = 0;
    int n_folds = 10;
    std::vector<SplitRepetition> repetitions;
};

inline SplitPlan make_split_plan(size_t n_rows, uint64_t seed, int n_repetitions = 10,
                                 int n_folds = 10,
                                 const std::vector<std::string>* participant_of = nullptr) {
    if (n_rows < 20) throw TooSmall("need >= 20 rows to split, got " + std::to_string(n_rows));
    SplitPlan plan;
    plan.master_seed = seed;
    plan.n_folds = n_folds;
    for (int rep = 0; rep < n_repetitions; ++rep) {
        SplitRepetition r;
        r.seed = derive_seed(seed, "split", static_cast<uint64_t>(rep));
        Rng rng(r.seed);
        if (participant_of == nullptr) {
            std::vector<size_t> order(n_rows);
            for (size_t i = 0; i < n_rows; ++i) order[i] = i;
            rng.shuffle(order);
            const size_t n_test = static_cast<size_t>(std::llround(0.2 * static_cast<double>(n_rows)));
            r.test_idx.assign(order.begin(), order.begin() + static_cast<long>(n_test));
            r.train_idx.assign(order.begin() + static_cast<long>(n_test), order.end());
        } else {
            // participant-level: hold out whole participants until ~20% of rows
            std::vector<std::string> pids;
            for (const auto& p : *participant_of) {
                if (std::find(pids.begin(), pids.end(), p) == pids.end()) pids.push_back(p);
            }
            rng.shuffle(pids);
            const size_t target = static_cast<size_t>(std::llround(0.2 * static_cast<double>(n_rows)));
            std::vector<std::string> held;
            size_t held_rows = 0;
            for (const auto& p : pids) {
                if (held_rows >= target) break;
                held.push_back(p);
                for (const auto& q : *participant_of) {
                    if (q == p) ++held_rows;
                }
            }
            for (size_t i = 0; i < n_rows; ++i) {
                const bool test = std::find(held.begin(), held.end(), (*participant_of)[i]) != held.end();
                (test ? r.test_idx : r.train_idx).push_back(i);
            }
        }
        r.fold_of.resize(r.train_idx.size());
        for (size_t i = 0; i < r.train_idx.size(); ++i) {
            r.fold_of[i] = static_cast<int>(i % static_cast<size_t>(n_folds));
        }
        plan.repetitions.push_back(std::move(r));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct F1Result {
    double macro_f1 = 0.0;
    std::vector<double> precision, recall, f1;  // per class
};

// Macro-averaged f1 with the zero convention for empty denominators.
inline F1Result f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                         int n_classes) {
    if (y_true.size() != y_pred.size()) throw ShapeMismatch("f1_score length mismatch");
    F1Result res;
    res.precision.assign(static_cast<size_t>(n_classes), 0.0);
    res.recall.assign(static_cast<size_t>(n_classes), 0.0);
    res.f1.assign(static_cast<size_t>(n_classes), 0.0);
    for (int c = 0; c < n_classes; ++c) {
        double tp = 0, fp = 0, fn = 0;
        for (size_t i = 0; i < y_true.size(); ++i) {
            if (y_true[i] < 0 || y_true[i] >= n_classes || y_pred[i] < 0 || y_pred[i] >= n_classes) {
                throw InvalidClass("label outside [0,n_classes)");
            }
            if (y_pred[i] == c && y_true[i] == c) ++tp;
            else if (y_pred[i] == c) ++fp;
            else if (y_true[i] == c) ++fn;
        }
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        const double f = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        res.precision[static_cast<size_t>(c)] = prec;
        res.recall[static_cast<size_t>(c)] = rec;
        res.f1[static_cast<size_t>(c)] = f;
        res.macro_f1 += f / static_cast<double>(n_classes);
    }
    return res;
}

inline double mae(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    if (y_true.size() != y_pred.size()) throw ShapeMismatch("mae length mismatch");
    if (y_true.empty()) throw Error("mae on empty vectors");
    double s = 0.0;
    for (size_t i = 0; i < y_true.size(); ++i) s += std::fabs(y_true[i] - y_pred[i]);
    return s / static_cast<double>(y_true.size());
}

// ---------------------------------------------------------------------------
// Model dataset: feature day t paired with day t+1 labels
// ---------------------------------------------------------------------------

struct LabeledRow {
    const DailyFeatureVector* features = nullptr;
    std::array<double, 5> next_labels{};
};

inline std::vector<LabeledRow> build_labeled_rows(
    const std::vector<DailyFeatureVector>& features,
    const std::map<std::pair<std::string, int32_t>, WellbeingLabels>& labels) {
    std::vector<LabeledRow> rows;
    for (const auto& fv : features) {
        const auto it = labels.find({fv.participant_id, (fv.date + 1).serial});
        if (it == labels.end()) continue;
        rows.push_back({&fv, it->second.values});
    }
    return rows;
}

// Standardized batch over a row subset. Regression targets go to [0,1];
// class targets hold both views' discretizations depending on `task`.
inline Batch make_batch(const std::vector<LabeledRow>& rows, const std::vector<size_t>& idx,
                        const FeatureScaler& scaler, TaskMode task) {
    Batch b;
    b.features = Tensor2D(idx.size(), FeatureSchema::size);
    b.reg_targets = Tensor2D(idx.size(), 5);
    b.roles.reserve(idx.size());
    b.cls_targets.resize(idx.size());
    for (size_t r = 0; r < idx.size(); ++r) {
        const LabeledRow& row = rows[idx[r]];
        scaler.apply(*row.features, b.features.row(r));
        b.roles.push_back(row.features->role);
        for (size_t l = 0; l < 5; ++l) {
            b.reg_targets.at(r, l) = row.next_labels[l] / 100.0;
            b.cls_targets[r][l] = task == TaskMode::regression
                                      ? 0
                                      : discretize(row.next_labels[l], view_for(task));
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct GridPoint {
    std::optional<std::vector<size_t>> shared_widths;
    std::optional<size_t> branch_width;
    std::optional<double> learning_rate;
    std::optional<double> focal_gamma;
    std::optional<size_t> epochs;

    ModelConfig apply(ModelConfig base) const {
        if (shared_widths) base.shared_widths = *shared_widths;
        if (branch_width) base.branch_width = *branch_width;
        if (learning_rate) base.learning_rate = *learning_rate;
        if (focal_gamma) base.focal_gamma = *focal_gamma;
        if (epochs) base.epochs = *epochs;
        return base;
    }
};

struct GridSpec {
    std::vector<GridPoint> points;

    static GridSpec single_default() { return GridSpec{{GridPoint{}}}; }
};

inline GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec grid;
    for (const auto& p : j.at("grid")) {
        GridPoint gp;
        if (p.contains("shared_widths")) gp.shared_widths = p["shared_widths"].get<std::vector<size_t>>();
        if (p.contains("branch_width")) gp.branch_width = p["branch_width"].get<size_t>();
        if (p.contains("learning_rate")) gp.learning_rate = p["learning_rate"].get<double>();
        if (p.contains("focal_gamma")) gp.focal_gamma = p["focal_gamma"].get<double>();
        if (p.contains("epochs")) gp.epochs = p["epochs"].get<size_t>();
        grid.points.push_back(std::move(gp));
    }
    if (grid.points.empty()) throw ConfigError("grid file contains no points");
    return grid;
}

inline GridSpec load_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grid file '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
        return grid_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad grid file '" + path.string() + "': " + e.what());
    }
}

// Inverse-frequency focal alphas (normalized to mean 1) over the classes seen
// by this model's labels in the training rows; add-one smoothed so unseen
// classes stay finite.
inline std::vector<double> inverse_frequency_alpha(const Batch& train, const ModelConfig& cfg) {
    const size_t k = cfg.head_dim();
    std::vector<double> counts(k, 1.0);
    for (size_t r = 0; r < train.size(); ++r) {
        for (size_t l = 0; l < cfg.n_labels(); ++l) {
            counts[static_cast<size_t>(train.cls_targets[r][cfg.label_column(l)])] += 1.0;
        }
    }
    std::vector<double> alpha(k);
    double sum = 0.0;
    for (size_t c = 0; c < k; ++c) {
        alpha[c] = 1.0 / counts[c];
        sum += alpha[c];
    }
    for (auto& a : alpha) a *= static_cast<double>(k) / sum;
    return alpha;
}

struct GridSearchOutcome {
    size_t best_index = 0;
    double best_score = 0.0;  // mean CV validation loss (MAE or focal)
    std::vector<double> scores;
};

// Selects the grid point minimizing mean CV validation loss; ties break to
// the smaller parameter count, then to earlier grid order.
inline GridSearchOutcome grid_search(const std::vector<LabeledRow>& rows,
                                     const SplitRepetition& rep, const FeatureScaler& scaler,
                                     const GridSpec& grid, const ModelConfig& base,
                                     int n_folds) {
    GridSearchOutcome out;
    double best_score = std::numeric_limits<double>::infinity();
    size_t best_params = 0;

    for (size_t g = 0; g < grid.points.size(); ++g) {
        const ModelConfig cfg = grid.points[g].apply(base);
        double score_sum = 0.0;
        int folds_used = 0;
        for (int fold = 0; fold < n_folds; ++fold) {
            std::vector<size_t> fold_train, fold_val;
            for (size_t i = 0; i < rep.train_idx.size(); ++i) {
                (rep.fold_of[i] == fold ? fold_val : fold_train).push_back(rep.train_idx[i]);
            }
            if (fold_val.empty() || fold_train.empty()) continue;
            Batch train_b = make_batch(rows, fold_train, scaler, cfg.task);
            const Batch val_b = make_batch(rows, fold_val, scaler, cfg.task);

            // seeded per fold but not per grid point, so identical candidates
            // score identically and comparisons across candidates are paired
            ModelConfig fold_cfg = cfg;
            fold_cfg.seed = derive_seed(base.seed, "cv_fold", static_cast<uint64_t>(fold));
            if (fold_cfg.task != TaskMode::regression && fold_cfg.focal_alpha.empty()) {
                fold_cfg.focal_alpha = inverse_frequency_alpha(train_b, fold_cfg);
            }
            MTMLNetwork net(fold_cfg);
            train(net, train_b, &val_b);

            if (cfg.task == TaskMode::regression) {
                // validation MAE on the 0-100 scale, averaged over the model's labels
                const auto heads = net.forward(val_b.features, val_b.roles);
                double err = 0.0;
                size_t n = 0;
                for (size_t l = 0; l < fold_cfg.n_labels(); ++l) {
                    const size_t col = fold_cfg.label_column(l);
                    for (size_t r = 0; r < val_b.size(); ++r) {
                        err += std::fabs(heads[l].at(r, 0) * 100.0 - val_b.reg_targets.at(r, col) * 100.0);
                        ++n;
                    }
                }
                score_sum += err / static_cast<double>(n);
            } else {
                score_sum += masked_batch_loss(net, val_b, false) / static_cast<double>(val_b.size());
            }
            ++folds_used;
        }
        const double score = folds_used > 0 ? score_sum / folds_used
                                            : std::numeric_limits<double>::infinity();
        out.scores.push_back(score);

        ModelConfig cfg_for_count = cfg;
        cfg_for_count.seed = 0;
        MTMLNetwork probe(cfg_for_count);
        const size_t params = probe.parameter_count();
        const bool better = score < best_score ||
                            (score == best_score && params < best_params);
        if (g == 0 || better) {
            best_score = score;
            best_params = params;
            out.best_index = g;
        }
    }
    out.best_score = best_score;
    return out;
}

// ---------------------------------------------------------------------------
// Full experiment: per repetition, grid-search + retrain + test evaluation
// for every requested variant and task, plus baseline floors.
// ---------------------------------------------------------------------------

// Variant token: "mtml", "mt", "ml", "nn", and the role-restricted ML runs
// "ml_n" / "ml_d".
struct VariantToken {
    Variant variant = Variant::mtml;
    std::optional<Role> subset;
    std::string name;

    static VariantToken parse(const std::string& s) {
        if (s == "ml_n") return {Variant::ml, Role::nurse, s};
        if (s == "ml_d") return {Variant::ml, Role::doctor, s};
        return {variant_from_string(s), std::nullopt, s};
    }
};

struct MetricRow {
    std::string variant;
    TaskMode task = TaskMode::regression;
    std::string label;
    std::string metric_name;  // "mae" or "macro_f1"
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> per_rep;
    size_t n_classes = 0;
    std::array<double, 3> precision_mean{}, recall_mean{}, f1_mean{};
    bool baseline = false;
};

struct RepLogEntry {
    int repetition = 0;
    std::string variant;
    TaskMode task = TaskMode::regression;
    std::string label;
    double metric = 0.0;
    size_t grid_choice = 0;
    uint64_t split_seed = 0;
};

struct SignificanceRow {
    TaskMode task = TaskMode::regression;
    std::string label;
    std::string metric_name;
    double anova_f = 0.0;
    double anova_p = 1.0;
    std::string variant_a, variant_b;
    double tukey_p = 1.0;
};

struct ExperimentReport {
    std::vector<MetricRow> rows;
    std::vector<SignificanceRow> significance;
    std::vector<RepLogEntry> rep_log;
};

namespace detail {

// per (variant, task, rep): metric per label plus per-class stats
struct RepResult {
    std::array<double, 5> metric{};  // indexed by label column; NaN where not predicted
    std::array<std::array<double, 3>, 5> precision{}, recall{}, f1{};
    std::array<size_t, 5> grid_choice{};
    bool has_label[5] = {false, false, false, false, false};
};

inline uint64_t cell_seed(uint64_t master, const std::string& variant, TaskMode task) {
    return derive_seed(master, "cell_" + variant + "_" + to_string(task));
}

inline std::vector<size_t> subset_indices(const std::vector<LabeledRow>& rows,
                                          const std::vector<size_t>& idx,
                                          std::optional<Role> subset) {
    if (!subset) return idx;
    std::vector<size_t> out;
    for (size_t i : idx) {
        if (rows[i].features->role == *subset) out.push_back(i);
    }
    return out;
}

inline RepResult run_one_cell(const std::vector<LabeledRow>& rows, const SplitRepetition& rep,
                              const VariantToken& vt, TaskMode task, const GridSpec& grid,
                              const ModelConfig& base_template, uint64_t master_seed,
                              int rep_index, int n_folds) {
    RepResult result;

    const std::vector<size_t> train_all = subset_indices(rows, rep.train_idx, vt.subset);
    const std::vector<size_t> test_all = subset_indices(rows, rep.test_idx, vt.subset);
    if (train_all.size() < 10 || test_all.empty()) return result;

    // scaler from the training partition only (leakage barrier)
    std::vector<const DailyFeatureVector*> train_features;
    train_features.reserve(train_all.size());
    for (size_t i : train_all) train_features.push_back(rows[i].features);
    const FeatureScaler scaler = FeatureScaler::fit(train_features);

    SplitRepetition rep_subset;  // fold assignments restricted to the subset
    rep_subset.seed = rep.seed;
    rep_subset.train_idx = train_all;
    rep_subset.fold_of.resize(train_all.size());
    for (size_t i = 0; i < train_all.size(); ++i) {
        rep_subset.fold_of[i] = static_cast<int>(i % static_cast<size_t>(n_folds));
    }

    ModelConfig base = base_template;
    base.variant = vt.variant;
    base.task = task;

    const size_t models = base.n_labels() == 5 ? 1 : 5;
    for (size_t mi = 0; mi < models; ++mi) {
        ModelConfig cfg = base;
        cfg.target_label = base.n_labels() == 5 ? 0 : static_cast<int>(mi);
        cfg.seed = derive_seed(cell_seed(master_seed, vt.name, task), "rep_model",
                               (static_cast<uint64_t>(rep_index) << 8) | mi);

        const GridSearchOutcome gs = grid_search(rows, rep_subset, scaler, grid, cfg, n_folds);
        ModelConfig best = grid.points[gs.best_index].apply(cfg);

        Batch train_b = make_batch(rows, train_all, scaler, best.task);
        const Batch test_b = make_batch(rows, test_all, scaler, best.task);
        if (best.task != TaskMode::regression && best.focal_alpha.empty()) {
            best.focal_alpha = inverse_frequency_alpha(train_b, best);
        }
        MTMLNetwork net(best);
        train(net, train_b);

        const auto heads = net.forward(test_b.features, test_b.roles);
        for (size_t l = 0; l < best.n_labels(); ++l) {
            const size_t col = best.label_column(l);
            result.has_label[col] = true;
            result.grid_choice[col] = gs.best_index;
            if (task == TaskMode::regression) {
                std::vector<double> y_true, y_pred;
                for (size_t r = 0; r < test_b.size(); ++r) {
                    y_true.push_back(test_b.reg_targets.at(r, col) * 100.0);
                    y_pred.push_back(heads[l].at(r, 0) * 100.0);
                }
                result.metric[col] = mae(y_true, y_pred);
            } else {
                std::vector<int> y_true, y_pred;
                for (size_t r = 0; r < test_b.size(); ++r) {
                    y_true.push_back(test_b.cls_targets[r][col]);
                    const auto* row_logits = heads[l].row(r);
                    int best_c = 0;
                    for (size_t c = 1; c < heads[l].cols; ++c) {
                        if (row_logits[c] > row_logits[static_cast<size_t>(best_c)]) {
                            best_c = static_cast<int>(c);
                        }
                    }
                    y_pred.push_back(best_c);
                }
                const F1Result f1 = f1_score(y_true, y_pred, static_cast<int>(best.head_dim()));
                result.metric[col] = f1.macro_f1;
                for (size_t c = 0; c < f1.precision.size() && c < 3; ++c) {
                    result.precision[col][c] = f1.precision[c];
                    result.recall[col][c] = f1.recall[c];
                    result.f1[col][c] = f1.f1[c];
                }
            }
        }
    }
    return result;
}

// baseline predictors: training-mean (regression) and training-majority
// (classification)
inline RepResult run_baseline(const std::vector<LabeledRow>& rows, const SplitRepetition& rep,
                              TaskMode task) {
    RepResult result;
    for (size_t col = 0; col < 5; ++col) {
        result.has_label[col] = true;
        if (task == TaskMode::regression) {
            double m = 0.0;
            for (size_t i : rep.train_idx) m += rows[i].next_labels[col];
            m /= static_cast<double>(rep.train_idx.size());
            std::vector<double> y_true, y_pred;
            for (size_t i : rep.test_idx) {
                y_true.push_back(rows[i].next_labels[col]);
                y_pred.push_back(m);
            }
            result.metric[col] = mae(y_true, y_pred);
        } else {
            const int k = task == TaskMode::binary ? 2 : 3;
            std::vector<int> counts(static_cast<size_t>(k), 0);
            for (size_t i : rep.train_idx) {
                ++counts[static_cast<size_t>(discretize(rows[i].next_labels[col], view_for(task)))];
            }
            const int majority = static_cast<int>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
            std::vector<int> y_true, y_pred;
            for (size_t i : rep.test_idx) {
                y_true.push_back(discretize(rows[i].next_labels[col], view_for(task)));
                y_pred.push_back(majority);
            }
            const F1Result f1 = f1_score(y_true, y_pred, k);
            result.metric[col] = f1.macro_f1;
            for (size_t c = 0; c < f1.precision.size() && c < 3; ++c) {
                result.precision[col][c] = f1.precision[c];
                result.recall[col][c] = f1.recall[c];
                result.f1[col][c] = f1.f1[c];
            }
        }
    }
    return result;
}

template <typename Fn>
inline void parallel_for(size_t n, unsigned threads, Fn fn) {
    if (threads <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

struct ExperimentOptions {
    int n_repetitions = 10;
    int n_folds = 10;
    unsigned threads = std::thread::hardware_concurrency();
    bool participant_level_split = false;
    bool include_baselines = true;
};

inline ExperimentReport run_experiment(const std::vector<DailyFeatureVector>& features,
                                       const std::map<std::pair<std::string, int32_t>,
                                                      WellbeingLabels>& labels,
                                       const std::vector<std::string>& variant_tokens,
                                       const std::vector<TaskMode>& tasks, const GridSpec& grid,
                                       uint64_t seed, const ModelConfig& base_template = {},
                                       const ExperimentOptions& options = {}) {
    const std::vector<LabeledRow> rows = build_labeled_rows(features, labels);
    if (rows.size() < 20) throw TooSmall("only " + std::to_string(rows.size()) + " labeled rows");

    std::vector<VariantToken> variants;
    for (const auto& tok : variant_tokens) variants.push_back(VariantToken::parse(tok));
    const bool needs_both_roles = std::any_of(variants.begin(), variants.end(), [](const auto& v) {
        return v.variant == Variant::mtml || v.variant == Variant::mt;
    });
    if (needs_both_roles) {
        bool nurse = false, doctor = false;
        for (const auto& r : rows) (r.features->role == Role::nurse ? nurse : doctor) = true;
        if (!nurse || !doctor) throw SingleGroup("role-branched variants need both roles present");
    }

    std::vector<std::string> participant_of;
    if (options.participant_level_split) {
        for (const auto& r : rows) participant_of.push_back(r.features->participant_id);
    }
    const SplitPlan plan =
        make_split_plan(rows.size(), seed, options.n_repetitions, options.n_folds,
                        options.participant_level_split ? &participant_of : nullptr);

    // work units: (variant, task, repetition)
    struct Cell {
        size_t variant_i, task_i;
        int rep;
    };
    std::vector<Cell> cells;
    for (size_t v = 0; v < variants.size(); ++v) {
        for (size_t t = 0; t < tasks.size(); ++t) {
            for (int rep = 0; rep < options.n_repetitions; ++rep) cells.push_back({v, t, rep});
        }
    }
    std::vector<detail::RepResult> cell_results(cells.size());
    detail::parallel_for(cells.size(), options.threads, [&](size_t ci) {
        const Cell& c = cells[ci];
        cell_results[ci] = detail::run_one_cell(rows, plan.repetitions[static_cast<size_t>(c.rep)],
                                                variants[c.variant_i], tasks[c.task_i], grid,
                                                base_template, seed, c.rep, options.n_folds);
    });

    ExperimentReport report;
    auto aggregate = [&](const std::string& name, TaskMode task, bool baseline,
                         const std::vector<const detail::RepResult*>& reps) {
        for (size_t col = 0; col < 5; ++col) {
            MetricRow row;
            row.variant = name;
            row.task = task;
            row.label = kLabelNames[col];
            row.metric_name = task == TaskMode::regression ? "mae" : "macro_f1";
            row.baseline = baseline;
            row.n_classes = task == TaskMode::regression ? 0 : (task == TaskMode::binary ? 2 : 3);
            bool any = false;
            for (const auto* rr : reps) {
                if (!rr->has_label[col]) continue;
                any = true;
                row.per_rep.push_back(rr->metric[col]);
                for (size_t c = 0; c < 3; ++c) {
                    row.precision_mean[c] += rr->precision[col][c];
                    row.recall_mean[c] += rr->recall[col][c];
                    row.f1_mean[c] += rr->f1[col][c];
                }
            }
            if (!any) continue;
            const double n = static_cast<double>(row.per_rep.size());
            row.mean = mean_of(row.per_rep);
            row.sd = sample_sd(row.per_rep);
            for (size_t c = 0; c < 3; ++c) {
                row.precision_mean[c] /= n;
                row.recall_mean[c] /= n;
                row.f1_mean[c] /= n;
            }
            report.rows.push_back(std::move(row));
        }
    };

    for (size_t v = 0; v < variants.size(); ++v) {
        for (size_t t = 0; t < tasks.size(); ++t) {
            std::vector<const detail::RepResult*> reps;
            for (size_t ci = 0; ci < cells.size(); ++ci) {
                if (cells[ci].variant_i == v && cells[ci].task_i == t) {
                    reps.push_back(&cell_results[ci]);
                }
            }
            aggregate(variants[v].name, tasks[t], false, reps);
            for (size_t ci = 0; ci < cells.size(); ++ci) {
                if (cells[ci].variant_i != v || cells[ci].task_i != t) continue;
                const auto& rr = cell_results[ci];
                for (size_t col = 0; col < 5; ++col) {
                    if (!rr.has_label[col]) continue;
                    report.rep_log.push_back({cells[ci].rep, variants[v].name, tasks[t],
                                              kLabelNames[col], rr.metric[col],
                                              rr.grid_choice[col],
                                              plan.repetitions[static_cast<size_t>(cells[ci].rep)].seed});
                }
            }
        }
    }

    if (options.include_baselines) {
        for (size_t t = 0; t < tasks.size(); ++t) {
            std::vector<detail::RepResult> base_reps;
            for (int rep = 0; rep < options.n_repetitions; ++rep) {
                base_reps.push_back(detail::run_baseline(
                    rows, plan.repetitions[static_cast<size_t>(rep)], tasks[t]));
            }
            std::vector<const detail::RepResult*> ptrs;
            for (const auto& r : base_reps) ptrs.push_back(&r);
            aggregate(tasks[t] == TaskMode::regression ? "baseline_mean" : "baseline_majority",
                      tasks[t], true, ptrs);
        }
    }

    // cross-variant significance per (task, label)
    if (variants.size() >= 3) {
        for (size_t t = 0; t < tasks.size(); ++t) {
            for (size_t col = 0; col < 5; ++col) {
                std::vector<GroupSample> groups;
                for (const auto& row : report.rows) {
                    if (row.baseline || row.task != tasks[t] || row.label != kLabelNames[col]) continue;
                    if (row.per_rep.size() >= 2) groups.push_back({row.variant, row.per_rep});
                }
                if (groups.size() < 3) continue;
                try {
                    const AnovaTukeyResult ar = anova_tukey(groups);
                    for (size_t i = 0; i < groups.size(); ++i) {
                        for (size_t j = i + 1; j < groups.size(); ++j) {
                            report.significance.push_back(
                                {tasks[t], kLabelNames[col],
                                 tasks[t] == TaskMode::regression ? "mae" : "macro_f1",
                                 ar.f_statistic, ar.p_value, groups[i].label, groups[j].label,
                                 ar.pairwise_p[i][j]});
                        }
                    }
                } catch (const DegenerateGroups&) {
                }
            }
        }
    }

    return report;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline CsvTable metrics_to_csv(const ExperimentReport& report) {
    CsvTable t;
    t.header = {"variant", "task", "label", "metric", "mean", "sd", "baseline"};
    for (int c = 0; c < 3; ++c) {
        t.header.push_back("precision_" + std::to_string(c));
        t.header.push_back("recall_" + std::to_string(c));
        t.header.push_back("f1_" + std::to_string(c));
    }
    for (const auto& row : report.rows) {
        std::vector<std::string> r = {row.variant,  to_string(row.task),
                                      row.label,    row.metric_name,
                                      format_double(row.mean), format_double(row.sd),
                                      row.baseline ? "1" : "0"};
        for (size_t c = 0; c < 3; ++c) {
            if (c < row.n_classes) {
                r.push_back(format_double(row.precision_mean[c]));
                r.push_back(format_double(row.recall_mean[c]));
                r.push_back(format_double(row.f1_mean[c]));
            } else {
                r.push_back("");
                r.push_back("");
                r.push_back("");
            }
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline CsvTable significance_to_csv(const ExperimentReport& report) {
    CsvTable t;
    t.header = {"task", "label", "metric", "anova_f", "anova_p",
                "variant_a", "variant_b", "tukey_p", "significant_0p05"};
    for (const auto& s : report.significance) {
        t.rows.push_back({to_string(s.task), s.label, s.metric_name, format_double(s.anova_f),
                          format_double(s.anova_p), s.variant_a, s.variant_b,
                          format_double(s.tukey_p), s.tukey_p < 0.05 ? "1" : "0"});
    }
    return t;
}

inline CsvTable rep_log_to_csv(const ExperimentReport& report) {
    CsvTable t;
    t.header = {"repetition", "variant", "task", "label", "metric", "grid_choice", "split_seed"};
    for (const auto& e : report.rep_log) {
        t.rows.push_back({std::to_string(e.repetition), e.variant, to_string(e.task), e.label,
                          format_double(e.metric), std::to_string(e.grid_choice),
                          std::to_string(e.split_seed)});
    }
    return t;
}

}  // namespace wellbeing
