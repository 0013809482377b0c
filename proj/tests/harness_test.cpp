#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "wellbeing/core.hpp"
#include "wellbeing/harness.hpp"

using namespace wellbeing;

// --- discretization -----------------------------------------------------------

TEST(Discretize, BinaryBoundaries) {
    EXPECT_EQ(discretize(50.0, LabelView::binary), 0);
    EXPECT_EQ(discretize(51.0, LabelView::binary), 1);
    EXPECT_EQ(discretize(0.0, LabelView::binary), 0);
    EXPECT_EQ(discretize(100.0, LabelView::binary), 1);
}

TEST(Discretize, ThreeClassBoundaries) {
    EXPECT_EQ(discretize(33.0, LabelView::three_class), 0);
    EXPECT_EQ(discretize(34.0, LabelView::three_class), 1);
    EXPECT_EQ(discretize(66.0, LabelView::three_class), 1);
    EXPECT_EQ(discretize(67.0, LabelView::three_class), 2);
    EXPECT_EQ(discretize(0.0, LabelView::three_class), 0);
    EXPECT_EQ(discretize(100.0, LabelView::three_class), 2);
}

TEST(Discretize, OutOfRangeThrows) {
    EXPECT_THROW(discretize(-0.5, LabelView::binary), OutOfRange);
    EXPECT_THROW(discretize(100.5, LabelView::three_class), OutOfRange);
    EXPECT_THROW(discretize(std::nan(""), LabelView::binary), OutOfRange);
}

TEST(Discretize, TotalAndStable) {
    for (double v = 0.0; v <= 100.0; v += 0.25) {
        for (const LabelView view : {LabelView::binary, LabelView::three_class}) {
            const int c = discretize(v, view);
            EXPECT_GE(c, 0);
            EXPECT_LT(c, view == LabelView::binary ? 2 : 3);
            EXPECT_EQ(discretize(v, view), c);  // repeated application agrees
        }
    }
}

// --- split plan ----------------------------------------------------------------

TEST(SplitPlan, SizesAndDisjointness) {
    const SplitPlan plan = make_split_plan(100, 42);
    ASSERT_EQ(plan.repetitions.size(), 10u);
    for (const auto& rep : plan.repetitions) {
        EXPECT_EQ(rep.test_idx.size(), 20u);
        EXPECT_EQ(rep.train_idx.size(), 80u);
        std::set<size_t> all(rep.train_idx.begin(), rep.train_idx.end());
        for (size_t i : rep.test_idx) {
            EXPECT_TRUE(all.insert(i).second);  // no overlap
        }
        EXPECT_EQ(all.size(), 100u);  // full cover
    }
}

TEST(SplitPlan, DeterministicAndSeedSensitive) {
    const SplitPlan a = make_split_plan(57, 7);
    const SplitPlan b = make_split_plan(57, 7);
    const SplitPlan c = make_split_plan(57, 8);
    for (size_t r = 0; r < a.repetitions.size(); ++r) {
        EXPECT_EQ(a.repetitions[r].test_idx, b.repetitions[r].test_idx);
        EXPECT_EQ(a.repetitions[r].fold_of, b.repetitions[r].fold_of);
    }
    EXPECT_NE(a.repetitions[0].test_idx, c.repetitions[0].test_idx);
}

TEST(SplitPlan, UnionDisjointAcrossSeeds) {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const SplitPlan plan = make_split_plan(83, seed, 3);
        for (const auto& rep : plan.repetitions) {
            std::set<size_t> train(rep.train_idx.begin(), rep.train_idx.end());
            std::set<size_t> test(rep.test_idx.begin(), rep.test_idx.end());
            std::vector<size_t> overlap;
            std::set_intersection(train.begin(), train.end(), test.begin(), test.end(),
                                  std::back_inserter(overlap));
            EXPECT_TRUE(overlap.empty());
            EXPECT_EQ(train.size() + test.size(), 83u);
            // folds partition the training set
            std::array<int, 10> fold_counts{};
            for (int f : rep.fold_of) {
                ASSERT_GE(f, 0);
                ASSERT_LT(f, 10);
                ++fold_counts[static_cast<size_t>(f)];
            }
            int total = 0;
            for (int c : fold_counts) total += c;
            EXPECT_EQ(total, static_cast<int>(rep.train_idx.size()));
        }
    }
}

TEST(SplitPlan, TooSmallThrows) { EXPECT_THROW(make_split_plan(19, 0), TooSmall); }

TEST(SplitPlan, ParticipantLevelKeepsParticipantsTogether) {
    std::vector<std::string> pids;
    for (int p = 0; p < 10; ++p) {
        for (int d = 0; d < 10; ++d) pids.push_back("P" + std::to_string(p));
    }
    const SplitPlan plan = make_split_plan(pids.size(), 3, 5, 10, &pids);
    for (const auto& rep : plan.repetitions) {
        std::set<std::string> test_pids, train_pids;
        for (size_t i : rep.test_idx) test_pids.insert(pids[i]);
        for (size_t i : rep.train_idx) train_pids.insert(pids[i]);
        for (const auto& p : test_pids) EXPECT_EQ(train_pids.count(p), 0u);
    }
}

// --- metrics ---------------------------------------------------------------------

TEST(F1, PerfectPredictions) {
    const F1Result r = f1_score({0, 1, 2, 0, 1, 2}, {0, 1, 2, 0, 1, 2}, 3);
    EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
    for (int c = 0; c < 3; ++c) {
        EXPECT_DOUBLE_EQ(r.precision[static_cast<size_t>(c)], 1.0);
        EXPECT_DOUBLE_EQ(r.recall[static_cast<size_t>(c)], 1.0);
    }
}

TEST(F1, AllPredictedZeroFixture) {
    // class 0: tp=2 fp=2 fn=0 -> precision 1/2, recall 1, f1 2/3
    // class 1: never predicted -> all zero
    const F1Result r = f1_score({0, 0, 1, 1}, {0, 0, 0, 0}, 2);
    EXPECT_DOUBLE_EQ(r.precision[0], 0.5);
    EXPECT_DOUBLE_EQ(r.recall[0], 1.0);
    EXPECT_NEAR(r.f1[0], 2.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(r.f1[1], 0.0);
    EXPECT_DOUBLE_EQ(r.precision[1], 0.0);
    EXPECT_DOUBLE_EQ(r.recall[1], 0.0);
    EXPECT_NEAR(r.macro_f1, 1.0 / 3.0, 1e-15);
}

TEST(F1, SingleClassEverything) {
    const F1Result r = f1_score({0, 0, 0}, {0, 0, 0}, 1);
    EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
}

TEST(F1, RandomPredictorOnBalancedBinaryNearHalf) {
    Rng rng(77);
    std::vector<int> y_true(10000), y_pred(10000);
    for (size_t i = 0; i < y_true.size(); ++i) {
        y_true[i] = static_cast<int>(i % 2);  // balanced
        y_pred[i] = static_cast<int>(rng.below(2));
    }
    const F1Result r = f1_score(y_true, y_pred, 2);
    EXPECT_NEAR(r.macro_f1, 0.5, 0.05);
}

TEST(Mae, KnownValues) {
    EXPECT_DOUBLE_EQ(mae({1, 2, 3}, {1, 2, 3}), 0.0);
    EXPECT_DOUBLE_EQ(mae({10, 20, 30}, {15, 25, 35}), 5.0);
    Rng rng(78);
    std::vector<double> a(40), b(40);
    double expected = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform(0, 100);
        b[i] = rng.uniform(0, 100);
        expected += std::fabs(a[i] - b[i]);
    }
    EXPECT_NEAR(mae(a, b), expected / 40.0, 1e-12);
    EXPECT_THROW(mae({1, 2}, {1}), ShapeMismatch);
}

// --- labeled rows + scaler ---------------------------------------------------------

namespace {

std::vector<DailyFeatureVector> synthetic_features(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<DailyFeatureVector> rows;
    const Date start = Date::from_civil(2024, 1, 1);
    for (size_t i = 0; i < n; ++i) {
        DailyFeatureVector fv;
        fv.participant_id = i % 3 == 0 ? "D1" : "N" + std::to_string(i % 4);
        fv.date = start + static_cast<int>(i);
        fv.role = i % 3 == 0 ? Role::doctor : Role::nurse;
        for (size_t f = 0; f < FeatureSchema::size; ++f) fv.set(f, rng.normal());
        if (i % 5 == 0) fv.missing[feat::hr_sampen] = true;
        rows.push_back(std::move(fv));
    }
    return rows;
}

std::map<std::pair<std::string, int32_t>, WellbeingLabels> synthetic_labels(
    const std::vector<DailyFeatureVector>& features, uint64_t seed) {
    Rng rng(seed);
    std::map<std::pair<std::string, int32_t>, WellbeingLabels> labels;
    for (const auto& fv : features) {
        WellbeingLabels lab;
        lab.participant_id = fv.participant_id;
        lab.date = fv.date + 1;
        for (size_t l = 0; l < 5; ++l) {
            lab.values[l] = std::clamp(50.0 + 10.0 * fv.values[feat::hr_mean] + 5.0 * rng.normal(),
                                       0.0, 100.0);
        }
        labels[{lab.participant_id, lab.date.serial}] = lab;
    }
    return labels;
}

}  // namespace

TEST(LabeledRows, NextDayJoin) {
    const auto features = synthetic_features(30, 1);
    auto labels = synthetic_labels(features, 2);
    const auto rows = build_labeled_rows(features, labels);
    EXPECT_EQ(rows.size(), features.size());  // every row has next-day labels

    // removing one label day drops exactly the rows pointing at it
    const auto key = std::make_pair(rows[0].features->participant_id,
                                    (rows[0].features->date + 1).serial);
    labels.erase(key);
    EXPECT_EQ(build_labeled_rows(features, labels).size(), features.size() - 1);
}

TEST(Scaler, ImputesAndStandardizes) {
    const auto features = synthetic_features(50, 3);
    std::vector<const DailyFeatureVector*> ptrs;
    for (const auto& fv : features) ptrs.push_back(&fv);
    const FeatureScaler scaler = FeatureScaler::fit(ptrs);

    // transformed training matrix has ~zero mean and unit sd per column
    std::vector<double> out(FeatureSchema::size);
    std::vector<double> sums(FeatureSchema::size, 0.0), sq(FeatureSchema::size, 0.0);
    for (const auto& fv : features) {
        scaler.apply(fv, out.data());
        for (size_t f = 0; f < FeatureSchema::size; ++f) {
            sums[f] += out[f];
            sq[f] += out[f] * out[f];
        }
    }
    for (size_t f = 0; f < FeatureSchema::size; ++f) {
        const double mean = sums[f] / static_cast<double>(features.size());
        const double var = sq[f] / static_cast<double>(features.size()) - mean * mean;
        EXPECT_NEAR(mean, 0.0, 1e-9);
        EXPECT_NEAR(var, 1.0, 1e-9);
    }
}

TEST(Scaler, LeakageBarrier) {
    // pipeline statistics recomputed from the training partition alone must
    // match the scaler the harness produced
    const auto features = synthetic_features(60, 4);
    const auto labels = synthetic_labels(features, 5);
    const auto rows = build_labeled_rows(features, labels);
    const SplitPlan plan = make_split_plan(rows.size(), 11, 1);
    const auto& rep = plan.repetitions[0];

    std::vector<const DailyFeatureVector*> train_ptrs;
    for (size_t i : rep.train_idx) train_ptrs.push_back(rows[i].features);
    const FeatureScaler a = FeatureScaler::fit(train_ptrs);
    const FeatureScaler b = FeatureScaler::fit(train_ptrs);
    for (size_t f = 0; f < FeatureSchema::size; ++f) {
        EXPECT_EQ(a.mean[f], b.mean[f]);
        EXPECT_EQ(a.sd[f], b.sd[f]);
        EXPECT_EQ(a.impute_mean[f], b.impute_mean[f]);
    }
}

// --- grid search ---------------------------------------------------------------------

TEST(GridSearch, SingleCandidateReturned) {
    const auto features = synthetic_features(40, 6);
    const auto labels = synthetic_labels(features, 7);
    const auto rows = build_labeled_rows(features, labels);
    const SplitPlan plan = make_split_plan(rows.size(), 13, 1, 4);

    std::vector<const DailyFeatureVector*> train_ptrs;
    for (size_t i : plan.repetitions[0].train_idx) train_ptrs.push_back(rows[i].features);
    const FeatureScaler scaler = FeatureScaler::fit(train_ptrs);

    ModelConfig base;
    base.variant = Variant::nn;
    base.task = TaskMode::regression;
    base.epochs = 30;
    base.shared_widths = {8};
    base.branch_width = 4;
    const GridSpec grid = GridSpec::single_default();
    const GridSearchOutcome out =
        grid_search(rows, plan.repetitions[0], scaler, grid, base, 4);
    EXPECT_EQ(out.best_index, 0u);
    EXPECT_EQ(out.scores.size(), 1u);
}

TEST(GridSearch, RejectsDegenerateLearningRate) {
    const auto features = synthetic_features(60, 8);
    const auto labels = synthetic_labels(features, 9);
    const auto rows = build_labeled_rows(features, labels);
    const SplitPlan plan = make_split_plan(rows.size(), 17, 1, 5);

    std::vector<const DailyFeatureVector*> train_ptrs;
    for (size_t i : plan.repetitions[0].train_idx) train_ptrs.push_back(rows[i].features);
    const FeatureScaler scaler = FeatureScaler::fit(train_ptrs);

    ModelConfig base;
    base.variant = Variant::nn;
    base.task = TaskMode::regression;
    base.epochs = 60;
    base.shared_widths = {8};
    base.branch_width = 4;

    GridSpec grid;
    GridPoint degenerate;
    degenerate.learning_rate = 1e-15;  // effectively never learns
    GridPoint sane;
    sane.learning_rate = 0.005;
    grid.points = {degenerate, sane};

    const GridSearchOutcome out = grid_search(rows, plan.repetitions[0], scaler, grid, base, 5);
    EXPECT_EQ(out.best_index, 1u);
}

TEST(GridSearch, TieBreaksToFirst) {
    const auto features = synthetic_features(40, 10);
    const auto labels = synthetic_labels(features, 11);
    const auto rows = build_labeled_rows(features, labels);
    const SplitPlan plan = make_split_plan(rows.size(), 19, 1, 4);

    std::vector<const DailyFeatureVector*> train_ptrs;
    for (size_t i : plan.repetitions[0].train_idx) train_ptrs.push_back(rows[i].features);
    const FeatureScaler scaler = FeatureScaler::fit(train_ptrs);

    ModelConfig base;
    base.variant = Variant::nn;
    base.task = TaskMode::regression;
    base.epochs = 25;
    base.shared_widths = {8};
    base.branch_width = 4;

    GridSpec grid;
    grid.points = {GridPoint{}, GridPoint{}};  // identical duplicates
    const GridSearchOutcome out = grid_search(rows, plan.repetitions[0], scaler, grid, base, 4);
    EXPECT_EQ(out.best_index, 0u);
    EXPECT_EQ(out.scores[0], out.scores[1]);
}

// --- run_experiment structure ----------------------------------------------------------

TEST(RunExperiment, ReportShapeAndLogs) {
    const auto features = synthetic_features(60, 12);
    const auto labels = synthetic_labels(features, 13);

    ModelConfig base;
    base.epochs = 20;
    base.shared_widths = {8};
    base.branch_width = 4;
    ExperimentOptions options;
    options.n_repetitions = 2;
    options.n_folds = 4;
    options.threads = 2;

    const ExperimentReport report =
        run_experiment(features, labels, {"mtml", "nn"}, {TaskMode::regression, TaskMode::binary},
                       GridSpec::single_default(), 5, base, options);

    size_t model_rows = 0, baseline_rows = 0;
    for (const auto& row : report.rows) {
        (row.baseline ? baseline_rows : model_rows) += 1;
        EXPECT_EQ(row.per_rep.size(), 2u);
        if (row.metric_name == "macro_f1") {
            EXPECT_GE(row.mean, 0.0);
            EXPECT_LE(row.mean, 1.0);
        } else {
            EXPECT_GE(row.mean, 0.0);
        }
        EXPECT_GE(row.sd, 0.0);
    }
    EXPECT_EQ(model_rows, 2u * 2u * 5u);     // variants x tasks x labels
    EXPECT_EQ(baseline_rows, 2u * 5u);       // one floor per task per label
    EXPECT_EQ(report.rep_log.size(), 2u * 2u * 5u * 2u);  // ... x repetitions
}

TEST(RunExperiment, MlSubsetVariantsRestrictRoles) {
    const auto features = synthetic_features(80, 14);
    const auto labels = synthetic_labels(features, 15);

    ModelConfig base;
    base.epochs = 15;
    base.shared_widths = {8};
    base.branch_width = 4;
    ExperimentOptions options;
    options.n_repetitions = 2;
    options.n_folds = 4;
    options.include_baselines = false;

    const ExperimentReport report = run_experiment(
        features, labels, {"ml_n"}, {TaskMode::regression}, GridSpec::single_default(), 5, base,
        options);
    EXPECT_EQ(report.rows.size(), 5u);
    for (const auto& row : report.rows) EXPECT_EQ(row.variant, "ml_n");
}

TEST(RunExperiment, GridFileParsing) {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "wb_grid_test.json";
    atomic_write_text(path, R"({"grid": [
        {"learning_rate": 0.005, "branch_width": 16},
        {"learning_rate": 0.002, "epochs": 120, "shared_widths": [32, 16], "focal_gamma": 2.0}
    ]})");
    const GridSpec grid = load_grid(path);
    std::filesystem::remove(path);
    ASSERT_EQ(grid.points.size(), 2u);
    EXPECT_EQ(*grid.points[0].learning_rate, 0.005);
    EXPECT_EQ(*grid.points[0].branch_width, 16u);
    EXPECT_FALSE(grid.points[0].epochs.has_value());
    EXPECT_EQ(*grid.points[1].epochs, 120u);
    EXPECT_EQ(grid.points[1].shared_widths->size(), 2u);
    EXPECT_EQ(*grid.points[1].focal_gamma, 2.0);
}
