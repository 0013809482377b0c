#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wellbeing/core.hpp"
#include "wellbeing/neural.hpp"

using namespace wellbeing;

namespace {

Tensor2D random_tensor(Rng& rng, size_t rows, size_t cols, double scale = 1.0) {
    Tensor2D t(rows, cols);
    for (auto& v : t.data) v = scale * rng.normal();
    return t;
}

}  // namespace

// --- conv1d -------------------------------------------------------------------

TEST(Conv1D, SelectorKernelPicksFeature) {
    Conv1DLayer conv(4, 6);
    conv.kernels()[2 * 6 + 3] = 1.0;  // channel 2 selects feature 3
    Tensor2D x(2, 6);
    x.at(0, 3) = 7.5;
    x.at(1, 3) = 2.25;
    const Tensor2D out = conv.forward(x);
    EXPECT_DOUBLE_EQ(out.at(0, 2), 7.5);
    EXPECT_DOUBLE_EQ(out.at(1, 2), 2.25);
    EXPECT_DOUBLE_EQ(out.at(0, 0), 0.0);
}

TEST(Conv1D, ZeroKernelsGiveReluBias) {
    Conv1DLayer conv(3, 5);
    conv.bias() = {2.0, -1.0, 0.5};
    Rng rng(1);
    const Tensor2D out = conv.forward(random_tensor(rng, 4, 5));
    for (size_t r = 0; r < 4; ++r) {
        EXPECT_DOUBLE_EQ(out.at(r, 0), 2.0);
        EXPECT_DOUBLE_EQ(out.at(r, 1), 0.0);  // relu clamps the negative bias
        EXPECT_DOUBLE_EQ(out.at(r, 2), 0.5);
    }
}

TEST(Conv1D, MatchesNaiveOracle) {
    Rng rng(2);
    Conv1DLayer conv(8, 13);
    conv.init_he_uniform(rng);
    for (auto& b : conv.bias()) b = 0.1 * rng.normal();
    const Tensor2D x = random_tensor(rng, 5, 13);
    const Tensor2D ours = conv.forward(x);
    const Tensor2D ref =
        oracle::conv_forward_naive(conv.kernels(), conv.bias(), 8, 13, x, true);
    for (size_t i = 0; i < ours.data.size(); ++i) EXPECT_NEAR(ours.data[i], ref.data[i], 1e-12);
}

TEST(Conv1D, ShapeMismatchThrows) {
    Conv1DLayer conv(4, 6);
    EXPECT_THROW(conv.forward(Tensor2D(2, 5)), ShapeMismatch);
}

// --- dense --------------------------------------------------------------------

TEST(Dense, IdentityPassThrough) {
    DenseLayer layer(3, 3, Activation::identity);
    for (size_t i = 0; i < 3; ++i) layer.weights()[i * 3 + i] = 1.0;
    Rng rng(3);
    const Tensor2D x = random_tensor(rng, 4, 3);
    const Tensor2D out = layer.forward(x);
    for (size_t i = 0; i < x.data.size(); ++i) EXPECT_DOUBLE_EQ(out.data[i], x.data[i]);
}

TEST(Dense, ReluZeroesNegativePreactivations) {
    DenseLayer layer(2, 2, Activation::relu);
    layer.weights() = {-1.0, -2.0, -3.0, -1.0};
    Tensor2D x(1, 2);
    x.at(0, 0) = 1.0;
    x.at(0, 1) = 1.0;
    const Tensor2D out = layer.forward(x);
    EXPECT_DOUBLE_EQ(out.at(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(out.at(0, 1), 0.0);
}

TEST(Dense, MatchesNaiveOracle) {
    Rng rng(4);
    DenseLayer layer(9, 7, Activation::relu);
    layer.init(rng);
    for (auto& b : layer.bias()) b = 0.2 * rng.normal();
    const Tensor2D x = random_tensor(rng, 6, 9);
    const Tensor2D ours = layer.forward(x);
    const Tensor2D ref = oracle::dense_forward_naive(layer.weights(), layer.bias(), 9, 7, x, true);
    for (size_t i = 0; i < ours.data.size(); ++i) EXPECT_NEAR(ours.data[i], ref.data[i], 1e-12);
}

// --- losses ----------------------------------------------------------------------

TEST(MseLoss, KnownValues) {
    Rng rng(5);
    const Tensor2D pred = random_tensor(rng, 3, 4);
    EXPECT_DOUBLE_EQ(mse_loss(pred, pred).loss, 0.0);

    Tensor2D target = pred;
    for (auto& v : target.data) v -= 1.0;
    EXPECT_DOUBLE_EQ(mse_loss(pred, target).loss, 1.0);
}

TEST(MseLoss, RandomCaseMatchesHandFormula) {
    Rng rng(6);
    const Tensor2D pred = random_tensor(rng, 4, 3);
    const Tensor2D target = random_tensor(rng, 4, 3);
    const LossValue lv = mse_loss(pred, target);
    double expected = 0.0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        expected += d * d;
    }
    expected /= static_cast<double>(pred.data.size());
    EXPECT_NEAR(lv.loss, expected, 1e-13);
    for (size_t i = 0; i < pred.data.size(); ++i) {
        EXPECT_NEAR(lv.grad.data[i],
                    2.0 * (pred.data[i] - target.data[i]) / static_cast<double>(pred.data.size()),
                    1e-13);
    }
}

TEST(MseLoss, ShapeMismatchThrows) {
    EXPECT_THROW(mse_loss(Tensor2D(2, 2), Tensor2D(2, 3)), ShapeMismatch);
}

TEST(FocalLoss, GammaZeroEqualsCrossEntropy) {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const size_t k = 2 + rng.below(2);
        const Tensor2D logits = random_tensor(rng, 8, k, 2.0);
        std::vector<int> targets(8);
        for (auto& t : targets) t = static_cast<int>(rng.below(k));
        const LossValue focal = focal_loss(logits, targets, {TaskKind::classification, 0.0, {}});
        const double ce = oracle::weighted_cross_entropy(logits, targets, {});
        EXPECT_NEAR(focal.loss, ce, 1e-12);
    }
}

TEST(FocalLoss, ClosedFormHalfProbability) {
    // two equal logits -> p_t = 0.5; gamma 2, alpha 1 -> 0.25 * ln 2
    Tensor2D logits(1, 2);
    logits.at(0, 0) = 1.3;
    logits.at(0, 1) = 1.3;
    const LossValue lv = focal_loss(logits, {0}, {TaskKind::classification, 2.0, {}});
    EXPECT_NEAR(lv.loss, 0.25 * std::log(2.0), 1e-10);
    EXPECT_NEAR(lv.loss, 0.17329, 1e-5);
}

TEST(FocalLoss, GradientMatchesFiniteDifferences) {
    Rng rng(8);
    for (double gamma : {0.0, 1.0, 2.0}) {
        Tensor2D logits = random_tensor(rng, 6, 3, 1.5);
        std::vector<int> targets(6);
        for (auto& t : targets) t = static_cast<int>(rng.below(3));
        LossSpec spec{TaskKind::classification, gamma, {0.7, 1.1, 1.2}};
        const LossValue lv = focal_loss(logits, targets, spec);
        const double h = 1e-5;
        for (size_t i = 0; i < logits.data.size(); ++i) {
            const double saved = logits.data[i];
            logits.data[i] = saved + h;
            const double up = focal_loss(logits, targets, spec).loss;
            logits.data[i] = saved - h;
            const double down = focal_loss(logits, targets, spec).loss;
            logits.data[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double denom = std::max({std::fabs(lv.grad.data[i]), std::fabs(numeric), 1e-8});
            EXPECT_LT(std::fabs(lv.grad.data[i] - numeric) / denom, 1e-5)
                << "gamma " << gamma << " index " << i;
        }
    }
}

TEST(FocalLoss, FocalNeverExceedsCrossEntropy) {
    Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const Tensor2D logits = random_tensor(rng, 5, 3, 2.0);
        std::vector<int> targets(5);
        for (auto& t : targets) t = static_cast<int>(rng.below(3));
        const double ce = focal_loss(logits, targets, {TaskKind::classification, 0.0, {}}).loss;
        for (double gamma : {0.5, 1.0, 2.0, 5.0}) {
            const double f = focal_loss(logits, targets, {TaskKind::classification, gamma, {}}).loss;
            EXPECT_LE(f, ce + 1e-12);
            EXPECT_GE(f, 0.0);
        }
        EXPECT_GE(ce, 0.0);
    }
}

TEST(FocalLoss, InvalidClassThrows) {
    Tensor2D logits(2, 3);
    EXPECT_THROW(focal_loss(logits, {0, 3}, {TaskKind::classification, 1.0, {}}), InvalidClass);
    EXPECT_THROW(focal_loss(logits, {-1, 0}, {TaskKind::classification, 1.0, {}}), InvalidClass);
}

TEST(Softmax, RowsSumToOne) {
    Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor2D logits = random_tensor(rng, 1, 3, 5.0);
        const auto p = softmax_row(logits.row(0), 3);
        EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
        for (double v : p) EXPECT_GT(v, 0.0);
    }
}

// --- Adam -----------------------------------------------------------------------------

namespace {

struct OneParam {
    std::vector<double> w, g;
    std::vector<ParamView> views() { return {{"w", &w, &g}}; }
};

}  // namespace

TEST(Adam, ZeroGradientLeavesParamsAndDecaysMoments) {
    OneParam p{{1.5}, {2.0}};
    AdamState state;
    auto views = p.views();
    adam_step(state, views);  // seed the moments with a nonzero gradient
    const double m_after_first = state.m[0][0];
    const double w_after_first = p.w[0];

    p.g[0] = 0.0;
    adam_step(state, views);
    EXPECT_DOUBLE_EQ(state.m[0][0], 0.9 * m_after_first);
    EXPECT_NE(p.w[0], w_after_first);  // decayed moment still moves the weight

    // fresh state + zero grad: no movement at all
    OneParam q{{3.0}, {0.0}};
    AdamState fresh;
    auto qviews = q.views();
    adam_step(fresh, qviews);
    EXPECT_DOUBLE_EQ(q.w[0], 3.0);
}

TEST(Adam, FirstStepIsSignedLearningRate) {
    for (double g : {0.5, -3.0, 100.0, -0.02}) {
        OneParam p{{0.0}, {g}};
        AdamState state;
        auto views = p.views();
        adam_step(state, views);
        const double expected = -state.learning_rate * (g > 0 ? 1.0 : -1.0);
        EXPECT_NEAR(p.w[0], expected, 1e-6 * state.learning_rate) << "g=" << g;
    }
}

TEST(Adam, TwoStepsMatchHandRecurrence) {
    const double g1 = 0.7, g2 = -0.3, lr = 0.005, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    OneParam p{{1.0}, {g1}};
    AdamState state;
    auto views = p.views();
    adam_step(state, views);
    p.g[0] = g2;
    adam_step(state, views);

    double w = 1.0, m = 0.0, v = 0.0;
    int t = 0;
    for (double g : {g1, g2}) {
        ++t;
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g * g;
        const double mhat = m / (1 - std::pow(b1, t));
        const double vhat = v / (1 - std::pow(b2, t));
        w -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    EXPECT_NEAR(p.w[0], w, 1e-12);
}

TEST(Adam, GradientRescalingBarelyChangesFirstStep) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const double g = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.01, 10.0);
        OneParam a{{0.0}, {g}}, b{{0.0}, {g * 1e3}};
        AdamState sa, sb;
        auto va = a.views(), vb = b.views();
        adam_step(sa, va);
        adam_step(sb, vb);
        EXPECT_LT(std::fabs(a.w[0] - b.w[0]) / std::fabs(a.w[0]), 1e-4);
    }
}

TEST(Adam, ShapeMismatchThrows) {
    OneParam p{{1.0, 2.0}, {0.1}};
    AdamState state;
    auto views = p.views();
    EXPECT_THROW(adam_step(state, views), ShapeMismatch);
}

// --- generic gradient check ------------------------------------------------------------

TEST(GradientCheck, ExactForLinearQuadratic) {
    // loss = sum_i (w_i - t_i)^2: analytic gradient 2(w - t), exact for
    // central differences up to rounding
    Rng rng(12);
    std::vector<double> w(20), t(20), g(20);
    for (size_t i = 0; i < w.size(); ++i) {
        w[i] = rng.normal();
        t[i] = rng.normal();
        g[i] = 2.0 * (w[i] - t[i]);
    }
    std::vector<ParamView> params = {{"w", &w, &g}};
    auto loss_fn = [&]() {
        double s = 0.0;
        for (size_t i = 0; i < w.size(); ++i) s += (w[i] - t[i]) * (w[i] - t[i]);
        return s;
    };
    const auto res = gradient_check_params(params, {g}, loss_fn, 20, 0);
    EXPECT_LT(res.max_relative_error, 1e-9);
}

TEST(GradientCheck, DetectsCorruptedGradients) {
    Rng rng(13);
    std::vector<double> w(10), t(10), g(10);
    for (size_t i = 0; i < w.size(); ++i) {
        w[i] = 1.0 + rng.uniform();
        t[i] = rng.normal();
        g[i] = 2.0 * (w[i] - t[i]) * 1.5;  // corrupted by 50%
    }
    std::vector<ParamView> params = {{"w", &w, &g}};
    auto loss_fn = [&]() {
        double s = 0.0;
        for (size_t i = 0; i < w.size(); ++i) s += (w[i] - t[i]) * (w[i] - t[i]);
        return s;
    };
    const auto res = gradient_check_params(params, {g}, loss_fn, 10, 0);
    EXPECT_GT(res.max_relative_error, 1e-2);
}
