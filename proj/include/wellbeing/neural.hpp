#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wellbeing/core.hpp"

namespace wellbeing {

// ---------------------------------------------------------------------------
// Dense row-major 2-D tensor. Everything is double; the models here are tiny
// and gradient-check fidelity matters more than speed.
// ---------------------------------------------------------------------------

struct Tensor2D {
    size_t rows = 0, cols = 0;
    std::vector<double> data;

    Tensor2D() = default;
    Tensor2D(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
    double* row(size_t r) { return data.data() + r * cols; }
    const double* row(size_t r) const { return data.data() + r * cols; }

    void ensure_finite(const char* where) const {
        for (double v : data) {
            if (!std::isfinite(v)) throw DivergenceDetected(std::string("non-finite value in ") + where);
        }
    }
};

enum class Activation { relu, identity };

// Parameter block handle used for optimizer updates and gradient checks.
// Iteration order over a network's blocks is fixed, so runs are reproducible.
struct ParamView {
    std::string name;
    std::vector<double>* values = nullptr;
    std::vector<double>* grads = nullptr;
};

// ---------------------------------------------------------------------------
// Layers. forward() is const and optionally fills a caller-owned cache;
// backward() consumes that cache and accumulates parameter gradients.
// ---------------------------------------------------------------------------

struct LayerCache {
    Tensor2D input;
    Tensor2D pre;  // pre-activation
};

// Row-wise 1-D convolution: each kernel spans the whole input row, producing
// one output channel per kernel. With kernel length equal to the input width
// there is a single valid position per row.
class Conv1DLayer {
public:
    Conv1DLayer() = default;
    Conv1DLayer(size_t channels, size_t width)
        : channels_(channels), width_(width), kernels_(channels * width, 0.0),
          bias_(channels, 0.0), grad_kernels_(channels * width, 0.0), grad_bias_(channels, 0.0) {}

    void init_he_uniform(Rng& rng) {
        const double limit = std::sqrt(6.0 / static_cast<double>(width_));
        for (auto& w : kernels_) w = rng.uniform(-limit, limit);
        for (auto& b : bias_) b = 0.0;
    }

    size_t channels() const { return channels_; }
    size_t width() const { return width_; }
    const std::vector<double>& kernels() const { return kernels_; }
    std::vector<double>& kernels() { return kernels_; }
    std::vector<double>& bias() { return bias_; }

    Tensor2D forward(const Tensor2D& x, LayerCache* cache = nullptr) const {
        if (x.cols != width_) {
            throw ShapeMismatch("conv1d expects width " + std::to_string(width_) + ", got " +
                                std::to_string(x.cols));
        }
        Tensor2D out(x.rows, channels_);
        for (size_t r = 0; r < x.rows; ++r) {
            const double* xr = x.row(r);
            for (size_t c = 0; c < channels_; ++c) {
                const double* k = kernels_.data() + c * width_;
                double acc = bias_[c];
                for (size_t j = 0; j < width_; ++j) acc += k[j] * xr[j];
                out.at(r, c) = acc;
            }
        }
        out.ensure_finite("conv1d");
        if (cache) {
            cache->input = x;
            cache->pre = out;
        }
        for (auto& v : out.data) v = v > 0.0 ? v : 0.0;  // ReLU
        return out;
    }

    Tensor2D backward(const LayerCache& cache, const Tensor2D& dout) {
        Tensor2D dx(cache.input.rows, width_);
        for (size_t r = 0; r < cache.input.rows; ++r) {
            const double* xr = cache.input.row(r);
            for (size_t c = 0; c < channels_; ++c) {
                const double dpre = cache.pre.at(r, c) > 0.0 ? dout.at(r, c) : 0.0;
                if (dpre == 0.0) continue;
                double* gk = grad_kernels_.data() + c * width_;
                const double* k = kernels_.data() + c * width_;
                for (size_t j = 0; j < width_; ++j) {
                    gk[j] += dpre * xr[j];
                    dx.at(r, j) += dpre * k[j];
                }
                grad_bias_[c] += dpre;
            }
        }
        return dx;
    }

    void zero_grads() {
        std::fill(grad_kernels_.begin(), grad_kernels_.end(), 0.0);
        std::fill(grad_bias_.begin(), grad_bias_.end(), 0.0);
    }

    void collect_params(const std::string& prefix, std::vector<ParamView>& out) {
        out.push_back({prefix + ".kernels", &kernels_, &grad_kernels_});
        out.push_back({prefix + ".bias", &bias_, &grad_bias_});
    }

private:
    size_t channels_ = 0, width_ = 0;
    std::vector<double> kernels_, bias_;
    std::vector<double> grad_kernels_, grad_bias_;
};

class DenseLayer {
public:
    DenseLayer() = default;
    DenseLayer(size_t in, size_t out, Activation act)
        : in_(in), out_(out), act_(act), weights_(in * out, 0.0), bias_(out, 0.0),
          grad_weights_(in * out, 0.0), grad_bias_(out, 0.0) {}

    void init(Rng& rng) {
        // He-uniform for ReLU layers, Xavier for linear heads
        const double limit = act_ == Activation::relu
                                 ? std::sqrt(6.0 / static_cast<double>(in_))
                                 : std::sqrt(6.0 / static_cast<double>(in_ + out_));
        for (auto& w : weights_) w = rng.uniform(-limit, limit);
        for (auto& b : bias_) b = 0.0;
    }

    size_t in_size() const { return in_; }
    size_t out_size() const { return out_; }
    Activation activation() const { return act_; }
    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }
    std::vector<double>& bias() { return bias_; }

    Tensor2D forward(const Tensor2D& x, LayerCache* cache = nullptr) const {
        if (x.cols != in_) {
            throw ShapeMismatch("dense expects width " + std::to_string(in_) + ", got " +
                                std::to_string(x.cols));
        }
        Tensor2D out(x.rows, out_);
        for (size_t r = 0; r < x.rows; ++r) {
            const double* xr = x.row(r);
            double* or_ = out.row(r);
            for (size_t o = 0; o < out_; ++o) or_[o] = bias_[o];
            for (size_t i = 0; i < in_; ++i) {
                const double xi = xr[i];
                if (xi == 0.0) continue;
                const double* w = weights_.data() + i * out_;
                for (size_t o = 0; o < out_; ++o) or_[o] += xi * w[o];
            }
        }
        out.ensure_finite("dense");
        if (cache) {
            cache->input = x;
            cache->pre = out;
        }
        if (act_ == Activation::relu) {
            for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
        }
        return out;
    }

    Tensor2D backward(const LayerCache& cache, const Tensor2D& dout) {
        Tensor2D dx(cache.input.rows, in_);
        for (size_t r = 0; r < cache.input.rows; ++r) {
            const double* xr = cache.input.row(r);
            double* dxr = dx.row(r);
            for (size_t o = 0; o < out_; ++o) {
                double dpre = dout.at(r, o);
                if (act_ == Activation::relu && cache.pre.at(r, o) <= 0.0) dpre = 0.0;
                if (dpre == 0.0) continue;
                grad_bias_[o] += dpre;
                for (size_t i = 0; i < in_; ++i) {
                    grad_weights_[i * out_ + o] += dpre * xr[i];
                    dxr[i] += dpre * weights_[i * out_ + o];
                }
            }
        }
        return dx;
    }

    void zero_grads() {
        std::fill(grad_weights_.begin(), grad_weights_.end(), 0.0);
        std::fill(grad_bias_.begin(), grad_bias_.end(), 0.0);
    }

    void collect_params(const std::string& prefix, std::vector<ParamView>& out) {
        out.push_back({prefix + ".weights", &weights_, &grad_weights_});
        out.push_back({prefix + ".bias", &bias_, &grad_bias_});
    }

private:
    size_t in_ = 0, out_ = 0;
    Activation act_ = Activation::identity;
    std::vector<double> weights_, bias_;
    std::vector<double> grad_weights_, grad_bias_;
};

// ---------------------------------------------------------------------------
// Losses. The mean-reduced forms are the module-level contract; the model's
// batch loss sums per-row terms instead (see model.hpp).
// ---------------------------------------------------------------------------

struct LossValue {
    double loss = 0.0;
    Tensor2D grad;  // d loss / d input
};

inline LossValue mse_loss(const Tensor2D& pred, const Tensor2D& target) {
    if (pred.rows != target.rows || pred.cols != target.cols) {
        throw ShapeMismatch("mse_loss shape mismatch");
    }
    LossValue out;
    out.grad = Tensor2D(pred.rows, pred.cols);
    const double n = static_cast<double>(pred.rows * pred.cols);
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        out.loss += d * d;
        out.grad.data[i] = 2.0 * d / n;
    }
    out.loss /= n;
    return out;
}

enum class TaskKind { regression, classification };

struct LossSpec {
    TaskKind task = TaskKind::regression;
    double focal_gamma = 0.0;
    std::vector<double> focal_alpha;  // per-class; empty means all ones

    double alpha_for(size_t cls) const {
        if (focal_alpha.empty()) return 1.0;
        return focal_alpha[cls];
    }

    void validate(size_t n_classes) const {
        if (focal_gamma < 0.0) throw Error("focal gamma must be >= 0");
        if (!focal_alpha.empty() && focal_alpha.size() != n_classes) {
            throw ShapeMismatch("focal alpha size must match class count");
        }
        for (double a : focal_alpha) {
            if (a <= 0.0) throw Error("focal alpha must be > 0");
        }
    }
};

namespace detail {

// per-row focal term and gradient wrt logits; returns the row loss
inline double focal_row(const double* logits, size_t k, size_t target, double gamma, double alpha,
                        double* grad_out) {
    double zmax = logits[0];
    for (size_t j = 1; j < k; ++j) zmax = std::max(zmax, logits[j]);
    double sum = 0.0;
    for (size_t j = 0; j < k; ++j) sum += std::exp(logits[j] - zmax);
    const double lse = zmax + std::log(sum);
    const double logp_t = logits[target] - lse;
    const double pt = std::exp(logp_t);
    const double one_minus = 1.0 - pt;

    double bracket, loss;
    if (gamma == 0.0) {
        bracket = 1.0;
        loss = -alpha * logp_t;
    } else {
        const double powg = std::pow(one_minus, gamma);
        const double powgm1 = gamma == 1.0 ? 1.0 : std::pow(one_minus, gamma - 1.0);
        bracket = powg - gamma * pt * powgm1 * logp_t;
        loss = -alpha * powg * logp_t;
    }
    if (grad_out) {
        for (size_t j = 0; j < k; ++j) {
            const double pj = std::exp(logits[j] - lse);
            const double delta = j == target ? 1.0 : 0.0;
            grad_out[j] = -alpha * (delta - pj) * bracket;
        }
    }
    return loss;
}

}  // namespace detail

// Mean over the batch of -alpha_t (1 - p_t)^gamma log p_t with p = softmax(logits).
inline LossValue focal_loss(const Tensor2D& logits, const std::vector<int>& class_targets,
                            const LossSpec& spec) {
    if (logits.rows != class_targets.size()) throw ShapeMismatch("focal_loss batch mismatch");
    spec.validate(logits.cols);
    LossValue out;
    out.grad = Tensor2D(logits.rows, logits.cols);
    const double n = static_cast<double>(logits.rows);
    std::vector<double> row_grad(logits.cols);
    for (size_t r = 0; r < logits.rows; ++r) {
        const int t = class_targets[r];
        if (t < 0 || static_cast<size_t>(t) >= logits.cols) {
            throw InvalidClass("class target " + std::to_string(t) + " outside [0," +
                               std::to_string(logits.cols) + ")");
        }
        out.loss += detail::focal_row(logits.row(r), logits.cols, static_cast<size_t>(t),
                                      spec.focal_gamma, spec.alpha_for(static_cast<size_t>(t)),
                                      row_grad.data());
        for (size_t j = 0; j < logits.cols; ++j) out.grad.at(r, j) = row_grad[j] / n;
    }
    out.loss /= n;
    return out;
}

inline std::vector<double> softmax_row(const double* logits, size_t k) {
    double zmax = logits[0];
    for (size_t j = 1; j < k; ++j) zmax = std::max(zmax, logits[j]);
    double sum = 0.0;
    std::vector<double> p(k);
    for (size_t j = 0; j < k; ++j) {
        p[j] = std::exp(logits[j] - zmax);
        sum += p[j];
    }
    for (auto& v : p) v /= sum;
    return p;
}

// ---------------------------------------------------------------------------
// Adam with bias correction
// ---------------------------------------------------------------------------

struct AdamState {
    double learning_rate = 0.005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int64_t step = 0;
    std::vector<std::vector<double>> m, v;  // aligned with the parameter block order
};

inline void adam_step(AdamState& state, std::vector<ParamView>& params) {
    if (state.m.empty()) {
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (size_t b = 0; b < params.size(); ++b) {
            state.m[b].assign(params[b].values->size(), 0.0);
            state.v[b].assign(params[b].values->size(), 0.0);
        }
    }
    if (state.m.size() != params.size()) throw ShapeMismatch("adam state/block count mismatch");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    for (size_t b = 0; b < params.size(); ++b) {
        auto& values = *params[b].values;
        const auto& grads = *params[b].grads;
        if (state.m[b].size() != values.size() || grads.size() != values.size()) {
            throw ShapeMismatch("adam block '" + params[b].name + "' size mismatch");
        }
        auto& m = state.m[b];
        auto& v = state.v[b];
        for (size_t i = 0; i < values.size(); ++i) {
            const double g = grads[i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            values[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check (central differences)
// ---------------------------------------------------------------------------

struct GradientCheckResult {
    double max_relative_error = 0.0;
    size_t checked = 0;
};

// `loss_fn` recomputes the scalar loss from the current parameter values;
// `analytic` are the gradients being verified, in block order matching
// `params`. Samples `n_samples` parameters (seeded) and perturbs each by
// +/- h.
template <typename LossFn>
GradientCheckResult gradient_check_params(std::vector<ParamView>& params,
                                          const std::vector<std::vector<double>>& analytic,
                                          LossFn&& loss_fn, size_t n_samples, uint64_t seed,
                                          double h = 1e-5) {
    size_t total = 0;
    for (const auto& p : params) total += p.values->size();
    Rng rng(derive_seed(seed, "gradient_check"));
    GradientCheckResult res;
    for (size_t s = 0; s < n_samples; ++s) {
        size_t flat = static_cast<size_t>(rng.below(total));
        size_t block = 0;
        while (flat >= params[block].values->size()) {
            flat -= params[block].values->size();
            ++block;
        }
        double& w = (*params[block].values)[flat];
        const double saved = w;
        w = saved + h;
        const double up = loss_fn();
        w = saved - h;
        const double down = loss_fn();
        w = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[block][flat];
        const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
        res.max_relative_error = std::max(res.max_relative_error, std::fabs(a - numeric) / denom);
        ++res.checked;
    }
    return res;
}

}  // namespace wellbeing
