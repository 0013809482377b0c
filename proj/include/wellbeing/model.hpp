#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"
#include "wellbeing/features.hpp"
#include "wellbeing/neural.hpp"

namespace wellbeing {

enum class TaskMode { regression, binary, three_class };
enum class Variant { mtml, mt, ml, nn };

inline std::string to_string(TaskMode t) {
    switch (t) {
        case TaskMode::regression: return "regression";
        case TaskMode::binary: return "binary";
        default: return "three_class";
    }
}

inline TaskMode task_mode_from_string(std::string_view s) {
    if (s == "regression") return TaskMode::regression;
    if (s == "binary") return TaskMode::binary;
    if (s == "three_class" || s == "three") return TaskMode::three_class;
    throw ConfigError("unknown task mode '" + std::string(s) + "'");
}

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::mtml: return "mtml";
        case Variant::mt: return "mt";
        case Variant::ml: return "ml";
        default: return "nn";
    }
}

inline Variant variant_from_string(std::string_view s) {
    if (s == "mtml") return Variant::mtml;
    if (s == "mt") return Variant::mt;
    if (s == "ml") return Variant::ml;
    if (s == "nn") return Variant::nn;
    throw InvalidVariant("unknown variant '" + std::string(s) + "'");
}

struct ModelConfig {
    size_t schema_size = FeatureSchema::size;
    size_t conv_channels = 32;  // fixed by the architecture
    std::vector<size_t> shared_widths = {64, 32};
    size_t branch_width = 16;
    Variant variant = Variant::mtml;
    TaskMode task = TaskMode::regression;
    double focal_gamma = 0.0;
    std::vector<double> focal_alpha;  // empty = uniform
    double learning_rate = 0.005;
    size_t epochs = 500;
    size_t batch_size = 16;
    size_t early_stop_patience = 50;  // epochs without validation improvement
    uint64_t seed = 0;
    int target_label = 0;  // label predicted by single-head variants

    size_t n_branches() const {
        return variant == Variant::mtml || variant == Variant::mt ? 2 : 1;
    }
    size_t n_labels() const {
        return variant == Variant::mtml || variant == Variant::ml ? 5 : 1;
    }
    size_t head_dim() const {
        switch (task) {
            case TaskMode::regression: return 1;
            case TaskMode::binary: return 2;
            default: return 3;
        }
    }
    // label column in the 5-wide target matrix for model label index l
    size_t label_column(size_t l) const {
        return n_labels() == 5 ? l : static_cast<size_t>(target_label);
    }
    std::string label_name(size_t l) const { return kLabelNames[label_column(l)]; }

    void validate() const {
        if (schema_size == 0 || conv_channels == 0 || branch_width == 0) {
            throw ConfigError("zero-sized layer in config");
        }
        if (shared_widths.empty()) throw ConfigError("need at least one shared layer");
        if (target_label < 0 || target_label > 4) throw ConfigError("target_label outside 0..4");
        if (learning_rate <= 0.0) throw ConfigError("learning rate must be > 0");
        if (batch_size == 0 || epochs == 0) throw ConfigError("epochs/batch_size must be > 0");
        LossSpec spec{TaskKind::classification, focal_gamma, focal_alpha};
        if (task != TaskMode::regression) spec.validate(head_dim());
    }
};

// Imputation + standardization fitted on training data only; stored with the
// model so prediction applies the exact same transform.
struct FeatureScaler {
    std::array<double, FeatureSchema::size> impute_mean{};
    std::array<double, FeatureSchema::size> mean{};
    std::array<double, FeatureSchema::size> sd{};

    static FeatureScaler fit(const std::vector<const DailyFeatureVector*>& rows) {
        FeatureScaler s;
        s.impute_mean.fill(0.0);
        for (size_t f = 0; f < FeatureSchema::size; ++f) {
            double sum = 0.0;
            size_t n = 0;
            for (const auto* fv : rows) {
                if (fv->missing[f]) continue;
                sum += fv->values[f];
                ++n;
            }
            // missing one-hot entries impute to zero, not to the mean
            if (n > 0 && !FeatureSchema::in_onehot_group(f)) {
                s.impute_mean[f] = sum / static_cast<double>(n);
            }
        }
        std::array<double, FeatureSchema::size> sum{}, sumsq{};
        sum.fill(0.0);
        sumsq.fill(0.0);
        for (const auto* fv : rows) {
            for (size_t f = 0; f < FeatureSchema::size; ++f) {
                const double v = fv->missing[f] ? s.impute_mean[f] : fv->values[f];
                sum[f] += v;
                sumsq[f] += v * v;
            }
        }
        const double n = static_cast<double>(rows.size());
        for (size_t f = 0; f < FeatureSchema::size; ++f) {
            s.mean[f] = sum[f] / n;
            const double var = std::max(0.0, sumsq[f] / n - s.mean[f] * s.mean[f]);
            s.sd[f] = std::sqrt(var);
        }
        return s;
    }

    void apply(const DailyFeatureVector& fv, double* out) const {
        for (size_t f = 0; f < FeatureSchema::size; ++f) {
            const double v = fv.missing[f] ? impute_mean[f] : fv.values[f];
            out[f] = sd[f] > 0.0 ? (v - mean[f]) / sd[f] : 0.0;
        }
    }
};

// One training/evaluation batch: rows of standardized features plus targets
// in both task encodings. Regression targets are on the internal [0,1] scale.
struct Batch {
    Tensor2D features;
    std::vector<Role> roles;
    Tensor2D reg_targets;                        // rows x 5
    std::vector<std::array<int, 5>> cls_targets;  // discretized
    bool imputed = true;

    size_t size() const { return features.rows; }

    Batch slice(const std::vector<size_t>& idx) const {
        Batch out;
        out.features = Tensor2D(idx.size(), features.cols);
        out.reg_targets = Tensor2D(idx.size(), reg_targets.cols);
        out.roles.reserve(idx.size());
        out.cls_targets.reserve(idx.size());
        out.imputed = imputed;
        for (size_t r = 0; r < idx.size(); ++r) {
            for (size_t c = 0; c < features.cols; ++c) out.at_features(r, c) = features.at(idx[r], c);
            for (size_t c = 0; c < reg_targets.cols; ++c) {
                out.reg_targets.at(r, c) = reg_targets.at(idx[r], c);
            }
            out.roles.push_back(roles[idx[r]]);
            out.cls_targets.push_back(cls_targets[idx[r]]);
        }
        return out;
    }

    double& at_features(size_t r, size_t c) { return features.at(r, c); }
};

// ---------------------------------------------------------------------------
// The network: conv feature extractor -> shared trunk -> role branches ->
// per-label heads. Structural variants differ only in branch and head counts.
// ---------------------------------------------------------------------------

class MTMLNetwork {
public:
    struct Branch {
        DenseLayer trunk;
        std::vector<DenseLayer> heads;
    };

    MTMLNetwork() = default;

    explicit MTMLNetwork(const ModelConfig& config) : config_(config) {
        config_.validate();
        conv_ = Conv1DLayer(config_.conv_channels, config_.schema_size);
        size_t width = config_.conv_channels;
        for (size_t w : config_.shared_widths) {
            shared_.emplace_back(width, w, Activation::relu);
            width = w;
        }
        branches_.resize(config_.n_branches());
        for (auto& b : branches_) {
            b.trunk = DenseLayer(width, config_.branch_width, Activation::relu);
            for (size_t l = 0; l < config_.n_labels(); ++l) {
                b.heads.emplace_back(config_.branch_width, config_.head_dim(), Activation::identity);
            }
        }
        Rng rng(derive_seed(config_.seed, "init"));
        conv_.init_he_uniform(rng);
        for (auto& layer : shared_) layer.init(rng);
        for (auto& b : branches_) {
            b.trunk.init(rng);
            for (auto& h : b.heads) h.init(rng);
        }
    }

    const ModelConfig& config() const { return config_; }
    Conv1DLayer& conv() { return conv_; }
    const Conv1DLayer& conv() const { return conv_; }
    std::vector<DenseLayer>& shared_layers() { return shared_; }
    std::vector<Branch>& branches() { return branches_; }
    const std::vector<Branch>& branches() const { return branches_; }
    bool trained() const { return trained_; }
    void mark_trained() { trained_ = true; }
    const FeatureScaler& scaler() const { return scaler_; }
    void set_scaler(const FeatureScaler& s) { scaler_ = s; }

    size_t branch_for(Role role) const {
        const int r = static_cast<int>(role);
        if (r != 0 && r != 1) throw UnknownRole("invalid role value " + std::to_string(r));
        return config_.n_branches() == 2 ? static_cast<size_t>(r) : 0;
    }

    std::vector<ParamView> params() {
        std::vector<ParamView> out;
        conv_.collect_params("conv", out);
        for (size_t i = 0; i < shared_.size(); ++i) {
            shared_[i].collect_params("shared" + std::to_string(i), out);
        }
        const std::vector<std::string> branch_names =
            config_.n_branches() == 2 ? std::vector<std::string>{"nurse", "doctor"}
                                      : std::vector<std::string>{"all"};
        for (size_t b = 0; b < branches_.size(); ++b) {
            branches_[b].trunk.collect_params(branch_names[b] + ".trunk", out);
            for (size_t l = 0; l < branches_[b].heads.size(); ++l) {
                branches_[b].heads[l].collect_params(
                    branch_names[b] + ".head." + config_.label_name(l), out);
            }
        }
        return out;
    }

    size_t parameter_count() {
        size_t n = 0;
        for (const auto& p : params()) n += p.values->size();
        return n;
    }

    void zero_grads() {
        conv_.zero_grads();
        for (auto& l : shared_) l.zero_grads();
        for (auto& b : branches_) {
            b.trunk.zero_grads();
            for (auto& h : b.heads) h.zero_grads();
        }
    }

    // Trunk output for all rows (conv + shared layers)
    Tensor2D trunk_forward(const Tensor2D& x) const {
        Tensor2D h = conv_.forward(x);
        for (const auto& layer : shared_) h = layer.forward(h);
        return h;
    }

    // Raw head outputs per model label: each tensor is batch x head_dim.
    // Rows are routed through the branch matching their role; the other
    // branch never sees them.
    std::vector<Tensor2D> forward(const Tensor2D& x, const std::vector<Role>& roles) const {
        if (x.rows != roles.size()) throw ShapeMismatch("feature/role row count mismatch");
        const Tensor2D h = trunk_forward(x);
        std::vector<Tensor2D> out(config_.n_labels());
        for (auto& t : out) t = Tensor2D(x.rows, config_.head_dim());

        for (size_t b = 0; b < branches_.size(); ++b) {
            std::vector<size_t> idx;
            for (size_t r = 0; r < roles.size(); ++r) {
                if (branch_for(roles[r]) == b) idx.push_back(r);
            }
            if (idx.empty()) continue;
            Tensor2D hb(idx.size(), h.cols);
            for (size_t r = 0; r < idx.size(); ++r) {
                for (size_t c = 0; c < h.cols; ++c) hb.at(r, c) = h.at(idx[r], c);
            }
            const Tensor2D tb = branches_[b].trunk.forward(hb);
            for (size_t l = 0; l < config_.n_labels(); ++l) {
                const Tensor2D ob = branches_[b].heads[l].forward(tb);
                for (size_t r = 0; r < idx.size(); ++r) {
                    for (size_t c = 0; c < ob.cols; ++c) out[l].at(idx[r], c) = ob.at(r, c);
                }
            }
        }
        return out;
    }

private:
    ModelConfig config_;
    Conv1DLayer conv_;
    std::vector<DenseLayer> shared_;
    std::vector<Branch> branches_;
    FeatureScaler scaler_;
    bool trained_ = false;
};

inline MTMLNetwork make_variant(const ModelConfig& config) { return MTMLNetwork(config); }

// ---------------------------------------------------------------------------
// Role-masked batch loss: per-branch sums of per-row, per-label losses.
// Rows of one role contribute nothing - not even zero-valued terms - to the
// other branch, so an absent role leaves that branch's gradients bitwise
// untouched. The total is the sum of the per-branch accumulators.
// ---------------------------------------------------------------------------

inline double masked_batch_loss(MTMLNetwork& net, const Batch& batch, bool accumulate_grads) {
    if (batch.size() == 0) throw EmptyBatch("batch is empty");
    const ModelConfig& cfg = net.config();
    if (batch.features.cols != cfg.schema_size) throw ShapeMismatch("batch width != schema size");

    LossSpec spec{cfg.task == TaskMode::regression ? TaskKind::regression : TaskKind::classification,
                  cfg.focal_gamma, cfg.focal_alpha};

    // conv + shared over the full batch
    LayerCache conv_cache;
    std::vector<LayerCache> shared_caches(net.shared_layers().size());
    Tensor2D h = net.conv().forward(batch.features, accumulate_grads ? &conv_cache : nullptr);
    for (size_t i = 0; i < net.shared_layers().size(); ++i) {
        h = net.shared_layers()[i].forward(h, accumulate_grads ? &shared_caches[i] : nullptr);
    }

    Tensor2D dh(h.rows, h.cols);
    double total_loss = 0.0;

    for (size_t b = 0; b < net.branches().size(); ++b) {
        std::vector<size_t> idx;
        for (size_t r = 0; r < batch.roles.size(); ++r) {
            if (net.branch_for(batch.roles[r]) == b) idx.push_back(r);
        }
        if (idx.empty()) continue;

        Tensor2D hb(idx.size(), h.cols);
        for (size_t r = 0; r < idx.size(); ++r) {
            for (size_t c = 0; c < h.cols; ++c) hb.at(r, c) = h.at(idx[r], c);
        }

        auto& branch = net.branches()[b];
        LayerCache trunk_cache;
        const Tensor2D tb = branch.trunk.forward(hb, accumulate_grads ? &trunk_cache : nullptr);

        double branch_loss = 0.0;
        Tensor2D dtb(tb.rows, tb.cols);
        for (size_t l = 0; l < cfg.n_labels(); ++l) {
            LayerCache head_cache;
            const Tensor2D ob = branch.heads[l].forward(tb, accumulate_grads ? &head_cache : nullptr);
            Tensor2D dob(ob.rows, ob.cols);
            const size_t col = cfg.label_column(l);
            if (spec.task == TaskKind::regression) {
                for (size_t r = 0; r < ob.rows; ++r) {
                    const double d = ob.at(r, 0) - batch.reg_targets.at(idx[r], col);
                    branch_loss += d * d;
                    dob.at(r, 0) = 2.0 * d;
                }
            } else {
                std::vector<double> row_grad(ob.cols);
                for (size_t r = 0; r < ob.rows; ++r) {
                    const int t = batch.cls_targets[idx[r]][col];
                    if (t < 0 || static_cast<size_t>(t) >= ob.cols) {
                        throw InvalidClass("class target outside head range");
                    }
                    branch_loss += detail::focal_row(ob.row(r), ob.cols, static_cast<size_t>(t),
                                                     spec.focal_gamma,
                                                     spec.alpha_for(static_cast<size_t>(t)),
                                                     accumulate_grads ? row_grad.data() : nullptr);
                    if (accumulate_grads) {
                        for (size_t c = 0; c < ob.cols; ++c) dob.at(r, c) = row_grad[c];
                    }
                }
            }
            if (accumulate_grads) {
                const Tensor2D d = branch.heads[l].backward(head_cache, dob);
                for (size_t i = 0; i < dtb.data.size(); ++i) dtb.data[i] += d.data[i];
            }
        }
        total_loss += branch_loss;

        if (accumulate_grads) {
            const Tensor2D dhb = branch.trunk.backward(trunk_cache, dtb);
            for (size_t r = 0; r < idx.size(); ++r) {
                for (size_t c = 0; c < h.cols; ++c) dh.at(idx[r], c) += dhb.at(r, c);
            }
        }
    }

    if (accumulate_grads) {
        Tensor2D d = dh;
        for (size_t i = net.shared_layers().size(); i-- > 0;) {
            d = net.shared_layers()[i].backward(shared_caches[i], d);
        }
        net.conv().backward(conv_cache, d);
    }

    if (!std::isfinite(total_loss)) throw DivergenceDetected("non-finite batch loss");
    return total_loss;
}

// ---------------------------------------------------------------------------
// Training: mini-batch Adam over seeded shuffles, optional early stopping on
// a validation batch. Deterministic given (config.seed, data).
// ---------------------------------------------------------------------------

struct TrainResult {
    std::vector<double> epoch_loss;  // mean per-row training loss
    size_t epochs_run = 0;
};

inline TrainResult train(MTMLNetwork& net, const Batch& data,
                         const Batch* validation = nullptr) {
    if (data.size() == 0) throw EmptyBatch("training set is empty");
    const ModelConfig& cfg = net.config();
    AdamState adam;
    adam.learning_rate = cfg.learning_rate;
    auto params = net.params();

    Rng shuffle_rng(derive_seed(cfg.seed, "epoch_shuffle"));
    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    const bool use_validation = validation != nullptr && validation->size() > 0;
    double best_val = std::numeric_limits<double>::infinity();
    size_t since_best = 0;
    std::vector<std::vector<double>> best_snapshot;

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(start + cfg.batch_size, order.size());
            std::vector<size_t> idx(order.begin() + static_cast<long>(start),
                                    order.begin() + static_cast<long>(end));
            const Batch mini = data.slice(idx);
            net.zero_grads();
            epoch_loss += masked_batch_loss(net, mini, true);
            adam_step(adam, params);
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(data.size()));
        ++result.epochs_run;

        if (use_validation) {
            const double val_loss =
                masked_batch_loss(net, *validation, false) / static_cast<double>(validation->size());
            if (val_loss < best_val - 1e-12) {
                best_val = val_loss;
                since_best = 0;
                best_snapshot.clear();
                for (const auto& p : params) best_snapshot.push_back(*p.values);
            } else if (++since_best >= cfg.early_stop_patience) {
                break;
            }
        }
    }
    // hand back the best-validation weights, not wherever the walk ended
    if (use_validation && !best_snapshot.empty()) {
        for (size_t b = 0; b < params.size(); ++b) *params[b].values = best_snapshot[b];
    }
    net.mark_trained();
    return result;
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

struct Prediction {
    std::vector<std::string> label_names;
    std::vector<double> values;                     // regression, 0-100 scale
    std::vector<int> classes;                       // classification argmax
    std::vector<std::vector<double>> probabilities;  // per label, per class
};

inline Prediction predict(const MTMLNetwork& net, const DailyFeatureVector& fv, Role role) {
    if (!net.trained()) throw UntrainedModel("predict on an untrained model");
    const ModelConfig& cfg = net.config();
    Tensor2D x(1, cfg.schema_size);
    net.scaler().apply(fv, x.row(0));
    const std::vector<Tensor2D> heads = net.forward(x, {role});

    Prediction out;
    for (size_t l = 0; l < cfg.n_labels(); ++l) {
        out.label_names.push_back(cfg.label_name(l));
        if (cfg.task == TaskMode::regression) {
            out.values.push_back(heads[l].at(0, 0) * 100.0);  // internal scale is [0,1]
        } else {
            const std::vector<double> p = softmax_row(heads[l].row(0), heads[l].cols);
            int best = 0;
            for (size_t c = 1; c < p.size(); ++c) {
                if (p[c] > p[static_cast<size_t>(best)]) best = static_cast<int>(c);
            }
            out.classes.push_back(best);
            out.probabilities.push_back(p);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gradient check against central differences
// ---------------------------------------------------------------------------

inline GradientCheckResult gradient_check(MTMLNetwork& net, const Batch& batch, size_t n_samples,
                                          uint64_t seed, double h = 1e-5) {
    net.zero_grads();
    masked_batch_loss(net, batch, true);
    auto params = net.params();
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) analytic.push_back(*p.grads);
    auto loss_fn = [&]() { return masked_batch_loss(net, batch, false); };
    return gradient_check_params(params, analytic, loss_fn, n_samples, seed, h);
}

// ---------------------------------------------------------------------------
// Model container (versioned JSON; doubles round-trip bit-exactly)
// ---------------------------------------------------------------------------

inline constexpr int kModelContainerVersion = 1;

inline nlohmann::json model_to_json(MTMLNetwork& net) {
    const ModelConfig& cfg = net.config();
    nlohmann::json j;
    j["container_version"] = kModelContainerVersion;
    j["schema_version"] = FeatureSchema::version;
    j["variant"] = to_string(cfg.variant);
    j["task"] = to_string(cfg.task);
    j["schema_size"] = cfg.schema_size;
    j["conv_channels"] = cfg.conv_channels;
    j["shared_widths"] = cfg.shared_widths;
    j["branch_width"] = cfg.branch_width;
    j["focal_gamma"] = cfg.focal_gamma;
    j["focal_alpha"] = cfg.focal_alpha;
    j["learning_rate"] = cfg.learning_rate;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["early_stop_patience"] = cfg.early_stop_patience;
    j["seed"] = cfg.seed;
    j["target_label"] = cfg.target_label;
    j["roles"] = cfg.n_branches() == 2 ? std::vector<std::string>{"nurse", "doctor"}
                                       : std::vector<std::string>{"all"};
    std::vector<std::string> labels;
    for (size_t l = 0; l < cfg.n_labels(); ++l) labels.push_back(cfg.label_name(l));
    j["labels"] = labels;
    j["trained"] = net.trained();

    const FeatureScaler& s = net.scaler();
    j["scaler"]["impute_mean"] = std::vector<double>(s.impute_mean.begin(), s.impute_mean.end());
    j["scaler"]["mean"] = std::vector<double>(s.mean.begin(), s.mean.end());
    j["scaler"]["sd"] = std::vector<double>(s.sd.begin(), s.sd.end());

    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& p : net.params()) {
        nlohmann::json b;
        b["name"] = p.name;
        b["values"] = *p.values;
        blocks.push_back(std::move(b));
    }
    j["parameters"] = std::move(blocks);
    return j;
}

inline void save_model(MTMLNetwork& net, const std::filesystem::path& path) {
    atomic_write_text(path, model_to_json(net).dump(1));
}

inline MTMLNetwork model_from_json(const nlohmann::json& j) {
    if (j.at("container_version").get<int>() != kModelContainerVersion) {
        throw ConfigError("unsupported model container version");
    }
    if (j.at("schema_version").get<int>() != FeatureSchema::version) {
        throw ConfigError("model was built against a different feature schema version");
    }
    ModelConfig cfg;
    cfg.variant = variant_from_string(j.at("variant").get<std::string>());
    cfg.task = task_mode_from_string(j.at("task").get<std::string>());
    cfg.schema_size = j.at("schema_size").get<size_t>();
    cfg.conv_channels = j.at("conv_channels").get<size_t>();
    cfg.shared_widths = j.at("shared_widths").get<std::vector<size_t>>();
    cfg.branch_width = j.at("branch_width").get<size_t>();
    cfg.focal_gamma = j.at("focal_gamma").get<double>();
    cfg.focal_alpha = j.at("focal_alpha").get<std::vector<double>>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.epochs = j.at("epochs").get<size_t>();
    cfg.batch_size = j.at("batch_size").get<size_t>();
    cfg.early_stop_patience = j.at("early_stop_patience").get<size_t>();
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.target_label = j.at("target_label").get<int>();

    MTMLNetwork net(cfg);
    FeatureScaler s;
    const auto load_array = [](const nlohmann::json& arr,
                               std::array<double, FeatureSchema::size>& out) {
        const auto v = arr.get<std::vector<double>>();
        if (v.size() != FeatureSchema::size) throw ConfigError("scaler size mismatch");
        std::copy(v.begin(), v.end(), out.begin());
    };
    load_array(j.at("scaler").at("impute_mean"), s.impute_mean);
    load_array(j.at("scaler").at("mean"), s.mean);
    load_array(j.at("scaler").at("sd"), s.sd);
    net.set_scaler(s);

    auto params = net.params();
    const auto& blocks = j.at("parameters");
    if (blocks.size() != params.size()) throw ConfigError("parameter block count mismatch");
    for (size_t b = 0; b < params.size(); ++b) {
        if (blocks[b].at("name").get<std::string>() != params[b].name) {
            throw ConfigError("parameter block '" + params[b].name + "' missing or reordered");
        }
        const auto vals = blocks[b].at("values").get<std::vector<double>>();
        if (vals.size() != params[b].values->size()) {
            throw ConfigError("parameter block '" + params[b].name + "' size mismatch");
        }
        *params[b].values = vals;
    }
    if (j.at("trained").get<bool>()) net.mark_trained();
    return net;
}

inline MTMLNetwork load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
        return model_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model container '" + path.string() + "': " + e.what());
    }
}

}  // namespace wellbeing
