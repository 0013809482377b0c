// Command-line entry point wiring the library modules together:
//   synth     generate a calibrated synthetic cohort bundle
//   features  raw CSV bundle -> features.csv
//   compare   nurse-vs-doctor feature statistics
//   train     train one model from a config file
//   evaluate  full experiment protocol (splits, CV, grid search, metrics)
//   predict   trained model + features -> predictions.csv
//   analyze   conv-layer feature importance report

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"
#include "wellbeing/features.hpp"
#include "wellbeing/harness.hpp"
#include "wellbeing/introspect.hpp"
#include "wellbeing/manifest.hpp"
#include "wellbeing/model.hpp"
#include "wellbeing/records.hpp"
#include "wellbeing/stats.hpp"
#include "wellbeing/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConfig = 4;

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw wellbeing::ConfigError("cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw wellbeing::ConfigError("bad JSON in '" + path.string() + "': " + e.what());
    }
    return j;
}

wellbeing::CohortSpec cohort_spec_from_json(const json& j) {
    wellbeing::CohortSpec spec;
    auto role_targets = [](const json& r, wellbeing::RoleTargets& t) {
        if (r.contains("hr_mean")) t.hr_mean = r["hr_mean"].get<double>();
        if (r.contains("hr_sd")) t.hr_sd = r["hr_sd"].get<double>();
        if (r.contains("sleep_dur")) t.sleep_dur = r["sleep_dur"].get<double>();
        if (r.contains("sleep_dur_sd")) t.sleep_dur_sd = r["sleep_dur_sd"].get<double>();
        if (r.contains("sleep_eff")) t.sleep_eff = r["sleep_eff"].get<double>();
        if (r.contains("sleep_eff_sd")) t.sleep_eff_sd = r["sleep_eff_sd"].get<double>();
        if (r.contains("steps")) t.steps = r["steps"].get<double>();
        if (r.contains("steps_sd")) t.steps_sd = r["steps_sd"].get<double>();
        if (r.contains("overwork_mean")) t.overwork_mean = r["overwork_mean"].get<double>();
        if (r.contains("overwork_zero_prob")) t.overwork_zero_prob = r["overwork_zero_prob"].get<double>();
        if (r.contains("shift_probs")) {
            const auto v = r["shift_probs"].get<std::vector<double>>();
            if (v.size() != 3) throw wellbeing::ConfigError("shift_probs needs 3 entries");
            std::copy(v.begin(), v.end(), t.shift_probs.begin());
        }
        if (r.contains("label_mean")) {
            const auto v = r["label_mean"].get<std::vector<double>>();
            if (v.size() != 5) throw wellbeing::ConfigError("label_mean needs 5 entries");
            std::copy(v.begin(), v.end(), t.label_mean.begin());
        }
        if (r.contains("label_sd")) {
            const auto v = r["label_sd"].get<std::vector<double>>();
            if (v.size() != 5) throw wellbeing::ConfigError("label_sd needs 5 entries");
            std::copy(v.begin(), v.end(), t.label_sd.begin());
        }
    };
    if (j.contains("n_nurses")) spec.n_nurses = j["n_nurses"].get<int>();
    if (j.contains("n_doctors")) spec.n_doctors = j["n_doctors"].get<int>();
    if (j.contains("nurse_days_total")) spec.nurse_days_total = j["nurse_days_total"].get<int>();
    if (j.contains("doctor_days_total")) spec.doctor_days_total = j["doctor_days_total"].get<int>();
    if (j.contains("start_date")) spec.start_date = wellbeing::Date::parse(j["start_date"].get<std::string>());
    if (j.contains("participant_offset_frac")) {
        spec.participant_offset_frac = j["participant_offset_frac"].get<double>();
    }
    if (j.contains("nurse")) role_targets(j["nurse"], spec.nurse);
    if (j.contains("doctor")) role_targets(j["doctor"], spec.doctor);
    if (j.contains("planted")) {
        const json& p = j["planted"];
        auto coef5 = [](const json& arr, std::array<double, 5>& out) {
            const auto v = arr.get<std::vector<double>>();
            if (v.size() != 5) throw wellbeing::ConfigError("planted vectors need 5 entries");
            std::copy(v.begin(), v.end(), out.begin());
        };
        if (p.contains("nurse_coef")) coef5(p["nurse_coef"], spec.planted.nurse_coef);
        if (p.contains("doctor_coef")) coef5(p["doctor_coef"], spec.planted.doctor_coef);
        if (p.contains("loadings")) coef5(p["loadings"], spec.planted.loadings);
        if (p.contains("noise_scale")) spec.planted.noise_scale = p["noise_scale"].get<double>();
    }
    return spec;
}

json cohort_spec_to_json(const wellbeing::CohortSpec& spec) {
    auto role_json = [](const wellbeing::RoleTargets& t) {
        json r;
        r["hr_mean"] = t.hr_mean;
        r["hr_sd"] = t.hr_sd;
        r["sleep_dur"] = t.sleep_dur;
        r["sleep_dur_sd"] = t.sleep_dur_sd;
        r["sleep_eff"] = t.sleep_eff;
        r["sleep_eff_sd"] = t.sleep_eff_sd;
        r["steps"] = t.steps;
        r["steps_sd"] = t.steps_sd;
        r["overwork_mean"] = t.overwork_mean;
        r["overwork_zero_prob"] = t.overwork_zero_prob;
        r["shift_probs"] = t.shift_probs;
        r["label_mean"] = t.label_mean;
        r["label_sd"] = t.label_sd;
        return r;
    };
    json j;
    j["n_nurses"] = spec.n_nurses;
    j["n_doctors"] = spec.n_doctors;
    j["nurse_days_total"] = spec.nurse_days_total;
    j["doctor_days_total"] = spec.doctor_days_total;
    j["start_date"] = spec.start_date.to_string();
    j["participant_offset_frac"] = spec.participant_offset_frac;
    j["nurse"] = role_json(spec.nurse);
    j["doctor"] = role_json(spec.doctor);
    j["planted"]["nurse_coef"] = spec.planted.nurse_coef;
    j["planted"]["doctor_coef"] = spec.planted.doctor_coef;
    j["planted"]["loadings"] = spec.planted.loadings;
    j["planted"]["noise_scale"] = spec.planted.noise_scale;
    return j;
}

wellbeing::ModelConfig model_config_from_json(const json& j) {
    wellbeing::ModelConfig cfg;
    if (j.contains("variant")) cfg.variant = wellbeing::variant_from_string(j["variant"].get<std::string>());
    if (j.contains("task")) cfg.task = wellbeing::task_mode_from_string(j["task"].get<std::string>());
    if (j.contains("shared_widths")) cfg.shared_widths = j["shared_widths"].get<std::vector<size_t>>();
    if (j.contains("branch_width")) cfg.branch_width = j["branch_width"].get<size_t>();
    if (j.contains("focal_gamma")) cfg.focal_gamma = j["focal_gamma"].get<double>();
    if (j.contains("focal_alpha")) cfg.focal_alpha = j["focal_alpha"].get<std::vector<double>>();
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<size_t>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<size_t>();
    if (j.contains("early_stop_patience")) cfg.early_stop_patience = j["early_stop_patience"].get<size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("target_label")) cfg.target_label = j["target_label"].get<int>();
    cfg.validate();
    return cfg;
}

json model_config_to_json(const wellbeing::ModelConfig& cfg) {
    json j;
    j["variant"] = wellbeing::to_string(cfg.variant);
    j["task"] = wellbeing::to_string(cfg.task);
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
    return j;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::string> capture_argv(int argc, char** argv) {
    std::vector<std::string> v;
    for (int i = 0; i < argc; ++i) v.push_back(argv[i]);
    return v;
}

// ---------------------------------------------------------------------------

int cmd_synth(const fs::path& spec_file, uint64_t seed, const fs::path& out_dir,
              const std::vector<std::string>& argv) {
    wellbeing::CohortSpec spec;
    if (!spec_file.empty()) spec = cohort_spec_from_json(read_json_file(spec_file));
    const wellbeing::SynthBundle bundle = wellbeing::generate(spec, seed);
    wellbeing::write_bundle(bundle, out_dir);
    const wellbeing::CalibrationReport report = wellbeing::self_check(bundle.cohort, spec);
    std::printf("generated %zu participants, %zu labeled days; %zu calibration checks passed\n",
                bundle.cohort.participants.size(), bundle.cohort.labels.size(),
                report.items.size());

    wellbeing::RunManifest manifest;
    manifest.command = "synth";
    manifest.argv = argv;
    manifest.master_seed = seed;
    manifest.resolved_config = cohort_spec_to_json(spec);
    if (!spec_file.empty()) manifest.inputs.push_back(spec_file);
    for (const char* name : {"participants.csv", "hr.csv", "steps.csv", "sleep.csv", "survey.csv",
                             "labels.csv", "ground_truth.csv"}) {
        manifest.outputs.push_back(out_dir / name);
    }
    manifest.write(out_dir / "manifest.json");
    return kExitOk;
}

int cmd_features(const fs::path& data_dir, const fs::path& out_file,
                 const std::vector<std::string>& argv) {
    const wellbeing::CohortData cohort = wellbeing::load_cohort(data_dir);
    const auto rows = wellbeing::build_feature_table(cohort);
    wellbeing::write_features_csv(out_file, rows);
    std::printf("wrote %zu feature rows to %s\n", rows.size(), out_file.string().c_str());

    wellbeing::RunManifest manifest;
    manifest.command = "features";
    manifest.argv = argv;
    for (const char* name : {"participants.csv", "hr.csv", "steps.csv", "sleep.csv", "survey.csv"}) {
        manifest.inputs.push_back(data_dir / name);
    }
    manifest.outputs.push_back(out_file);
    manifest.write(out_file.parent_path().empty()
                       ? fs::path("manifest.json")
                       : out_file.parent_path() / (out_file.stem().string() + ".manifest.json"));
    return kExitOk;
}

int cmd_compare(const fs::path& features_file, const fs::path& participants_file,
                const fs::path& out_dir, const std::vector<std::string>& argv) {
    auto rows = wellbeing::read_features_csv(features_file);
    // roles re-attached from the registry; features.csv carries them too but
    // the registry is authoritative
    const wellbeing::CsvTable parts = wellbeing::read_csv(participants_file);
    const size_t cp = parts.col("participant_id"), cr = parts.col("role");
    std::map<std::string, wellbeing::Role> roles;
    for (const auto& r : parts.rows) roles[r[cp]] = wellbeing::role_from_string(r[cr]);
    for (auto& fv : rows) {
        const auto it = roles.find(fv.participant_id);
        if (it == roles.end()) {
            throw wellbeing::UnknownParticipant("participant '" + fv.participant_id +
                                                "' not in registry");
        }
        fv.role = it->second;
    }

    const wellbeing::ComparisonReport report = wellbeing::compare_groups(rows);
    fs::create_directories(out_dir);
    wellbeing::write_csv(out_dir / "comparison.csv", wellbeing::comparison_to_csv(report));
    const std::string text = wellbeing::comparison_to_text(report);
    wellbeing::atomic_write_text(out_dir / "comparison.txt", text);
    std::fputs(text.c_str(), stdout);

    wellbeing::RunManifest manifest;
    manifest.command = "compare";
    manifest.argv = argv;
    manifest.inputs = {features_file, participants_file};
    manifest.outputs = {out_dir / "comparison.csv", out_dir / "comparison.txt"};
    manifest.write(out_dir / "manifest.json");
    return kExitOk;
}

int cmd_train(const fs::path& data_dir, const fs::path& config_file, const fs::path& out_file,
              const std::vector<std::string>& argv) {
    const wellbeing::ModelConfig cfg =
        config_file.empty() ? wellbeing::ModelConfig{}
                            : model_config_from_json(read_json_file(config_file));
    const auto features = wellbeing::read_features_csv(data_dir / "features.csv");
    wellbeing::CohortData label_holder;
    {
        const wellbeing::CsvTable t = wellbeing::read_csv(data_dir / "labels.csv");
        const size_t cp = t.col("participant_id"), cd = t.col("date");
        std::array<size_t, 5> cl{};
        for (size_t i = 0; i < 5; ++i) cl[i] = t.col(wellbeing::kLabelNames[i]);
        for (const auto& row : t.rows) {
            wellbeing::WellbeingLabels lab;
            lab.participant_id = row[cp];
            lab.date = wellbeing::Date::parse(row[cd]);
            for (size_t i = 0; i < 5; ++i) lab.values[i] = wellbeing::parse_double(row[cl[i]]);
            label_holder.labels[wellbeing::CohortData::key(lab.participant_id, lab.date)] = lab;
        }
    }
    const auto rows = wellbeing::build_labeled_rows(features, label_holder.labels);
    if (rows.size() < 2) throw wellbeing::TooSmall("not enough feature/next-day-label pairs");

    std::vector<const wellbeing::DailyFeatureVector*> frows;
    for (const auto& r : rows) frows.push_back(r.features);
    const wellbeing::FeatureScaler scaler = wellbeing::FeatureScaler::fit(frows);
    std::vector<size_t> idx(rows.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    wellbeing::Batch batch = wellbeing::make_batch(rows, idx, scaler, cfg.task);

    wellbeing::ModelConfig run_cfg = cfg;
    if (run_cfg.task != wellbeing::TaskMode::regression && run_cfg.focal_alpha.empty()) {
        run_cfg.focal_alpha = wellbeing::inverse_frequency_alpha(batch, run_cfg);
    }
    wellbeing::MTMLNetwork net(run_cfg);
    net.set_scaler(scaler);
    const wellbeing::TrainResult tr = wellbeing::train(net, batch);
    wellbeing::save_model(net, out_file);
    std::printf("trained %s/%s on %zu rows (%zu epochs, final loss %.6f)\n",
                wellbeing::to_string(run_cfg.variant).c_str(),
                wellbeing::to_string(run_cfg.task).c_str(), rows.size(), tr.epochs_run,
                tr.epoch_loss.back());

    wellbeing::RunManifest manifest;
    manifest.command = "train";
    manifest.argv = argv;
    manifest.master_seed = run_cfg.seed;
    manifest.resolved_config = model_config_to_json(run_cfg);
    manifest.inputs = {data_dir / "features.csv", data_dir / "labels.csv"};
    if (!config_file.empty()) manifest.inputs.push_back(config_file);
    manifest.outputs = {out_file};
    manifest.write(out_file.parent_path().empty()
                       ? fs::path("manifest.json")
                       : out_file.parent_path() / (out_file.stem().string() + ".manifest.json"));
    return kExitOk;
}

int cmd_evaluate(const fs::path& data_dir, const std::string& variants_csv,
                 const std::string& tasks_csv, uint64_t seed, const fs::path& grid_file,
                 const fs::path& out_dir, int reps, bool by_participant, unsigned threads,
                 const std::vector<std::string>& argv) {
    // configuration problems surface before any data is touched
    const std::vector<std::string> variants = split_list(variants_csv);
    std::vector<wellbeing::TaskMode> tasks;
    for (const auto& t : split_list(tasks_csv)) tasks.push_back(wellbeing::task_mode_from_string(t));
    if (variants.empty() || tasks.empty()) {
        throw wellbeing::UsageError("need at least one variant and one task");
    }
    const wellbeing::GridSpec grid = grid_file.empty() ? wellbeing::GridSpec::single_default()
                                                       : wellbeing::load_grid(grid_file);

    const auto features = wellbeing::read_features_csv(data_dir / "features.csv");
    wellbeing::CohortData label_holder;
    {
        const wellbeing::CsvTable t = wellbeing::read_csv(data_dir / "labels.csv");
        const size_t cp = t.col("participant_id"), cd = t.col("date");
        std::array<size_t, 5> cl{};
        for (size_t i = 0; i < 5; ++i) cl[i] = t.col(wellbeing::kLabelNames[i]);
        for (const auto& row : t.rows) {
            wellbeing::WellbeingLabels lab;
            lab.participant_id = row[cp];
            lab.date = wellbeing::Date::parse(row[cd]);
            for (size_t i = 0; i < 5; ++i) lab.values[i] = wellbeing::parse_double(row[cl[i]]);
            label_holder.labels[wellbeing::CohortData::key(lab.participant_id, lab.date)] = lab;
        }
    }

    wellbeing::ExperimentOptions options;
    options.n_repetitions = reps;
    options.participant_level_split = by_participant;
    if (threads > 0) options.threads = threads;

    const wellbeing::ExperimentReport report = wellbeing::run_experiment(
        features, label_holder.labels, variants, tasks, grid, seed, {}, options);

    fs::create_directories(out_dir);
    wellbeing::write_csv(out_dir / "metrics.csv", wellbeing::metrics_to_csv(report));
    wellbeing::write_csv(out_dir / "significance.csv", wellbeing::significance_to_csv(report));
    wellbeing::write_csv(out_dir / "repetition_log.csv", wellbeing::rep_log_to_csv(report));
    std::printf("evaluated %zu variant/task cells over %d repetitions -> %s\n",
                variants.size() * tasks.size(), reps, (out_dir / "metrics.csv").string().c_str());

    wellbeing::RunManifest manifest;
    manifest.command = "evaluate";
    manifest.argv = argv;
    manifest.master_seed = seed;
    manifest.resolved_config["variants"] = variants;
    manifest.resolved_config["tasks"] = split_list(tasks_csv);
    manifest.resolved_config["repetitions"] = reps;
    manifest.resolved_config["participant_level_split"] = by_participant;
    manifest.inputs = {data_dir / "features.csv", data_dir / "labels.csv"};
    if (!grid_file.empty()) manifest.inputs.push_back(grid_file);
    manifest.outputs = {out_dir / "metrics.csv", out_dir / "significance.csv",
                        out_dir / "repetition_log.csv"};
    manifest.write(out_dir / "manifest.json");
    return kExitOk;
}

int cmd_predict(const fs::path& model_file, const fs::path& features_file,
                const fs::path& out_file, const std::vector<std::string>& argv) {
    const wellbeing::MTMLNetwork net = wellbeing::load_model(model_file);
    const auto rows = wellbeing::read_features_csv(features_file);
    const auto& cfg = net.config();

    wellbeing::CsvTable t;
    t.header = {"participant_id", "date"};
    for (size_t l = 0; l < cfg.n_labels(); ++l) {
        const std::string name = cfg.label_name(l);
        if (cfg.task == wellbeing::TaskMode::regression) {
            t.header.push_back(name);
        } else {
            t.header.push_back(name + "_class");
            for (size_t c = 0; c < cfg.head_dim(); ++c) {
                t.header.push_back(name + "_prob_" + std::to_string(c));
            }
        }
    }
    for (const auto& fv : rows) {
        const wellbeing::Prediction p = wellbeing::predict(net, fv, fv.role);
        std::vector<std::string> row = {fv.participant_id, fv.date.to_string()};
        for (size_t l = 0; l < cfg.n_labels(); ++l) {
            if (cfg.task == wellbeing::TaskMode::regression) {
                row.push_back(wellbeing::format_double(p.values[l]));
            } else {
                row.push_back(std::to_string(p.classes[l]));
                for (double prob : p.probabilities[l]) {
                    row.push_back(wellbeing::format_double(prob));
                }
            }
        }
        t.rows.push_back(std::move(row));
    }
    wellbeing::write_csv(out_file, t);
    std::printf("wrote %zu predictions to %s\n", t.rows.size(), out_file.string().c_str());

    wellbeing::RunManifest manifest;
    manifest.command = "predict";
    manifest.argv = argv;
    manifest.inputs = {model_file, features_file};
    manifest.outputs = {out_file};
    manifest.write(out_file.parent_path().empty()
                       ? fs::path("manifest.json")
                       : out_file.parent_path() / (out_file.stem().string() + ".manifest.json"));
    return kExitOk;
}

int cmd_analyze(const fs::path& model_file, const fs::path& features_file, const fs::path& out_file,
                const std::vector<std::string>& argv) {
    const wellbeing::MTMLNetwork net = wellbeing::load_model(model_file);
    const auto rows = wellbeing::read_features_csv(features_file);
    const wellbeing::ImportanceReport report = wellbeing::analyze_model(net, rows);
    wellbeing::write_csv(out_file, wellbeing::importance_to_csv(report));
    std::printf("top features:");
    for (size_t i = 0; i < 8 && i < report.ranking.size(); ++i) {
        std::printf(" %s", report.feature_names[report.ranking[i]].c_str());
    }
    std::printf("\n");

    wellbeing::RunManifest manifest;
    manifest.command = "analyze";
    manifest.argv = argv;
    manifest.inputs = {model_file, features_file};
    manifest.outputs = {out_file};
    manifest.write(out_file.parent_path().empty()
                       ? fs::path("manifest.json")
                       : out_file.parent_path() / (out_file.stem().string() + ".manifest.json"));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shift-worker wellbeing forecasting toolkit"};
    app.require_subcommand(1);
    const std::vector<std::string> argv_copy = capture_argv(argc, argv);

    std::string spec_file, data_dir, out_path, features_file, participants_file, model_file,
        config_file, grid_file, variants = "mtml,mt,ml,nn", tasks = "binary,three,regression";
    uint64_t seed = 0;
    int reps = 10;
    unsigned threads = 0;
    bool by_participant = false;

    auto* synth = app.add_subcommand("synth", "Generate a calibrated synthetic cohort");
    synth->add_option("--spec", spec_file, "Cohort spec JSON (defaults used when omitted)");
    synth->add_option("--seed", seed, "Master seed")->default_val("7");
    synth->add_option("--out", out_path, "Output directory")->required();

    auto* features = app.add_subcommand("features", "Extract daily feature vectors");
    features->add_option("--data", data_dir, "Directory with the raw CSV bundle")->required();
    features->add_option("--out", out_path, "Output features.csv path")->required();

    auto* compare = app.add_subcommand("compare", "Nurse-vs-doctor cohort statistics");
    compare->add_option("--features", features_file, "features.csv")->required();
    compare->add_option("--participants", participants_file, "participants.csv")->required();
    compare->add_option("--out", out_path, "Output directory")->required();

    auto* train = app.add_subcommand("train", "Train one model");
    train->add_option("--data", data_dir, "Directory with features.csv and labels.csv")->required();
    train->add_option("--config", config_file, "Model config JSON (defaults used when omitted)");
    train->add_option("--out", out_path, "Output model file")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Run the full experiment protocol");
    evaluate->add_option("--data", data_dir, "Directory with features.csv and labels.csv")->required();
    evaluate->add_option("--variants", variants, "Comma list of mtml,mt,ml,nn,ml_n,ml_d");
    evaluate->add_option("--tasks", tasks, "Comma list of binary,three,regression");
    evaluate->add_option("--seed", seed, "Master seed")->default_val("0");
    evaluate->add_option("--grid", grid_file, "Grid spec JSON");
    evaluate->add_option("--out", out_path, "Output directory")->required();
    evaluate->add_option("--reps", reps, "Number of 80/20 repetitions")->default_val("10");
    evaluate->add_flag("--by-participant", by_participant,
                       "Participant-level splits instead of row-level");
    evaluate->add_option("--threads", threads, "Worker threads (0 = hardware)");

    auto* predict = app.add_subcommand("predict", "Predict next-day labels with a trained model");
    predict->add_option("--model", model_file, "Model container")->required();
    predict->add_option("--features", features_file, "features.csv")->required();
    predict->add_option("--out", out_path, "Output predictions.csv")->required();

    auto* analyze = app.add_subcommand("analyze", "Feature importance of a trained model");
    analyze->add_option("--model", model_file, "Model container")->required();
    analyze->add_option("--features", features_file, "features.csv")->required();
    analyze->add_option("--out", out_path, "Output report.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(spec_file, seed, out_path, argv_copy);
        if (features->parsed()) return cmd_features(data_dir, out_path, argv_copy);
        if (compare->parsed()) return cmd_compare(features_file, participants_file, out_path, argv_copy);
        if (train->parsed()) return cmd_train(data_dir, config_file, out_path, argv_copy);
        if (evaluate->parsed()) {
            return cmd_evaluate(data_dir, variants, tasks, seed, grid_file, out_path, reps,
                                by_participant, threads, argv_copy);
        }
        if (predict->parsed()) return cmd_predict(model_file, features_file, out_path, argv_copy);
        if (analyze->parsed()) return cmd_analyze(model_file, features_file, out_path, argv_copy);
    } catch (const wellbeing::UsageError& e) {
        std::fprintf(stderr, "error[usage]: %s\n", e.what());
        return kExitUsage;
    } catch (const wellbeing::ConfigError& e) {
        std::fprintf(stderr, "error[config]: %s\n", e.what());
        return kExitConfig;
    } catch (const wellbeing::Error& e) {
        std::fprintf(stderr, "error[data]: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error[internal]: %s\n", e.what());
        return kExitInternal;
    }
    return kExitUsage;
}
