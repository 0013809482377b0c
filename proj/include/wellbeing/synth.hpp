#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"
#include "wellbeing/features.hpp"
#include "wellbeing/records.hpp"
#include "wellbeing/stats.hpp"

namespace wellbeing {

// ---------------------------------------------------------------------------
// Cohort specification: role-conditional generation targets taken from the
// published cohort statistics, plus the planted feature->label structure that
// makes the learning pipeline verifiable.
// ---------------------------------------------------------------------------

struct RoleTargets {
    double hr_mean = 0.0, hr_sd = 0.0;            // across-day stats of the daily mean HR
    double sleep_dur = 0.0, sleep_dur_sd = 0.0;   // minutes
    double sleep_eff = 0.0, sleep_eff_sd = 0.0;   // 0..100
    double steps = 0.0, steps_sd = 0.0;           // daily total
    double overwork_mean = 0.0;                   // minutes
    double overwork_zero_prob = 0.0;              // P(no overwork on a day)
    std::array<double, 3> shift_probs{};          // shift1..3
    std::array<double, 3> wake_probs{};           // natural/alarm/other
    std::array<double, 6> ttfa_probs{};           // time-to-fall-asleep bins
    std::array<double, 5> label_mean{};           // alert/happy/energy/health/stress
    std::array<double, 5> label_sd{};
};

// Signal features feeding the planted wellbeing factor, in this order.
inline constexpr std::array<size_t, 5> kPlantedFeatures = {
    feat::sleep_regularity, feat::sleep_efficiency, feat::shift1, feat::steps_total,
    feat::entropy_active};

struct PlantedModel {
    // per-role coefficients over kPlantedFeatures (applied to within-role
    // z-scores); sleep regularity/efficiency/shift1 positive, steps and
    // active-segment entropy negative
    std::array<double, 5> nurse_coef = {0.55, 0.45, 0.40, -0.35, -0.30};
    std::array<double, 5> doctor_coef = {0.50, 0.60, 0.30, -0.25, -0.40};
    // per-label loadings on the shared latent factor; alertness is reduced to
    // reproduce its weaker correlation band
    std::array<double, 5> loadings = {0.55, 0.915, 0.84, 0.84, 0.915};
    double noise_scale = 1.0;

    const std::array<double, 5>& coef(Role r) const {
        return r == Role::nurse ? nurse_coef : doctor_coef;
    }
};

struct CohortSpec {
    int n_nurses = 10;
    int n_doctors = 4;
    int nurse_days_total = 164;
    int doctor_days_total = 77;
    Date start_date = Date::from_civil(2024, 3, 4);
    double participant_offset_frac = 0.2;  // participant SD as a fraction of the role SD
    RoleTargets nurse{78.5, 7.1, 374.3, 134.0, 93.1, 4.9, 8931.2, 4030.3,
                      11.0,  0.9,
                      {0.538, 0.304, 0.157},
                      {0.355, 0.609, 0.036},
                      {0.340, 0.314, 0.173, 0.066, 0.036, 0.071},
                      {38.5, 57.2, 54.0, 63.3, 63.5},
                      {22.9, 20.9, 22.9, 22.1, 23.4}};
    RoleTargets doctor{70.6, 6.8, 363.1, 106.3, 95.5, 2.9, 8139.9, 3350.8,
                       202.6, 0.35,
                       {0.643, 0.198, 0.158},
                       {0.356, 0.465, 0.178},
                       {0.406, 0.416, 0.119, 0.030, 0.030, 0.0},
                       {52.8, 59.2, 60.5, 63.9, 65.6},
                       {23.5, 17.1, 22.4, 22.4, 17.5}};
    PlantedModel planted;

    const RoleTargets& targets(Role r) const { return r == Role::nurse ? nurse : doctor; }

    // correlation matrix implied by the loadings
    std::vector<std::vector<double>> implied_label_correlation() const {
        std::vector<std::vector<double>> m(5, std::vector<double>(5, 0.0));
        for (size_t i = 0; i < 5; ++i) {
            for (size_t j = 0; j < 5; ++j) {
                m[i][j] = i == j ? 1.0 : planted.loadings[i] * planted.loadings[j];
            }
        }
        return m;
    }

    void validate() const {
        if (n_nurses < 1 || n_doctors < 1) throw InfeasibleSpec("need at least one of each role");
        if (nurse_days_total < n_nurses || doctor_days_total < n_doctors) {
            throw InfeasibleSpec("fewer days than participants");
        }
        for (double l : planted.loadings) {
            if (std::fabs(l) > 1.0) throw InfeasibleSpec("label loading outside [-1,1]");
        }
        const auto eig = symmetric_eigenvalues(implied_label_correlation());
        if (eig.front() < -1e-9) throw InfeasibleSpec("label correlation targets not PSD");
        // The tail compression keeps values inside (0,100); beyond ~10% of
        // Gaussian mass outside the range it would distort the moments past
        // the self-check tolerances, so such specs are rejected up front.
        double outside = 0.0, total = 0.0;
        for (const Role role : {Role::nurse, Role::doctor}) {
            const RoleTargets& t = targets(role);
            const double n = role == Role::nurse ? nurse_days_total : doctor_days_total;
            for (size_t l = 0; l < 5; ++l) {
                const double p_low = normal_cdf((0.0 - t.label_mean[l]) / t.label_sd[l]);
                const double p_high = 1.0 - normal_cdf((100.0 - t.label_mean[l]) / t.label_sd[l]);
                outside += n * (p_low + p_high);
                total += n;
            }
        }
        if (outside / total > 0.10) {
            throw InfeasibleSpec("label targets put > 10% of mass outside [0,100]");
        }
    }
};

struct SynthBundle {
    CohortData cohort;
    CohortSpec spec;
    uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace detail {

struct ParticipantPlan {
    std::string id;
    Role role;
    int n_days;
};

inline std::vector<ParticipantPlan> participant_plans(const CohortSpec& spec) {
    std::vector<ParticipantPlan> plans;
    auto spread = [&plans](const std::string& prefix, Role role, int count, int total_days) {
        const int base = total_days / count;
        int extra = total_days % count;
        for (int i = 0; i < count; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%s%02d", prefix.c_str(), i + 1);
            plans.push_back({buf, role, base + (extra > 0 ? 1 : 0)});
            if (extra > 0) --extra;
        }
    };
    spread("N", Role::nurse, spec.n_nurses, spec.nurse_days_total);
    spread("D", Role::doctor, spec.n_doctors, spec.doctor_days_total);
    return plans;
}

// Bounded label transform: identity on [5, 95], smooth tanh compression of
// the tails into (0, 100). Hard clipping at the published means/SDs would put
// ~4% of values exactly on the bounds; this keeps the distribution smooth and
// the moments within the calibration tolerances.
inline double squash_label(double v) {
    constexpr double margin = 5.0;
    if (v > 100.0 - margin) {
        return 100.0 - margin + margin * std::tanh((v - (100.0 - margin)) / margin);
    }
    if (v < margin) {
        return margin + margin * std::tanh((v - margin) / margin);
    }
    return v;
}

inline int sleep_onset_for_shift(WorkShift prev_shift, Rng& rng) {
    // day shift -> late-evening sleep (spans midnight); evening shift ->
    // small-hours sleep; night shift -> daytime recovery sleep
    double base;
    switch (prev_shift) {
        case WorkShift::shift2: base = 110.0; break;
        case WorkShift::shift3: base = 570.0; break;
        default: base = 1385.0; break;
    }
    const int onset = static_cast<int>(std::llround(base + rng.normal(0.0, 25.0)));
    return ((onset % 1440) + 1440) % 1440;
}

}  // namespace detail

// Generates the raw CSV bundle contents in memory. Pure function of
// (spec, seed): identical inputs give identical bundles.
inline SynthBundle generate(const CohortSpec& spec, uint64_t seed) {
    spec.validate();
    SynthBundle bundle;
    bundle.spec = spec;
    bundle.seed = seed;
    CohortData& data = bundle.cohort;

    const auto plans = detail::participant_plans(spec);
    for (const auto& p : plans) data.participants[p.id] = p.role;

    // --- pass 1: sensors and surveys ---------------------------------------
    struct DayDraw {
        double hr_day_mean = 0.0;
    };
    std::map<std::string, std::vector<DayDraw>> day_draws;

    for (size_t pi = 0; pi < plans.size(); ++pi) {
        const auto& plan = plans[pi];
        const RoleTargets& t = spec.targets(plan.role);
        Rng rng(derive_seed(seed, "participant", pi));

        const double day_frac = std::sqrt(1.0 - spec.participant_offset_frac *
                                                    spec.participant_offset_frac);
        const double hr_base = t.hr_mean + rng.normal(0.0, spec.participant_offset_frac * t.hr_sd);
        const double steps_base =
            t.steps + rng.normal(0.0, spec.participant_offset_frac * t.steps_sd);
        const double dur_base =
            t.sleep_dur + rng.normal(0.0, spec.participant_offset_frac * t.sleep_dur_sd);
        const double eff_base =
            t.sleep_eff + rng.normal(0.0, spec.participant_offset_frac * t.sleep_eff_sd);

        std::vector<WorkShift> shifts(static_cast<size_t>(plan.n_days));
        for (auto& s : shifts) {
            const size_t pick = rng.categorical({t.shift_probs[0], t.shift_probs[1], t.shift_probs[2]});
            s = pick == 0 ? WorkShift::shift1 : pick == 1 ? WorkShift::shift2 : WorkShift::shift3;
        }

        auto& draws = day_draws[plan.id];
        for (int d = 0; d < plan.n_days; ++d) {
            const Date day = spec.start_date + d;
            const auto key = CohortData::key(plan.id, day);

            // sleep episode (attributed to the wake day), timed by the
            // previous day's shift
            const WorkShift prev_shift = d > 0 ? shifts[static_cast<size_t>(d - 1)]
                                               : shifts[static_cast<size_t>(d)];
            const double duration = std::clamp(
                dur_base + rng.normal(0.0, day_frac * t.sleep_dur_sd), 120.0, 720.0);
            const double efficiency =
                std::clamp(eff_base + rng.normal(0.0, day_frac * t.sleep_eff_sd), 70.0, 100.0);
            const int onset = detail::sleep_onset_for_shift(prev_shift, rng);
            SleepRecord rec;
            rec.participant_id = plan.id;
            rec.date = day;
            rec.duration_min = std::round(duration);
            rec.efficiency = efficiency;
            const int end = (onset + static_cast<int>(rec.duration_min)) % 1440;
            rec.intervals.push_back({onset, end});
            data.sleep[key].push_back(rec);

            // heart rate minutes: day-level mean + circadian cosine + noise,
            // with a few device-off gaps
            DayDraw dd;
            dd.hr_day_mean = hr_base + rng.normal(0.0, day_frac * t.hr_sd);
            draws.push_back(dd);

            // steps: alternating stationary/active runs while awake
            const SleepMask mask = [&]() {
                SleepMask m;
                m.fill(false);
                const auto& iv = rec.intervals[0];
                if (iv.start_min <= iv.end_min) {
                    for (int mm = iv.start_min; mm < iv.end_min; ++mm) m[static_cast<size_t>(mm)] = true;
                } else {
                    for (int mm = 0; mm < iv.end_min; ++mm) m[static_cast<size_t>(mm)] = true;
                    for (int mm = iv.start_min; mm < 1440; ++mm) m[static_cast<size_t>(mm)] = true;
                }
                return m;
            }();

            MinuteStream steps;
            steps.participant_id = plan.id;
            steps.date = day;
            steps.kind = StreamKind::steps;
            {
                std::vector<double> raw(1440, 0.0);
                double raw_total = 0.0;
                int minute = 0;
                bool active = false;
                while (minute < 1440) {
                    const int len = active ? 1 + static_cast<int>(rng.exponential(3.0))
                                           : 1 + static_cast<int>(rng.exponential(7.0));
                    for (int k = 0; k < len && minute < 1440; ++k, ++minute) {
                        if (active && !mask[static_cast<size_t>(minute)]) {
                            const double v = std::round(rng.uniform(40.0, 130.0));
                            raw[static_cast<size_t>(minute)] = v;
                            raw_total += v;
                        }
                    }
                    active = !active;
                }
                const double target_total =
                    std::max(500.0, steps_base + rng.normal(0.0, day_frac * t.steps_sd));
                const double scale = raw_total > 0.0 ? target_total / raw_total : 0.0;
                for (int mm = 0; mm < 1440; ++mm) {
                    const double v = raw[static_cast<size_t>(mm)] > 0.0
                                         ? std::max(1.0, std::round(raw[static_cast<size_t>(mm)] * scale))
                                         : 0.0;
                    steps.values.push_back({mm, v});
                }
            }
            data.steps[key] = std::move(steps);

            // survey
            SurveyDay sv;
            sv.participant_id = plan.id;
            sv.date = day;
            sv.time_to_fall_asleep_bin = static_cast<int>(rng.categorical(
                {t.ttfa_probs[0], t.ttfa_probs[1], t.ttfa_probs[2], t.ttfa_probs[3],
                 t.ttfa_probs[4], t.ttfa_probs[5]}));
            const size_t wk = rng.categorical({t.wake_probs[0], t.wake_probs[1], t.wake_probs[2]});
            sv.wake_type = wk == 0 ? WakeType::natural : wk == 1 ? WakeType::alarm : WakeType::other;
            {
                const double u = rng.uniform();
                const double p1 = plan.role == Role::nurse ? 0.400 : 0.270;
                const double p2 = plan.role == Role::nurse ? 0.075 : 0.050;
                sv.nap_count = u < p1 ? 1 : (u < p1 + p2 ? 2 : 0);
                const double per_nap = plan.role == Role::nurse ? 56.5 : 51.6;
                for (int nn = 0; nn < sv.nap_count; ++nn) {
                    sv.nap_duration_min += std::round(rng.exponential(per_nap));
                }
            }
            sv.work_shift = shifts[static_cast<size_t>(d)];
            sv.work_duration_hr = plan.role == Role::nurse
                                      ? 8.0
                                      : 8.0 + (rng.uniform() < 0.2 ? rng.exponential(2.0) : 0.0);
            sv.overwork_min = rng.uniform() < t.overwork_zero_prob
                                  ? 0.0
                                  : std::round(rng.exponential(t.overwork_mean /
                                                               (1.0 - t.overwork_zero_prob)));
            {
                const double u = rng.uniform();
                const double p1 = plan.role == Role::nurse ? 0.33 : 0.33;
                const double p2 = plan.role == Role::nurse ? 0.07 : 0.06;
                sv.caffeine_cups = u < p1 ? 1 : (u < p1 + p2 ? 2 : 0);
            }
            sv.alcohol_or_drug = rng.uniform() < 0.15;
            data.surveys[key] = std::move(sv);
        }
    }

    // recenter HR day means per role so the empirical role mean hits the
    // target exactly up to minute-level noise (the acceptance band is tight)
    for (const Role role : {Role::nurse, Role::doctor}) {
        double sum = 0.0;
        size_t n = 0;
        for (const auto& p : plans) {
            if (p.role != role) continue;
            for (const auto& dd : day_draws[p.id]) {
                sum += dd.hr_day_mean;
                ++n;
            }
        }
        const double shift = spec.targets(role).hr_mean - sum / static_cast<double>(n);
        for (const auto& p : plans) {
            if (p.role != role) continue;
            for (auto& dd : day_draws[p.id]) dd.hr_day_mean += shift;
        }
    }

    for (size_t pi = 0; pi < plans.size(); ++pi) {
        const auto& plan = plans[pi];
        Rng rng(derive_seed(seed, "hr_minutes", pi));
        for (int d = 0; d < plan.n_days; ++d) {
            const Date day = spec.start_date + d;
            const auto key = CohortData::key(plan.id, day);
            const double day_mean = day_draws[plan.id][static_cast<size_t>(d)].hr_day_mean;

            // 2-4 gaps of device-off time
            std::array<bool, 1440> present;
            present.fill(true);
            const int n_gaps = 2 + static_cast<int>(rng.below(3));
            for (int g = 0; g < n_gaps; ++g) {
                const int start = static_cast<int>(rng.below(1440));
                const int len = 5 + static_cast<int>(rng.exponential(12.0));
                for (int mm = start; mm < std::min(start + len, 1440); ++mm) {
                    present[static_cast<size_t>(mm)] = false;
                }
            }

            MinuteStream hr;
            hr.participant_id = plan.id;
            hr.date = day;
            hr.kind = StreamKind::heart_rate;
            for (int mm = 0; mm < 1440; ++mm) {
                if (!present[static_cast<size_t>(mm)]) continue;
                const double circadian =
                    -6.0 * std::cos(2.0 * 3.14159265358979323846 * (mm - 900) / 1440.0);
                const double v = std::max(35.0, std::round(day_mean + circadian + rng.normal(0.0, 3.0)));
                hr.values.push_back({mm, v});
            }
            data.heart_rate[key] = std::move(hr);
        }
    }

    // --- pass 2: planted labels from realized previous-day features --------
    struct SignalRow {
        std::string pid;
        Date date;
        Role role;
        std::array<double, 5> z{};  // standardized planted features
    };

    // realized planted-feature values (missing -> NaN, z = 0 after scaling)
    std::map<std::pair<std::string, int32_t>, std::array<double, 5>> raw_signals;
    for (const auto& [key, sv] : data.surveys) {
        const std::string& pid = key.first;
        const Date day(key.second);
        std::array<double, 5> sig;
        sig.fill(std::numeric_limits<double>::quiet_NaN());
        try {
            sig[0] = sleep_regularity(build_sleep_grid(data, pid, day));
        } catch (const InsufficientCoverage&) {
        }
        if (const auto* recs = data.find_sleep(pid, day); recs && !recs->empty()) {
            sig[1] = (*recs)[0].efficiency;
        }
        sig[2] = sv.work_shift == WorkShift::shift1 ? 1.0 : 0.0;
        if (const auto* st = data.find_steps(pid, day)) {
            double total = 0.0;
            for (const auto& s : st->values) total += s.value;
            sig[3] = total;
            const auto [stationary, active] = extract_segments(*st, day_sleep_mask(data, pid, day));
            try {
                sig[4] = information_entropy(active);
            } catch (const EmptyHistogram&) {
            }
        }
        raw_signals[key] = sig;
    }

    // per-role standardization of each signal feature
    std::map<Role, std::array<std::pair<double, double>, 5>> signal_stats;  // mean, sd
    for (const Role role : {Role::nurse, Role::doctor}) {
        for (size_t f = 0; f < 5; ++f) {
            std::vector<double> vals;
            for (const auto& [key, sig] : raw_signals) {
                if (data.role_of(key.first) != role || std::isnan(sig[f])) continue;
                vals.push_back(sig[f]);
            }
            const double m = vals.empty() ? 0.0 : mean_of(vals);
            const double s = vals.size() > 1 ? sample_sd(vals) : 0.0;
            signal_stats[role][f] = {m, s > 0.0 ? s : 1.0};
        }
    }

    // latent factor per participant-day, standardized within role
    std::map<std::pair<std::string, int32_t>, double> factor;
    for (const Role role : {Role::nurse, Role::doctor}) {
        std::vector<std::pair<std::pair<std::string, int32_t>, double>> raw;
        for (const auto& [key, sig] : raw_signals) {
            if (data.role_of(key.first) != role) continue;
            double f = 0.0;
            for (size_t i = 0; i < 5; ++i) {
                if (std::isnan(sig[i])) continue;
                const auto& [m, s] = signal_stats[role][i];
                f += spec.planted.coef(role)[i] * (sig[i] - m) / s;
            }
            raw.push_back({key, f});
        }
        std::vector<double> vals;
        for (const auto& [k, f] : raw) vals.push_back(f);
        const double m = mean_of(vals);
        const double s = sample_sd(vals);
        for (const auto& [k, f] : raw) factor[k] = s > 0.0 ? (f - m) / s : 0.0;
    }

    for (size_t pi = 0; pi < plans.size(); ++pi) {
        const auto& plan = plans[pi];
        const RoleTargets& t = spec.targets(plan.role);
        Rng rng(derive_seed(seed, "labels", pi));
        for (int d = 0; d < plan.n_days; ++d) {
            const Date day = spec.start_date + d;
            double f;
            if (d == 0) {
                f = spec.planted.noise_scale * rng.normal();  // no feature parent
            } else {
                f = factor.at(CohortData::key(plan.id, day - 1));
            }
            WellbeingLabels lab;
            lab.participant_id = plan.id;
            lab.date = day;
            for (size_t l = 0; l < 5; ++l) {
                const double loading = spec.planted.loadings[l];
                const double noise_sd = std::sqrt(std::max(0.0, 1.0 - loading * loading));
                const double v = t.label_mean[l] +
                                 t.label_sd[l] * (loading * f + noise_sd * spec.planted.noise_scale *
                                                                    rng.normal());
                lab.values[l] = detail::squash_label(v);
            }
            data.labels[CohortData::key(plan.id, day)] = std::move(lab);
        }
    }

    return bundle;
}

// ---------------------------------------------------------------------------
// Bundle serialization
// ---------------------------------------------------------------------------

inline void write_bundle(const SynthBundle& bundle, const std::filesystem::path& dir) {
    const CohortData& data = bundle.cohort;
    std::filesystem::create_directories(dir);

    {
        CsvTable t;
        t.header = {"participant_id", "role"};
        for (const auto& [pid, role] : data.participants) t.rows.push_back({pid, to_string(role)});
        write_csv(dir / "participants.csv", t);
    }
    {
        std::string out = "participant_id,date,minute,bpm\n";
        for (const auto& [key, stream] : data.heart_rate) {
            const std::string prefix = key.first + "," + Date(key.second).to_string() + ",";
            for (const auto& s : stream.values) {
                out += prefix + std::to_string(s.minute) + "," + format_double(s.value) + "\n";
            }
        }
        atomic_write_text(dir / "hr.csv", out);
    }
    {
        std::string out = "participant_id,date,minute,steps\n";
        for (const auto& [key, stream] : data.steps) {
            const std::string prefix = key.first + "," + Date(key.second).to_string() + ",";
            for (const auto& s : stream.values) {
                out += prefix + std::to_string(s.minute) + "," + format_double(s.value) + "\n";
            }
        }
        atomic_write_text(dir / "steps.csv", out);
    }
    {
        CsvTable t;
        t.header = {"participant_id", "date", "start_min", "end_min", "duration_min", "efficiency"};
        for (const auto& [key, recs] : data.sleep) {
            for (const auto& r : recs) {
                for (const auto& iv : r.intervals) {
                    t.rows.push_back({r.participant_id, r.date.to_string(),
                                      std::to_string(iv.start_min), std::to_string(iv.end_min),
                                      format_double(r.duration_min), format_double(r.efficiency)});
                }
            }
        }
        write_csv(dir / "sleep.csv", t);
    }
    {
        CsvTable t;
        t.header = {"participant_id", "date", "ttfa_bin", "wake_type", "nap_count", "nap_min",
                    "shift", "work_hr", "overwork_min", "caffeine", "alc_drug"};
        for (const auto& [key, s] : data.surveys) {
            t.rows.push_back({s.participant_id, s.date.to_string(),
                              std::to_string(s.time_to_fall_asleep_bin), to_string(s.wake_type),
                              std::to_string(s.nap_count), format_double(s.nap_duration_min),
                              to_string(s.work_shift), format_double(s.work_duration_hr),
                              format_double(s.overwork_min), std::to_string(s.caffeine_cups),
                              s.alcohol_or_drug ? "1" : "0"});
        }
        write_csv(dir / "survey.csv", t);
    }
    {
        CsvTable t;
        t.header = {"participant_id", "date", "alertness", "happiness", "energy", "health", "stress"};
        for (const auto& [key, lab] : data.labels) {
            std::vector<std::string> row = {lab.participant_id, lab.date.to_string()};
            for (double v : lab.values) row.push_back(format_double(v));
            t.rows.push_back(std::move(row));
        }
        write_csv(dir / "labels.csv", t);
    }
    {
        CsvTable t;
        t.header = {"kind", "role", "name", "value"};
        const auto& planted = bundle.spec.planted;
        for (const Role role : {Role::nurse, Role::doctor}) {
            for (size_t f = 0; f < kPlantedFeatures.size(); ++f) {
                t.rows.push_back({"coefficient", to_string(role),
                                  FeatureSchema::names()[kPlantedFeatures[f]],
                                  format_double(planted.coef(role)[f])});
            }
        }
        for (size_t l = 0; l < 5; ++l) {
            t.rows.push_back({"loading", "", kLabelNames[l], format_double(planted.loadings[l])});
        }
        t.rows.push_back({"noise_scale", "", "", format_double(planted.noise_scale)});
        write_csv(dir / "ground_truth.csv", t);
    }
}

// ---------------------------------------------------------------------------
// Calibration self-check
// ---------------------------------------------------------------------------

struct CalibrationItem {
    std::string name;
    double target = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct CalibrationReport {
    std::vector<CalibrationItem> items;
    bool all_pass = true;

    void add(const std::string& name, double target, double actual, double tol) {
        const bool ok = std::fabs(actual - target) <= tol;
        items.push_back({name, target, actual, tol, ok});
        all_pass = all_pass && ok;
    }
    void add_band(const std::string& name, double lo, double hi, double actual) {
        const bool ok = actual >= lo && actual <= hi;
        items.push_back({name, 0.5 * (lo + hi), actual, 0.5 * (hi - lo), ok});
        all_pass = all_pass && ok;
    }
};

// Compares empirical bundle statistics against the spec targets; throws
// CalibrationFailure when any check misses. Tolerances scale with the
// bundle's sample size (day-level noise plus participant-offset clustering)
// so small custom cohorts are judged fairly; heart rate keeps a fixed +-1
// band because generation recenters it explicitly.
inline CalibrationReport self_check(const CohortData& data, const CohortSpec& spec) {
    if (data.surveys.empty() || data.heart_rate.empty() || data.labels.empty()) {
        throw CalibrationFailure("bundle is empty");
    }
    CalibrationReport report;

    for (const Role role : {Role::nurse, Role::doctor}) {
        const RoleTargets& t = spec.targets(role);
        const std::string prefix = to_string(role) + ".";

        double n_days = 0.0, n_participants = 0.0;
        for (const auto& [pid, r] : data.participants) {
            if (r == role) n_participants += 1.0;
        }
        for (const auto& [key, sv] : data.surveys) {
            if (data.role_of(key.first) == role) n_days += 1.0;
        }
        if (n_days < 1.0 || n_participants < 1.0) {
            throw CalibrationFailure("role " + to_string(role) + " has no data");
        }
        const double off = spec.participant_offset_frac;
        auto mean_tol = [&](double sd, double floor_tol) {
            const double se = std::sqrt(sd * sd * (1.0 - off * off) / n_days +
                                        off * off * sd * sd / n_participants);
            return std::max(floor_tol, 3.5 * se);
        };
        auto sd_tol = [&](double sd, double floor_tol) {
            return std::max(floor_tol, 3.5 * sd / std::sqrt(2.0 * n_days));
        };
        auto prop_tol = [&](double p) {
            return std::max(0.05, 3.5 * std::sqrt(p * (1.0 - p) / n_days));
        };

        std::vector<double> day_means, durations, efficiencies, steps_totals, overworks;
        std::array<double, 3> shift_counts{};
        double survey_count = 0.0;

        for (const auto& [key, stream] : data.heart_rate) {
            if (data.role_of(key.first) != role || stream.values.empty()) continue;
            double m = 0.0;
            for (const auto& s : stream.values) m += s.value;
            day_means.push_back(m / static_cast<double>(stream.values.size()));
        }
        for (const auto& [key, recs] : data.sleep) {
            if (data.role_of(key.first) != role) continue;
            double dur = 0.0, eff = 0.0;
            for (const auto& r : recs) {
                dur += r.duration_min;
                eff += r.efficiency;
            }
            durations.push_back(dur);
            efficiencies.push_back(eff / static_cast<double>(recs.size()));
        }
        for (const auto& [key, stream] : data.steps) {
            if (data.role_of(key.first) != role) continue;
            double total = 0.0;
            for (const auto& s : stream.values) total += s.value;
            steps_totals.push_back(total);
        }
        for (const auto& [key, sv] : data.surveys) {
            if (data.role_of(key.first) != role) continue;
            overworks.push_back(sv.overwork_min);
            survey_count += 1.0;
            if (sv.work_shift == WorkShift::shift1) shift_counts[0] += 1.0;
            if (sv.work_shift == WorkShift::shift2) shift_counts[1] += 1.0;
            if (sv.work_shift == WorkShift::shift3) shift_counts[2] += 1.0;
        }

        if (day_means.empty() || durations.empty() || steps_totals.empty() || overworks.empty()) {
            throw CalibrationFailure("role " + to_string(role) + " has no data");
        }
        report.add(prefix + "hr_mean", t.hr_mean, mean_of(day_means), 1.0);  // recentered
        report.add(prefix + "hr_sd", t.hr_sd, sample_sd(day_means), sd_tol(t.hr_sd, 1.0));
        report.add(prefix + "sleep_duration", t.sleep_dur, mean_of(durations),
                   mean_tol(t.sleep_dur_sd, 10.0));
        report.add(prefix + "sleep_efficiency", t.sleep_eff, mean_of(efficiencies),
                   mean_tol(t.sleep_eff_sd, 1.0));
        report.add(prefix + "steps_total", t.steps, mean_of(steps_totals),
                   mean_tol(t.steps_sd, 200.0));
        // exponential-mixture overwork: draw SD is close to twice the mean
        report.add(prefix + "overwork", t.overwork_mean, mean_of(overworks),
                   mean_tol(2.0 * t.overwork_mean, 5.0));
        for (size_t s = 0; s < 3; ++s) {
            report.add(prefix + "shift" + std::to_string(s + 1) + "_frac", t.shift_probs[s],
                       shift_counts[s] / survey_count, prop_tol(t.shift_probs[s]));
        }

        std::array<std::vector<double>, 5> label_vals;
        for (const auto& [key, lab] : data.labels) {
            if (data.role_of(key.first) != role) continue;
            for (size_t l = 0; l < 5; ++l) label_vals[l].push_back(lab.values[l]);
        }
        for (size_t l = 0; l < 5; ++l) {
            report.add(prefix + std::string(kLabelNames[l]) + "_mean", t.label_mean[l],
                       mean_of(label_vals[l]), mean_tol(t.label_sd[l], 2.5));
            report.add(prefix + std::string(kLabelNames[l]) + "_sd", t.label_sd[l],
                       sample_sd(label_vals[l]), sd_tol(t.label_sd[l], 2.5));
        }
    }

    // pooled label correlations against the Fig.-2-style targets
    {
        std::vector<std::array<double, 5>> rows;
        for (const auto& [key, lab] : data.labels) rows.push_back(lab.values);
        const LabelCorrelationMatrix m = label_correlation_matrix(rows);
        report.add("r2.happiness_stress", 0.70, m.r_squared[1][4], 0.10);
        for (size_t other = 1; other < 5; ++other) {
            report.add_band("r2.alertness_" + std::string(kLabelNames[other]), 0.09, 0.38,
                            m.r_squared[0][other]);
        }
        const std::pair<size_t, size_t> strong_pairs[] = {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}};
        for (const auto& [i, j] : strong_pairs) {
            report.add_band(
                "r2." + std::string(kLabelNames[i]) + "_" + std::string(kLabelNames[j]), 0.45,
                1.0, m.r_squared[i][j]);
        }
        // clipping fraction over all label values
        double clipped = 0.0, total = 0.0;
        for (const auto& [key, lab] : data.labels) {
            for (double v : lab.values) {
                if (v == 0.0 || v == 100.0) clipped += 1.0;
                total += 1.0;
            }
        }
        report.add_band("label_clipped_frac", 0.0, 0.02, clipped / total);
    }

    if (!report.all_pass) {
        std::string msg = "calibration failed:";
        for (const auto& item : report.items) {
            if (!item.pass) {
                msg += " " + item.name + " (target " + format_double(item.target) + ", actual " +
                       format_double(item.actual) + ")";
            }
        }
        throw CalibrationFailure(msg);
    }
    return report;
}

}  // namespace wellbeing
