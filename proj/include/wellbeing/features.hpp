#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"
#include "wellbeing/records.hpp"

namespace wellbeing {

// ---------------------------------------------------------------------------
// Sample entropy (template matching under Chebyshev distance)
// ---------------------------------------------------------------------------

struct SampleEntropyParams {
    int m = 2;            // embedding dimension
    double r_factor = 0.2;  // tolerance as a multiple of the sample SD
};

// Largest finite value reported when no (m+1)-templates match.
inline double sample_entropy_cap(size_t n, int m) {
    const double t = static_cast<double>(n - static_cast<size_t>(m));
    return std::log(t * (t - 1.0));
}

// Both template lengths use the first N-m windows so their match counts share
// a denominator; the per-window normalizations then cancel in the ratio, and
// the result is -log(total m+1 matches / total m matches). Matches use strict
// '<' and exclude self-comparison.
inline double sample_entropy(std::span<const double> x, const SampleEntropyParams& params = {}) {
    if (params.m < 1) throw Error("embedding dimension must be >= 1");
    if (params.r_factor <= 0.0) throw Error("r_factor must be > 0");
    const size_t n = x.size();
    const size_t m = static_cast<size_t>(params.m);
    if (n < m + 2) {
        throw InsufficientData("sample entropy needs length >= m+2, got " + std::to_string(n));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw Error("sample entropy input must be finite");
    }

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) {
        throw DegenerateSeries("constant series: r = 0 admits no strict matches");
    }
    const double r = params.r_factor * sd;

    const size_t t = n - m;  // number of templates for both lengths
    uint64_t match_m = 0, match_m1 = 0;
    for (size_t i = 0; i + 1 < t; ++i) {
        for (size_t j = i + 1; j < t; ++j) {
            bool ok = true;
            for (size_t k = 0; k < m; ++k) {
                if (!(std::fabs(x[i + k] - x[j + k]) < r)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            match_m += 2;  // the count is symmetric in (i, j)
            if (std::fabs(x[i + m] - x[j + m]) < r) match_m1 += 2;
        }
    }

    if (match_m1 == 0) return sample_entropy_cap(n, params.m);
    return -std::log(static_cast<double>(match_m1) / static_cast<double>(match_m));
}

// ---------------------------------------------------------------------------
// Daily heart-rate features
// ---------------------------------------------------------------------------

struct HeartRateFeatures {
    double mean = 0.0;
    double sd = 0.0;
    std::optional<double> sampen;  // empty when the series is degenerate
};

constexpr int kMinHeartRateMinutes = 60;
constexpr int kMaxInterpolatedGap = 5;

// Series used for entropy: present minutes in order, with gaps of at most
// kMaxInterpolatedGap minutes filled by linear interpolation; longer gaps are
// spliced out.
inline std::vector<double> heart_rate_entropy_series(const MinuteStream& hr) {
    std::vector<double> series;
    series.reserve(hr.values.size());
    for (size_t i = 0; i < hr.values.size(); ++i) {
        if (i > 0) {
            const int gap = hr.values[i].minute - hr.values[i - 1].minute;
            if (gap > 1 && gap <= kMaxInterpolatedGap) {
                const double v0 = hr.values[i - 1].value, v1 = hr.values[i].value;
                for (int g = 1; g < gap; ++g) {
                    series.push_back(v0 + (v1 - v0) * static_cast<double>(g) / gap);
                }
            }
        }
        series.push_back(hr.values[i].value);
    }
    return series;
}

inline HeartRateFeatures heart_rate_day_features(const MinuteStream& hr) {
    if (hr.kind != StreamKind::heart_rate) throw Error("stream is not heart rate");
    if (hr.values.size() < static_cast<size_t>(kMinHeartRateMinutes)) {
        throw TooSparse("heart rate day has " + std::to_string(hr.values.size()) +
                        " minutes, need >= " + std::to_string(kMinHeartRateMinutes));
    }
    std::vector<double> vals;
    vals.reserve(hr.values.size());
    for (const auto& s : hr.values) vals.push_back(s.value);

    HeartRateFeatures out;
    out.mean = mean_of(vals);
    out.sd = sample_sd(vals);
    try {
        out.sampen = sample_entropy(heart_rate_entropy_series(hr));
    } catch (const DegenerateSeries&) {
        out.sampen.reset();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Step segments and their duration entropy
// ---------------------------------------------------------------------------

enum class SegmentKind { stationary, active };

struct SegmentHistogram {
    SegmentKind kind = SegmentKind::stationary;
    std::map<int, uint64_t> duration_counts;  // 1-minute bins keyed by exact duration

    uint64_t total() const {
        uint64_t t = 0;
        for (const auto& [dur, c] : duration_counts) t += c;
        return t;
    }
};

// Minute-of-day sleep mask for one day; true = asleep.
using SleepMask = std::array<bool, 1440>;

// Maximal runs of awake minutes with zero steps (stationary) and with
// positive steps (active). A step minute is any minute with count > 0.
// Sleep and device-off minutes both terminate runs.
inline std::pair<SegmentHistogram, SegmentHistogram> extract_segments(const MinuteStream& steps,
                                                                      const SleepMask& asleep) {
    if (steps.kind != StreamKind::steps) throw Error("stream is not steps");
    SegmentHistogram stationary{SegmentKind::stationary, {}};
    SegmentHistogram active{SegmentKind::active, {}};

    std::array<int, 1440> state;  // -1 missing/asleep, 0 stationary, 1 active
    state.fill(-1);
    for (const auto& s : steps.values) {
        if (!asleep[static_cast<size_t>(s.minute)]) state[static_cast<size_t>(s.minute)] = s.value > 0.0 ? 1 : 0;
    }

    int run_state = -1, run_len = 0;
    auto flush = [&]() {
        if (run_len == 0) return;
        if (run_state == 0) stationary.duration_counts[run_len] += 1;
        else if (run_state == 1) active.duration_counts[run_len] += 1;
        run_len = 0;
    };
    for (int minute = 0; minute < 1440; ++minute) {
        const int st = state[static_cast<size_t>(minute)];
        if (st != run_state) {
            flush();
            run_state = st;
        }
        if (st >= 0) ++run_len;
    }
    flush();
    return {std::move(stationary), std::move(active)};
}

// En = -sum p_i ln p_i over non-empty duration bins (natural log).
inline double information_entropy(const SegmentHistogram& h) {
    const uint64_t total = h.total();
    if (total == 0) throw EmptyHistogram("segment histogram is empty");
    double en = 0.0;
    for (const auto& [dur, c] : h.duration_counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        en -= p * std::log(p);
    }
    return en;
}

// ---------------------------------------------------------------------------
// Sleep minute grid and regularity
// ---------------------------------------------------------------------------

enum class SleepState : uint8_t { sleep, wake, missing };

struct SleepMinuteGrid {
    // rows: 7 consecutive days (oldest first), columns: minute of day
    std::array<std::array<SleepState, 1440>, 7> states;

    SleepMinuteGrid() {
        for (auto& row : states) row.fill(SleepState::missing);
    }

    int present_minutes(int day) const {
        int n = 0;
        for (const auto s : states[static_cast<size_t>(day)]) {
            if (s != SleepState::missing) ++n;
        }
        return n;
    }
};

constexpr int kMinGridDayMinutes = 720;
constexpr int kMinGridDays = 2;

// Fraction of minute comparisons 24h apart (adjacent grid rows) where both
// states are present and equal.
inline double sleep_regularity(const SleepMinuteGrid& grid) {
    int covered_days = 0;
    for (int d = 0; d < 7; ++d) {
        if (grid.present_minutes(d) >= kMinGridDayMinutes) ++covered_days;
    }
    if (covered_days < kMinGridDays) {
        throw InsufficientCoverage("sleep grid has " + std::to_string(covered_days) +
                                   " sufficiently covered days, need >= " +
                                   std::to_string(kMinGridDays));
    }

    uint64_t both = 0, agree = 0;
    for (int d = 0; d + 1 < 7; ++d) {
        const auto& a = grid.states[static_cast<size_t>(d)];
        const auto& b = grid.states[static_cast<size_t>(d) + 1];
        for (int minute = 0; minute < 1440; ++minute) {
            if (a[static_cast<size_t>(minute)] == SleepState::missing ||
                b[static_cast<size_t>(minute)] == SleepState::missing) {
                continue;
            }
            ++both;
            if (a[static_cast<size_t>(minute)] == b[static_cast<size_t>(minute)]) ++agree;
        }
    }
    if (both == 0) throw InsufficientCoverage("no aligned present minute pairs");
    return static_cast<double>(agree) / static_cast<double>(both);
}

// Sleep minutes attributed to calendar day `day`: this day's episodes, plus
// the pre-midnight part of next-day episodes that span midnight.
inline SleepMask day_sleep_mask(const CohortData& cohort, const std::string& pid, Date day) {
    SleepMask mask{};
    mask.fill(false);
    auto mark = [&mask](int from, int to) {  // [from, to)
        from = std::max(from, 0);
        to = std::min(to, 1440);
        for (int t = from; t < to; ++t) mask[static_cast<size_t>(t)] = true;
    };
    if (const auto* recs = cohort.find_sleep(pid, day)) {
        for (const auto& rec : *recs) {
            for (const auto& iv : rec.intervals) {
                if (iv.start_min <= iv.end_min) mark(iv.start_min, iv.end_min);
                else mark(0, iv.end_min);  // spans midnight; tail began yesterday
            }
        }
    }
    if (const auto* next = cohort.find_sleep(pid, day + 1)) {
        for (const auto& rec : *next) {
            for (const auto& iv : rec.intervals) {
                if (iv.start_min > iv.end_min) mark(iv.start_min, 1440);
            }
        }
    }
    return mask;
}

// Grid over the 7 days ending at `end_day` (inclusive). A day counts as
// observed only if a sleep record is dated to it; unobserved days are fully
// missing rather than assumed awake.
inline SleepMinuteGrid build_sleep_grid(const CohortData& cohort, const std::string& pid,
                                        Date end_day) {
    SleepMinuteGrid grid;
    for (int d = 0; d < 7; ++d) {
        const Date day = end_day - (6 - d);
        if (cohort.find_sleep(pid, day) == nullptr) continue;
        const SleepMask mask = day_sleep_mask(cohort, pid, day);
        for (int minute = 0; minute < 1440; ++minute) {
            grid.states[static_cast<size_t>(d)][static_cast<size_t>(minute)] =
                mask[static_cast<size_t>(minute)] ? SleepState::sleep : SleepState::wake;
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Rolling statistics over previous days
// ---------------------------------------------------------------------------

struct RollingStats {
    double mean = 0.0;
    std::optional<double> sd;  // needs >= 2 days
    int days_used = 0;
};

// Mean/SD over values dated within the `window` calendar days strictly before
// `target`; partial windows use whatever days exist.
inline RollingStats rolling_stats(const std::vector<std::pair<Date, double>>& daily_values,
                                  Date target, int window) {
    if (window != 3 && window != 5 && window != 7) throw Error("window must be 3, 5, or 7");
    std::vector<double> in_window;
    for (const auto& [d, v] : daily_values) {
        const int back = target - d;
        if (back >= 1 && back <= window) in_window.push_back(v);
    }
    if (in_window.empty()) throw NoHistory("no prior days within window");
    RollingStats out;
    out.days_used = static_cast<int>(in_window.size());
    out.mean = mean_of(in_window);
    if (in_window.size() >= 2) out.sd = sample_sd(in_window);
    return out;
}

// ---------------------------------------------------------------------------
// Feature schema and the daily vector
// ---------------------------------------------------------------------------

// Indices into the 40-entry daily feature vector.
namespace feat {
enum : size_t {
    hr_mean = 0,
    hr_sd,
    hr_sampen,
    sleep_duration,
    sleep_efficiency,
    sleep_regularity,
    sleep_dur_mean_7,
    sleep_dur_sd_7,
    sleep_dur_mean_5,
    sleep_dur_sd_5,
    sleep_dur_mean_3,
    sleep_dur_sd_3,
    sleep_eff_mean_7,
    sleep_eff_sd_7,
    sleep_eff_mean_5,
    sleep_eff_sd_5,
    sleep_eff_mean_3,
    sleep_eff_sd_3,
    time_to_fall_asleep_bin,
    wake_natural,
    wake_alarm,
    wake_other,
    nap_count,
    nap_duration,
    steps_total,
    steps_mean_7,
    steps_sd_7,
    steps_mean_5,
    steps_sd_5,
    steps_mean_3,
    steps_sd_3,
    entropy_stationary,
    entropy_active,
    shift1,
    shift2,
    shift3,
    work_duration,
    overwork,
    caffeine_cups,
    alcohol_or_drug,
    count
};
}  // namespace feat

struct FeatureSchema {
    static constexpr size_t size = feat::count;
    static constexpr int version = 1;

    static const std::vector<std::string>& names() {
        static const std::vector<std::string> n = {
            "hr_mean", "hr_sd", "hr_sampen",
            "sleep_duration", "sleep_efficiency", "sleep_regularity",
            "sleep_dur_mean_7", "sleep_dur_sd_7", "sleep_dur_mean_5", "sleep_dur_sd_5",
            "sleep_dur_mean_3", "sleep_dur_sd_3",
            "sleep_eff_mean_7", "sleep_eff_sd_7", "sleep_eff_mean_5", "sleep_eff_sd_5",
            "sleep_eff_mean_3", "sleep_eff_sd_3",
            "time_to_fall_asleep_bin",
            "wake_natural", "wake_alarm", "wake_other",
            "nap_count", "nap_duration",
            "steps_total",
            "steps_mean_7", "steps_sd_7", "steps_mean_5", "steps_sd_5", "steps_mean_3",
            "steps_sd_3",
            "entropy_stationary", "entropy_active",
            "shift1", "shift2", "shift3",
            "work_duration", "overwork",
            "caffeine_cups", "alcohol_or_drug"};
        return n;
    }

    // One-hot groups (contiguous index ranges). A missing group is imputed as
    // all-zero rather than with feature means.
    static const std::vector<std::pair<size_t, size_t>>& onehot_groups() {
        static const std::vector<std::pair<size_t, size_t>> g = {
            {feat::wake_natural, feat::wake_other}, {feat::shift1, feat::shift3}};
        return g;
    }

    static bool in_onehot_group(size_t idx) {
        for (const auto& [lo, hi] : onehot_groups()) {
            if (idx >= lo && idx <= hi) return true;
        }
        return false;
    }

    // Features reported as categorical percentages in the cohort comparison.
    static bool is_categorical(size_t idx) {
        return idx == feat::time_to_fall_asleep_bin || idx == feat::alcohol_or_drug ||
               in_onehot_group(idx);
    }
};

struct DailyFeatureVector {
    std::string participant_id;
    Date date;
    Role role = Role::nurse;
    std::array<double, FeatureSchema::size> values{};
    std::array<bool, FeatureSchema::size> missing{};

    DailyFeatureVector() {
        values.fill(0.0);
        missing.fill(true);
    }

    void set(size_t idx, double v) {
        values[idx] = v;
        missing[idx] = false;
    }
};

namespace detail {

inline double total_steps(const MinuteStream& steps) {
    double t = 0.0;
    for (const auto& s : steps.values) t += s.value;
    return t;
}

struct DaySleepSummary {
    double duration = 0.0;
    double efficiency = 0.0;  // duration-weighted over the day's records
};

inline std::optional<DaySleepSummary> day_sleep_summary(const CohortData& cohort,
                                                        const std::string& pid, Date day) {
    const auto* recs = cohort.find_sleep(pid, day);
    if (recs == nullptr || recs->empty()) return std::nullopt;
    DaySleepSummary out;
    double weight = 0.0;
    for (const auto& r : *recs) {
        out.duration += r.duration_min;
        out.efficiency += r.efficiency * std::max(r.duration_min, 1.0);
        weight += std::max(r.duration_min, 1.0);
    }
    out.efficiency /= weight;
    return out;
}

inline void fill_rolling(DailyFeatureVector& fv, const std::vector<std::pair<Date, double>>& series,
                         Date day, const std::array<size_t, 6>& idx) {
    // idx: {mean7, sd7, mean5, sd5, mean3, sd3}
    const int windows[3] = {7, 5, 3};
    for (int w = 0; w < 3; ++w) {
        try {
            const RollingStats rs = rolling_stats(series, day, windows[w]);
            fv.set(idx[static_cast<size_t>(2 * w)], rs.mean);
            if (rs.sd) fv.set(idx[static_cast<size_t>(2 * w + 1)], *rs.sd);
        } catch (const NoHistory&) {
        }
    }
}

}  // namespace detail

// Assembles the schema-ordered vector for one participant-day. Sensor
// modalities may be absent or too sparse; those entries stay flagged missing
// and are imputed downstream. The survey is mandatory.
inline DailyFeatureVector build_daily_vector(const CohortData& cohort, const std::string& pid,
                                             Date day) {
    DailyFeatureVector fv;
    fv.participant_id = pid;
    fv.date = day;
    fv.role = cohort.role_of(pid);

    const SurveyDay* survey = cohort.find_survey(pid, day);
    if (survey == nullptr) {
        throw MissingSurvey("no survey for " + pid + " on " + day.to_string());
    }

    // heart rate
    if (const auto* hr = cohort.find_heart_rate(pid, day)) {
        try {
            const HeartRateFeatures f = heart_rate_day_features(*hr);
            fv.set(feat::hr_mean, f.mean);
            fv.set(feat::hr_sd, f.sd);
            if (f.sampen) fv.set(feat::hr_sampen, *f.sampen);
        } catch (const TooSparse&) {
        }
    }

    // sleep: same-day summary, regularity, rolling windows
    if (const auto summary = detail::day_sleep_summary(cohort, pid, day)) {
        fv.set(feat::sleep_duration, summary->duration);
        fv.set(feat::sleep_efficiency, summary->efficiency);
    }
    try {
        fv.set(feat::sleep_regularity, sleep_regularity(build_sleep_grid(cohort, pid, day)));
    } catch (const InsufficientCoverage&) {
    }
    {
        std::vector<std::pair<Date, double>> dur_series, eff_series;
        for (int back = 1; back <= 7; ++back) {
            const Date d = day - back;
            if (const auto s = detail::day_sleep_summary(cohort, pid, d)) {
                dur_series.push_back({d, s->duration});
                eff_series.push_back({d, s->efficiency});
            }
        }
        detail::fill_rolling(fv, dur_series, day,
                             {feat::sleep_dur_mean_7, feat::sleep_dur_sd_7, feat::sleep_dur_mean_5,
                              feat::sleep_dur_sd_5, feat::sleep_dur_mean_3, feat::sleep_dur_sd_3});
        detail::fill_rolling(fv, eff_series, day,
                             {feat::sleep_eff_mean_7, feat::sleep_eff_sd_7, feat::sleep_eff_mean_5,
                              feat::sleep_eff_sd_5, feat::sleep_eff_mean_3, feat::sleep_eff_sd_3});
    }

    // steps: daily total, rolling windows, segment entropies
    if (const auto* st = cohort.find_steps(pid, day)) {
        fv.set(feat::steps_total, detail::total_steps(*st));
        const SleepMask mask = day_sleep_mask(cohort, pid, day);
        const auto [stationary, active] = extract_segments(*st, mask);
        try {
            fv.set(feat::entropy_stationary, information_entropy(stationary));
        } catch (const EmptyHistogram&) {
        }
        try {
            fv.set(feat::entropy_active, information_entropy(active));
        } catch (const EmptyHistogram&) {
        }
    }
    {
        std::vector<std::pair<Date, double>> steps_series;
        for (int back = 1; back <= 7; ++back) {
            const Date d = day - back;
            if (const auto* st = cohort.find_steps(pid, d)) {
                steps_series.push_back({d, detail::total_steps(*st)});
            }
        }
        detail::fill_rolling(fv, steps_series, day,
                             {feat::steps_mean_7, feat::steps_sd_7, feat::steps_mean_5,
                              feat::steps_sd_5, feat::steps_mean_3, feat::steps_sd_3});
    }

    // survey
    fv.set(feat::time_to_fall_asleep_bin, static_cast<double>(survey->time_to_fall_asleep_bin));
    fv.set(feat::wake_natural, survey->wake_type == WakeType::natural ? 1.0 : 0.0);
    fv.set(feat::wake_alarm, survey->wake_type == WakeType::alarm ? 1.0 : 0.0);
    fv.set(feat::wake_other, survey->wake_type == WakeType::other ? 1.0 : 0.0);
    fv.set(feat::nap_count, static_cast<double>(survey->nap_count));
    fv.set(feat::nap_duration, survey->nap_duration_min);
    fv.set(feat::shift1, survey->work_shift == WorkShift::shift1 ? 1.0 : 0.0);
    fv.set(feat::shift2, survey->work_shift == WorkShift::shift2 ? 1.0 : 0.0);
    fv.set(feat::shift3, survey->work_shift == WorkShift::shift3 ? 1.0 : 0.0);
    fv.set(feat::work_duration, survey->work_duration_hr);
    fv.set(feat::overwork, survey->overwork_min);
    fv.set(feat::caffeine_cups, static_cast<double>(survey->caffeine_cups));
    fv.set(feat::alcohol_or_drug, survey->alcohol_or_drug ? 1.0 : 0.0);

    for (size_t i = 0; i < FeatureSchema::size; ++i) {
        if (!fv.missing[i] && !std::isfinite(fv.values[i])) {
            throw Error("non-finite feature '" + FeatureSchema::names()[i] + "' for " + pid);
        }
    }
    return fv;
}

// One row per survey day, ordered by (participant, date).
inline std::vector<DailyFeatureVector> build_feature_table(const CohortData& cohort) {
    std::vector<DailyFeatureVector> rows;
    rows.reserve(cohort.surveys.size());
    for (const auto& [key, survey] : cohort.surveys) {
        rows.push_back(build_daily_vector(cohort, key.first, Date(key.second)));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// features.csv
// ---------------------------------------------------------------------------

inline void write_features_csv(const std::filesystem::path& path,
                               const std::vector<DailyFeatureVector>& rows) {
    CsvTable t;
    t.header = {"participant_id", "date", "role"};
    for (const auto& n : FeatureSchema::names()) t.header.push_back(n);
    for (const auto& n : FeatureSchema::names()) t.header.push_back(n + "_missing");
    for (const auto& fv : rows) {
        std::vector<std::string> row;
        row.reserve(t.header.size());
        row.push_back(fv.participant_id);
        row.push_back(fv.date.to_string());
        row.push_back(to_string(fv.role));
        for (size_t i = 0; i < FeatureSchema::size; ++i) {
            row.push_back(fv.missing[i] ? "" : format_double(fv.values[i]));
        }
        for (size_t i = 0; i < FeatureSchema::size; ++i) {
            row.push_back(fv.missing[i] ? "1" : "0");
        }
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

inline std::vector<DailyFeatureVector> read_features_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const size_t expected = 3 + 2 * FeatureSchema::size;
    if (t.header.size() != expected) {
        throw DataError("'" + path.string() + "' has " + std::to_string(t.header.size()) +
                        " columns, expected " + std::to_string(expected));
    }
    for (size_t i = 0; i < FeatureSchema::size; ++i) {
        if (t.header[3 + i] != FeatureSchema::names()[i]) {
            throw DataError("'" + path.string() + "' column " + std::to_string(3 + i) +
                            " is '" + t.header[3 + i] + "', expected '" +
                            FeatureSchema::names()[i] + "'");
        }
    }
    std::vector<DailyFeatureVector> rows;
    rows.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        DailyFeatureVector fv;
        fv.participant_id = r[0];
        fv.date = Date::parse(r[1]);
        fv.role = role_from_string(r[2]);
        for (size_t i = 0; i < FeatureSchema::size; ++i) {
            const bool miss = r[3 + FeatureSchema::size + i] == "1";
            if (!miss) fv.set(i, parse_double(r[3 + i]));
        }
        rows.push_back(std::move(fv));
    }
    return rows;
}

}  // namespace wellbeing
