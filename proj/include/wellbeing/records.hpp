#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"

namespace wellbeing {

enum class Role { nurse, doctor };
enum class StreamKind { heart_rate, steps };
enum class WakeType { natural, alarm, other };
enum class WorkShift { shift1, shift2, shift3, none };

inline std::string to_string(Role r) { return r == Role::nurse ? "nurse" : "doctor"; }

inline Role role_from_string(std::string_view s) {
    if (s == "nurse") return Role::nurse;
    if (s == "doctor") return Role::doctor;
    throw DataError("unknown role '" + std::string(s) + "'");
}

inline std::string to_string(WakeType w) {
    switch (w) {
        case WakeType::natural: return "natural";
        case WakeType::alarm: return "alarm";
        default: return "other";
    }
}

inline WakeType wake_type_from_string(std::string_view s) {
    if (s == "natural") return WakeType::natural;
    if (s == "alarm") return WakeType::alarm;
    if (s == "other") return WakeType::other;
    throw DataError("unknown wake_type '" + std::string(s) + "'");
}

inline std::string to_string(WorkShift w) {
    switch (w) {
        case WorkShift::shift1: return "shift1";
        case WorkShift::shift2: return "shift2";
        case WorkShift::shift3: return "shift3";
        default: return "none";
    }
}

inline WorkShift shift_from_string(std::string_view s) {
    if (s == "shift1") return WorkShift::shift1;
    if (s == "shift2") return WorkShift::shift2;
    if (s == "shift3") return WorkShift::shift3;
    if (s == "none") return WorkShift::none;
    throw DataError("unknown shift '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Raw per-day records
// ---------------------------------------------------------------------------

struct MinuteSample {
    int minute = 0;  // 0..1439
    double value = 0.0;
};

// One participant-day of minute-resolution samples (heart rate or steps).
struct MinuteStream {
    std::string participant_id;
    Date date;
    StreamKind kind = StreamKind::heart_rate;
    std::vector<MinuteSample> values;  // minute strictly increasing

    void validate() const {
        if (values.size() > 1440) throw DataError("more than 1440 samples in a day");
        int prev = -1;
        for (const auto& s : values) {
            if (s.minute <= prev || s.minute > 1439) {
                throw DataError("minute_of_day not strictly increasing in 0..1439");
            }
            if (!std::isfinite(s.value) || s.value < 0.0) {
                throw DataError("sample values must be finite and >= 0");
            }
            prev = s.minute;
        }
    }
};

struct SleepInterval {
    int start_min = 0;  // minute of day; start > end means the episode spans midnight
    int end_min = 0;
};

struct SleepRecord {
    std::string participant_id;
    Date date;  // wake-up day the episode is attributed to
    double duration_min = 0.0;
    double efficiency = 0.0;  // 0..100
    std::vector<SleepInterval> intervals;

    void validate() const {
        if (duration_min < 0.0) throw DataError("negative sleep duration");
        if (efficiency < 0.0 || efficiency > 100.0) throw DataError("sleep efficiency outside 0..100");
    }
};

struct SurveyDay {
    std::string participant_id;
    Date date;
    int time_to_fall_asleep_bin = 0;  // ordinal 0..5
    WakeType wake_type = WakeType::natural;
    int nap_count = 0;
    double nap_duration_min = 0.0;
    WorkShift work_shift = WorkShift::none;
    double work_duration_hr = 0.0;
    double overwork_min = 0.0;
    int caffeine_cups = 0;
    bool alcohol_or_drug = false;

    void validate() const {
        if (time_to_fall_asleep_bin < 0 || time_to_fall_asleep_bin > 5) {
            throw DataError("ttfa_bin outside 0..5");
        }
        if (nap_count < 0 || nap_duration_min < 0.0 || work_duration_hr < 0.0 ||
            overwork_min < 0.0 || caffeine_cups < 0) {
            throw DataError("negative survey quantity");
        }
    }
};

inline constexpr std::array<const char*, 5> kLabelNames = {
    "alertness", "happiness", "energy", "health", "stress"};

struct WellbeingLabels {
    std::string participant_id;
    Date date;
    std::array<double, 5> values{};  // each in [0,100]
};

// ---------------------------------------------------------------------------
// Cohort container: everything keyed by (participant, date)
// ---------------------------------------------------------------------------

struct CohortData {
    std::map<std::string, Role> participants;
    std::map<std::pair<std::string, int32_t>, MinuteStream> heart_rate;
    std::map<std::pair<std::string, int32_t>, MinuteStream> steps;
    std::map<std::pair<std::string, int32_t>, std::vector<SleepRecord>> sleep;
    std::map<std::pair<std::string, int32_t>, SurveyDay> surveys;
    std::map<std::pair<std::string, int32_t>, WellbeingLabels> labels;

    static std::pair<std::string, int32_t> key(const std::string& pid, Date d) {
        return {pid, d.serial};
    }

    Role role_of(const std::string& pid) const {
        const auto it = participants.find(pid);
        if (it == participants.end()) throw UnknownParticipant("participant '" + pid + "' not in registry");
        return it->second;
    }

    const MinuteStream* find_heart_rate(const std::string& pid, Date d) const {
        const auto it = heart_rate.find(key(pid, d));
        return it == heart_rate.end() ? nullptr : &it->second;
    }
    const MinuteStream* find_steps(const std::string& pid, Date d) const {
        const auto it = steps.find(key(pid, d));
        return it == steps.end() ? nullptr : &it->second;
    }
    const std::vector<SleepRecord>* find_sleep(const std::string& pid, Date d) const {
        const auto it = sleep.find(key(pid, d));
        return it == sleep.end() ? nullptr : &it->second;
    }
    const SurveyDay* find_survey(const std::string& pid, Date d) const {
        const auto it = surveys.find(key(pid, d));
        return it == surveys.end() ? nullptr : &it->second;
    }
};

// ---------------------------------------------------------------------------
// Bundle I/O. File schemas are fixed; see README for the column lists.
// ---------------------------------------------------------------------------

namespace detail {

inline void load_minutes(const std::filesystem::path& file, StreamKind kind,
                         std::map<std::pair<std::string, int32_t>, MinuteStream>& out) {
    const CsvTable t = read_csv(file);
    const size_t cp = t.col("participant_id"), cd = t.col("date"), cm = t.col("minute"),
                 cv = t.col(kind == StreamKind::heart_rate ? "bpm" : "steps");
    for (const auto& row : t.rows) {
        const Date d = Date::parse(row[cd]);
        auto& stream = out[{row[cp], d.serial}];
        if (stream.values.empty()) {
            stream.participant_id = row[cp];
            stream.date = d;
            stream.kind = kind;
        }
        stream.values.push_back({static_cast<int>(parse_int(row[cm])), parse_double(row[cv])});
    }
    for (auto& [k, stream] : out) {
        std::sort(stream.values.begin(), stream.values.end(),
                  [](const MinuteSample& a, const MinuteSample& b) { return a.minute < b.minute; });
        stream.validate();
    }
}

}  // namespace detail

inline CohortData load_cohort(const std::filesystem::path& dir, bool want_labels = false) {
    CohortData data;

    const CsvTable parts = read_csv(dir / "participants.csv");
    {
        const size_t cp = parts.col("participant_id"), cr = parts.col("role");
        for (const auto& row : parts.rows) data.participants[row[cp]] = role_from_string(row[cr]);
    }

    detail::load_minutes(dir / "hr.csv", StreamKind::heart_rate, data.heart_rate);
    detail::load_minutes(dir / "steps.csv", StreamKind::steps, data.steps);

    {
        const CsvTable t = read_csv(dir / "sleep.csv");
        const size_t cp = t.col("participant_id"), cd = t.col("date"), cs = t.col("start_min"),
                     ce = t.col("end_min"), cdur = t.col("duration_min"), ceff = t.col("efficiency");
        for (const auto& row : t.rows) {
            SleepRecord rec;
            rec.participant_id = row[cp];
            rec.date = Date::parse(row[cd]);
            rec.intervals.push_back({static_cast<int>(parse_int(row[cs])),
                                     static_cast<int>(parse_int(row[ce]))});
            rec.duration_min = parse_double(row[cdur]);
            rec.efficiency = parse_double(row[ceff]);
            rec.validate();
            data.sleep[CohortData::key(rec.participant_id, rec.date)].push_back(std::move(rec));
        }
    }

    {
        const CsvTable t = read_csv(dir / "survey.csv");
        const size_t cp = t.col("participant_id"), cd = t.col("date"), ct = t.col("ttfa_bin"),
                     cw = t.col("wake_type"), cn = t.col("nap_count"), cnm = t.col("nap_min"),
                     csh = t.col("shift"), cwh = t.col("work_hr"), co = t.col("overwork_min"),
                     cc = t.col("caffeine"), ca = t.col("alc_drug");
        for (const auto& row : t.rows) {
            SurveyDay s;
            s.participant_id = row[cp];
            s.date = Date::parse(row[cd]);
            s.time_to_fall_asleep_bin = static_cast<int>(parse_int(row[ct]));
            s.wake_type = wake_type_from_string(row[cw]);
            s.nap_count = static_cast<int>(parse_int(row[cn]));
            s.nap_duration_min = parse_double(row[cnm]);
            s.work_shift = shift_from_string(row[csh]);
            s.work_duration_hr = parse_double(row[cwh]);
            s.overwork_min = parse_double(row[co]);
            s.caffeine_cups = static_cast<int>(parse_int(row[cc]));
            s.alcohol_or_drug = parse_int(row[ca]) != 0;
            s.validate();
            data.surveys[CohortData::key(s.participant_id, s.date)] = std::move(s);
        }
    }

    if (want_labels) {
        const CsvTable t = read_csv(dir / "labels.csv");
        const size_t cp = t.col("participant_id"), cd = t.col("date");
        std::array<size_t, 5> cl{};
        for (size_t i = 0; i < 5; ++i) cl[i] = t.col(kLabelNames[i]);
        for (const auto& row : t.rows) {
            WellbeingLabels lab;
            lab.participant_id = row[cp];
            lab.date = Date::parse(row[cd]);
            for (size_t i = 0; i < 5; ++i) lab.values[i] = parse_double(row[cl[i]]);
            data.labels[CohortData::key(lab.participant_id, lab.date)] = std::move(lab);
        }
    }

    return data;
}

}  // namespace wellbeing
