#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wellbeing {

// ---------------------------------------------------------------------------
// Errors. One exception type per named failure mode so call sites and tests
// can catch precisely.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define WB_DEFINE_ERROR(NAME)                     \
    struct NAME : Error {                         \
        using Error::Error;                       \
    };

// timeseries_features
WB_DEFINE_ERROR(InsufficientData)
WB_DEFINE_ERROR(DegenerateSeries)
WB_DEFINE_ERROR(TooSparse)
WB_DEFINE_ERROR(EmptyHistogram)
WB_DEFINE_ERROR(InsufficientCoverage)
WB_DEFINE_ERROR(NoHistory)
WB_DEFINE_ERROR(UnknownParticipant)
WB_DEFINE_ERROR(MissingSurvey)
// cohort_stats
WB_DEFINE_ERROR(DegenerateVariance)
WB_DEFINE_ERROR(ZeroExpected)
WB_DEFINE_ERROR(TooFewSamples)
WB_DEFINE_ERROR(SingleGroup)
WB_DEFINE_ERROR(DegenerateGroups)
WB_DEFINE_ERROR(InsufficientRows)
WB_DEFINE_ERROR(DegenerateColumn)
// neural_core / mtml_model
WB_DEFINE_ERROR(ShapeMismatch)
WB_DEFINE_ERROR(InvalidClass)
WB_DEFINE_ERROR(UnknownRole)
WB_DEFINE_ERROR(EmptyBatch)
WB_DEFINE_ERROR(DivergenceDetected)
WB_DEFINE_ERROR(UntrainedModel)
WB_DEFINE_ERROR(InvalidVariant)
// experiment_harness
WB_DEFINE_ERROR(OutOfRange)
WB_DEFINE_ERROR(TooSmall)
// synth_cohort
WB_DEFINE_ERROR(InfeasibleSpec)
WB_DEFINE_ERROR(CalibrationFailure)
// cli
WB_DEFINE_ERROR(UsageError)
WB_DEFINE_ERROR(DataError)
WB_DEFINE_ERROR(ConfigError)

#undef WB_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Calendar dates. Stored as a serial day count so day arithmetic is an
// integer add; civil conversion uses the classic proleptic-Gregorian
// algorithm.
// ---------------------------------------------------------------------------

struct Date {
    // days since 1970-01-01
    int32_t serial = 0;

    constexpr Date() = default;
    constexpr explicit Date(int32_t s) : serial(s) {}

    static constexpr Date from_civil(int y, int m, int d) {
        y -= m <= 2;
        const int era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                             static_cast<unsigned>(d) - 1u;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return Date(era * 146097 + static_cast<int>(doe) - 719468);
    }

    constexpr void to_civil(int& y, int& m, int& d) const {
        int32_t z = serial + 719468;
        const int era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const int yy = static_cast<int>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
        m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
        y = yy + (m <= 2);
    }

    std::string to_string() const {
        int y, m, d;
        to_civil(y, m, d);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
        return buf;
    }

    static Date parse(std::string_view s) {
        int y = 0, m = 0, d = 0;
        if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
            std::from_chars(s.data(), s.data() + 4, y).ec != std::errc{} ||
            std::from_chars(s.data() + 5, s.data() + 7, m).ec != std::errc{} ||
            std::from_chars(s.data() + 8, s.data() + 10, d).ec != std::errc{}) {
            throw DataError("bad date '" + std::string(s) + "' (expected YYYY-MM-DD)");
        }
        if (m < 1 || m > 12 || d < 1 || d > 31) {
            throw DataError("bad date '" + std::string(s) + "'");
        }
        return from_civil(y, m, d);
    }

    friend constexpr bool operator==(Date a, Date b) { return a.serial == b.serial; }
    friend constexpr bool operator!=(Date a, Date b) { return a.serial != b.serial; }
    friend constexpr bool operator<(Date a, Date b) { return a.serial < b.serial; }
    friend constexpr bool operator<=(Date a, Date b) { return a.serial <= b.serial; }
    friend constexpr Date operator+(Date a, int days) { return Date(a.serial + days); }
    friend constexpr Date operator-(Date a, int days) { return Date(a.serial - days); }
    friend constexpr int operator-(Date a, Date b) { return a.serial - b.serial; }
};

// ---------------------------------------------------------------------------
// Seeded randomness. Every random draw in the project goes through Rng so
// results are reproducible and independent of the platform's distribution
// implementations (the mt19937_64 engine itself is fully specified; the
// standard distributions are not).
// ---------------------------------------------------------------------------

inline constexpr uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Named sub-seed derivation: all randomness flows from one master seed.
inline constexpr uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ fnv1a64(tag)) + index);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

    uint64_t next_u64() { return engine_(); }

    // uniform in [0, n); n > 0
    uint64_t below(uint64_t n) { return next_u64() % n; }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one fresh pair per two calls
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double mean) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -mean * std::log(u);
    }

    int poisson(double lambda) {
        // inversion; fine for the small means used here
        const double l = std::exp(-lambda);
        double p = 1.0;
        int k = 0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }

    // index drawn from unnormalized weights
    size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        for (size_t i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        // Fisher-Yates with our own bounded draw, for cross-platform determinism
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// ---------------------------------------------------------------------------
// Small numeric helpers shared across modules.
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// sample standard deviation, denominator n-1
inline double sample_sd(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline bool all_finite(const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

// 17 significant digits round-trip any double exactly
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw DataError("bad number '" + std::string(s) + "'");
    }
    return v;
}

inline int64_t parse_int(std::string_view s) {
    int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw DataError("bad integer '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace wellbeing
