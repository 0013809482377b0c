#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"
#include "wellbeing/distributions.hpp"
#include "wellbeing/features.hpp"

namespace wellbeing {

struct GroupSummary {
    std::string label;
    size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
};

struct TestResult {
    std::string test_name;
    double statistic = 0.0;
    double p_value = 1.0;
    std::vector<GroupSummary> groups;
};

struct GroupSample {
    std::string label;
    std::vector<double> observations;

    GroupSummary summary() const {
        return {label, observations.size(), mean_of(observations), sample_sd(observations)};
    }
};

// ---------------------------------------------------------------------------
// Two-sample tests
// ---------------------------------------------------------------------------

// Welch's t with Welch-Satterthwaite degrees of freedom; two-sided p.
inline TestResult welch_t(const GroupSample& a, const GroupSample& b) {
    const size_t na = a.observations.size(), nb = b.observations.size();
    if (na < 2 || nb < 2) throw Error("welch_t needs >= 2 observations per group");
    const double ma = mean_of(a.observations), mb = mean_of(b.observations);
    const double sa = sample_sd(a.observations), sb = sample_sd(b.observations);
    const double va = sa * sa / static_cast<double>(na);
    const double vb = sb * sb / static_cast<double>(nb);
    if (va + vb == 0.0) throw DegenerateVariance("both groups have zero variance");
    const double t = (ma - mb) / std::sqrt(va + vb);
    const double df = (va + vb) * (va + vb) /
                      (va * va / static_cast<double>(na - 1) + vb * vb / static_cast<double>(nb - 1));
    TestResult res;
    res.test_name = "welch_t";
    res.statistic = t;
    res.p_value = student_t_sf2(t, df);
    res.groups = {a.summary(), b.summary()};
    return res;
}

namespace detail {

// midranks over the pooled sample; returns (rank sum of group a, tie term sum(t^3-t))
inline std::pair<double, double> rank_sum_a(const std::vector<double>& a,
                                            const std::vector<double>& b) {
    struct Tagged {
        double v;
        bool from_a;
    };
    std::vector<Tagged> all;
    all.reserve(a.size() + b.size());
    for (double v : a) all.push_back({v, true});
    for (double v : b) all.push_back({v, false});
    std::stable_sort(all.begin(), all.end(),
                     [](const Tagged& x, const Tagged& y) { return x.v < y.v; });

    double ra = 0.0, tie_term = 0.0;
    size_t i = 0;
    while (i < all.size()) {
        size_t j = i;
        while (j < all.size() && all[j].v == all[i].v) ++j;
        const double tied = static_cast<double>(j - i);
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (size_t k = i; k < j; ++k) {
            if (all[k].from_a) ra += midrank;
        }
        if (tied > 1.0) tie_term += tied * tied * tied - tied;
        i = j;
    }
    return {ra, tie_term};
}

}  // namespace detail

// Mann-Whitney U with midrank ties; p from the normal approximation with tie
// and continuity corrections. The reported statistic is U for group a.
inline TestResult mann_whitney_u(const GroupSample& a, const GroupSample& b) {
    const double na = static_cast<double>(a.observations.size());
    const double nb = static_cast<double>(b.observations.size());
    if (na < 1 || nb < 1) throw Error("mann_whitney_u needs >= 1 observation per group");
    const auto [ra, tie_term] = detail::rank_sum_a(a.observations, b.observations);
    const double ua = ra - na * (na + 1.0) / 2.0;

    const double n = na + nb;
    const double mean_u = na * nb / 2.0;
    const double var_u = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));

    TestResult res;
    res.test_name = "mann_whitney_u";
    res.statistic = ua;
    res.groups = {a.summary(), b.summary()};
    if (var_u <= 0.0) {
        res.p_value = 1.0;  // every observation tied
        return res;
    }
    const double diff = ua - mean_u;
    const double cc = diff > 0.0 ? -0.5 : (diff < 0.0 ? 0.5 : 0.0);
    const double z = (diff + cc) / std::sqrt(var_u);
    res.p_value = std::min(1.0, 2.0 * normal_cdf(-std::fabs(z)));
    return res;
}

// Pearson chi-square on an r x c contingency table.
inline TestResult chi_square(const std::vector<std::vector<double>>& table) {
    const size_t r = table.size();
    if (r < 2) throw Error("chi_square needs >= 2 rows");
    const size_t c = table[0].size();
    if (c < 2) throw Error("chi_square needs >= 2 columns");

    std::vector<double> row_tot(r, 0.0), col_tot(c, 0.0);
    double grand = 0.0;
    for (size_t i = 0; i < r; ++i) {
        if (table[i].size() != c) throw Error("ragged contingency table");
        for (size_t j = 0; j < c; ++j) {
            if (table[i][j] < 0.0) throw Error("negative count");
            row_tot[i] += table[i][j];
            col_tot[j] += table[i][j];
            grand += table[i][j];
        }
    }
    double stat = 0.0;
    for (size_t i = 0; i < r; ++i) {
        for (size_t j = 0; j < c; ++j) {
            const double expected = row_tot[i] * col_tot[j] / grand;
            if (expected <= 0.0) throw ZeroExpected("expected count is zero");
            const double d = table[i][j] - expected;
            stat += d * d / expected;
        }
    }
    TestResult res;
    res.test_name = "chi_square";
    res.statistic = stat;
    res.p_value = chi2_sf(stat, static_cast<double>((r - 1) * (c - 1)));
    return res;
}

struct PearsonResult {
    double r = 0.0;
    double p_value = 1.0;
    double r_squared = 0.0;
};

inline PearsonResult pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ShapeMismatch("pearson_r needs equal lengths");
    const size_t n = x.size();
    if (n < 3) throw Error("pearson_r needs n >= 3");
    const double mx = mean_of(x), my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateVariance("constant input to pearson_r");
    PearsonResult res;
    res.r = sxy / std::sqrt(sxx * syy);
    res.r = std::clamp(res.r, -1.0, 1.0);
    res.r_squared = res.r * res.r;
    const double one_minus = 1.0 - res.r_squared;
    if (one_minus <= 0.0) {
        res.p_value = 0.0;
    } else {
        const double t = res.r * std::sqrt(static_cast<double>(n - 2) / one_minus);
        res.p_value = student_t_sf2(t, static_cast<double>(n - 2));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk (Royston's AS R94 approximation) and the normality gate
// ---------------------------------------------------------------------------

struct ShapiroResult {
    double w = 0.0;
    double p_value = 0.0;
};

inline ShapiroResult shapiro_wilk(std::vector<double> x) {
    const size_t n = x.size();
    if (n < 3) throw TooFewSamples("shapiro_wilk needs n >= 3");
    if (n > 5000) throw Error("shapiro_wilk approximation unreliable above n = 5000");
    std::sort(x.begin(), x.end());
    if (x.front() == x.back()) throw DegenerateVariance("zero range");

    const size_t nn2 = n / 2;
    std::vector<double> a(nn2 + 1, 0.0);  // 1-based
    const double an = static_cast<double>(n);

    if (n == 3) {
        a[1] = 0.70710678118654752;
    } else {
        double summ2 = 0.0;
        for (size_t i = 1; i <= nn2; ++i) {
            a[i] = normal_quantile((static_cast<double>(i) - 0.375) / (an + 0.25));
            summ2 += a[i] * a[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        auto poly = [](const double* c, int nord, double v) {
            double s = c[0];
            double p = 1.0;
            for (int k = 1; k < nord; ++k) {
                p *= v;
                s += c[k] * p;
            }
            return s;
        };
        static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
        static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
        const double a1 = poly(c1, 6, rsn) - a[1] / ssumm2;
        size_t i1;
        double fac;
        if (n > 5) {
            i1 = 3;
            const double a2 = -a[2] / ssumm2 + poly(c2, 6, rsn);
            fac = std::sqrt((summ2 - 2.0 * a[1] * a[1] - 2.0 * a[2] * a[2]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[2] = a2;
        } else {
            i1 = 2;
            fac = std::sqrt((summ2 - 2.0 * a[1] * a[1]) / (1.0 - 2.0 * a1 * a1));
        }
        a[1] = a1;
        for (size_t i = i1; i <= nn2; ++i) a[i] = -a[i] / fac;
    }

    // W = (sum_i a_i (x_(n+1-i) - x_(i)))^2 / sum (x - mean)^2
    const double mean = mean_of(x);
    double ssq = 0.0;
    for (double v : x) ssq += (v - mean) * (v - mean);
    double num = 0.0;
    for (size_t i = 1; i <= nn2; ++i) num += a[i] * (x[n - i] - x[i - 1]);
    const double w = std::min(1.0, num * num / ssq);

    ShapiroResult res;
    res.w = w;
    if (n == 3) {
        constexpr double pi6 = 1.90985931710274;
        constexpr double stqr = 1.04719755119660;
        res.p_value = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
        return res;
    }
    double m, mu, sigma;
    if (n <= 11) {
        const double gamma = -2.273 + 0.459 * an;
        m = -std::log(gamma - std::log1p(-w));
        mu = 0.5440 - 0.39978 * an + 0.025054 * an * an - 6.714e-4 * an * an * an;
        sigma = std::exp(1.3822 - 0.77857 * an + 0.062767 * an * an - 0.0020322 * an * an * an);
    } else {
        const double ln = std::log(an);
        m = std::log1p(-w);
        mu = -1.5861 - 0.31082 * ln - 0.083751 * ln * ln + 0.0038915 * ln * ln * ln;
        sigma = std::exp(-0.4803 - 0.082676 * ln + 0.0030302 * ln * ln);
    }
    res.p_value = std::clamp(1.0 - normal_cdf((m - mu) / sigma), 0.0, 1.0);
    return res;
}

enum class Normality { normal, non_normal };

// Routes a feature to Welch's t (normal) or Mann-Whitney (non-normal) at
// alpha = 0.05. Constant samples route to non_normal.
inline Normality normality_gate(const std::vector<double>& x) {
    if (x.size() < 8) throw TooFewSamples("normality_gate needs n >= 8");
    try {
        return shapiro_wilk(x).p_value >= 0.05 ? Normality::normal : Normality::non_normal;
    } catch (const DegenerateVariance&) {
        return Normality::non_normal;
    }
}

// ---------------------------------------------------------------------------
// One-way ANOVA with Tukey HSD pairwise comparisons
// ---------------------------------------------------------------------------

struct AnovaTukeyResult {
    double f_statistic = 0.0;
    double p_value = 1.0;
    std::vector<std::string> group_labels;
    std::vector<double> group_means;
    std::vector<std::vector<double>> pairwise_p;  // k x k, unit diagonal
};

inline AnovaTukeyResult anova_tukey(const std::vector<GroupSample>& groups) {
    const size_t k = groups.size();
    if (k < 2) throw Error("anova_tukey needs >= 2 groups");
    size_t total_n = 0;
    for (const auto& g : groups) {
        if (g.observations.size() < 2) {
            throw DegenerateGroups("group '" + g.label + "' has < 2 observations");
        }
        total_n += g.observations.size();
    }

    double grand = 0.0;
    for (const auto& g : groups) {
        for (double v : g.observations) grand += v;
    }
    grand /= static_cast<double>(total_n);

    double ss_between = 0.0, ss_within = 0.0;
    std::vector<double> means(k);
    for (size_t i = 0; i < k; ++i) {
        means[i] = mean_of(groups[i].observations);
        const double ni = static_cast<double>(groups[i].observations.size());
        ss_between += ni * (means[i] - grand) * (means[i] - grand);
        for (double v : groups[i].observations) {
            ss_within += (v - means[i]) * (v - means[i]);
        }
    }
    const double df_between = static_cast<double>(k - 1);
    const double df_within = static_cast<double>(total_n - k);
    if (ss_within == 0.0 && ss_between == 0.0) {
        throw DegenerateGroups("all observations identical");
    }

    AnovaTukeyResult res;
    for (const auto& g : groups) res.group_labels.push_back(g.label);
    res.group_means = means;
    res.pairwise_p.assign(k, std::vector<double>(k, 1.0));

    if (ss_within == 0.0) throw DegenerateGroups("zero within-group variance");
    const double ms_within = ss_within / df_within;
    res.f_statistic = (ss_between / df_between) / ms_within;
    res.p_value = f_sf(res.f_statistic, df_between, df_within);

    // Tukey-Kramer: q = |mi - mj| / sqrt(MSw/2 (1/ni + 1/nj))
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = i + 1; j < k; ++j) {
            const double ni = static_cast<double>(groups[i].observations.size());
            const double nj = static_cast<double>(groups[j].observations.size());
            const double se = std::sqrt(0.5 * ms_within * (1.0 / ni + 1.0 / nj));
            const double q = std::fabs(means[i] - means[j]) / se;
            const double p = std::clamp(
                studentized_range_sf(q, static_cast<int>(k), df_within), 0.0, 1.0);
            res.pairwise_p[i][j] = res.pairwise_p[j][i] = p;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Nurse-vs-doctor feature comparison (the Table-2-style report)
// ---------------------------------------------------------------------------

struct FeatureComparison {
    std::string feature;
    bool categorical = false;
    // numeric summaries
    GroupSummary nurse, doctor;
    // categorical summaries: level name -> percent within role
    std::vector<std::string> level_names;
    std::vector<double> nurse_pct, doctor_pct;
    std::string test_name;
    double statistic = 0.0;
    std::optional<double> p_value;  // absent when no valid test exists
};

struct ComparisonReport {
    std::vector<FeatureComparison> rows;
};

namespace detail {

struct CategoricalSpec {
    std::string feature;
    std::vector<std::string> level_names;
    // returns level index or -1 when unavailable
    std::function<int(const DailyFeatureVector&)> level_of;
};

inline std::vector<CategoricalSpec> categorical_specs() {
    std::vector<CategoricalSpec> specs;
    specs.push_back({"time_to_fall_asleep_bin",
                     {"0-5min", "6-15min", "16-30min", "31-45min", "45-60min", "60+min"},
                     [](const DailyFeatureVector& fv) {
                         if (fv.missing[feat::time_to_fall_asleep_bin]) return -1;
                         return static_cast<int>(fv.values[feat::time_to_fall_asleep_bin]);
                     }});
    specs.push_back({"wake_type",
                     {"natural", "alarm", "other"},
                     [](const DailyFeatureVector& fv) {
                         if (fv.missing[feat::wake_natural]) return -1;
                         if (fv.values[feat::wake_natural] > 0.5) return 0;
                         if (fv.values[feat::wake_alarm] > 0.5) return 1;
                         if (fv.values[feat::wake_other] > 0.5) return 2;
                         return -1;
                     }});
    specs.push_back({"work_shift",
                     {"shift1", "shift2", "shift3", "none"},
                     [](const DailyFeatureVector& fv) {
                         if (fv.missing[feat::shift1]) return -1;
                         if (fv.values[feat::shift1] > 0.5) return 0;
                         if (fv.values[feat::shift2] > 0.5) return 1;
                         if (fv.values[feat::shift3] > 0.5) return 2;
                         return 3;
                     }});
    specs.push_back({"alcohol_or_drug",
                     {"no", "yes"},
                     [](const DailyFeatureVector& fv) {
                         if (fv.missing[feat::alcohol_or_drug]) return -1;
                         return fv.values[feat::alcohol_or_drug] > 0.5 ? 1 : 0;
                     }});
    return specs;
}

}  // namespace detail

// Per-feature mean (SD) per role with the routed test for numeric features,
// and per-level percentages with a chi-square test for categorical ones.
inline ComparisonReport compare_groups(const std::vector<DailyFeatureVector>& rows) {
    bool has_nurse = false, has_doctor = false;
    for (const auto& fv : rows) {
        (fv.role == Role::nurse ? has_nurse : has_doctor) = true;
    }
    if (!has_nurse || !has_doctor) throw SingleGroup("need both roles to compare");

    ComparisonReport report;

    for (size_t f = 0; f < FeatureSchema::size; ++f) {
        if (FeatureSchema::is_categorical(f)) continue;
        GroupSample nurse{"nurse", {}}, doctor{"doctor", {}};
        for (const auto& fv : rows) {
            if (fv.missing[f]) continue;
            (fv.role == Role::nurse ? nurse : doctor).observations.push_back(fv.values[f]);
        }
        FeatureComparison fc;
        fc.feature = FeatureSchema::names()[f];
        fc.nurse = nurse.summary();
        fc.doctor = doctor.summary();
        if (nurse.observations.size() < 2 || doctor.observations.size() < 2) {
            fc.test_name = "none";
            report.rows.push_back(std::move(fc));
            continue;
        }
        bool both_normal = false;
        if (nurse.observations.size() >= 8 && doctor.observations.size() >= 8) {
            both_normal = normality_gate(nurse.observations) == Normality::normal &&
                          normality_gate(doctor.observations) == Normality::normal;
        }
        try {
            const TestResult tr = both_normal ? welch_t(nurse, doctor) : mann_whitney_u(nurse, doctor);
            fc.test_name = tr.test_name;
            fc.statistic = tr.statistic;
            fc.p_value = tr.p_value;
        } catch (const DegenerateVariance&) {
            const TestResult tr = mann_whitney_u(nurse, doctor);
            fc.test_name = tr.test_name;
            fc.statistic = tr.statistic;
            fc.p_value = tr.p_value;
        }
        report.rows.push_back(std::move(fc));
    }

    for (const auto& spec : detail::categorical_specs()) {
        std::vector<double> nurse_counts(spec.level_names.size(), 0.0);
        std::vector<double> doctor_counts(spec.level_names.size(), 0.0);
        for (const auto& fv : rows) {
            const int lvl = spec.level_of(fv);
            if (lvl < 0 || lvl >= static_cast<int>(spec.level_names.size())) continue;
            (fv.role == Role::nurse ? nurse_counts : doctor_counts)[static_cast<size_t>(lvl)] += 1.0;
        }
        FeatureComparison fc;
        fc.feature = spec.feature;
        fc.categorical = true;
        const double ntot = std::accumulate(nurse_counts.begin(), nurse_counts.end(), 0.0);
        const double dtot = std::accumulate(doctor_counts.begin(), doctor_counts.end(), 0.0);
        std::vector<std::vector<double>> table(2);
        for (size_t l = 0; l < spec.level_names.size(); ++l) {
            if (nurse_counts[l] + doctor_counts[l] == 0.0) continue;  // unobserved level
            fc.level_names.push_back(spec.level_names[l]);
            fc.nurse_pct.push_back(ntot > 0.0 ? 100.0 * nurse_counts[l] / ntot : 0.0);
            fc.doctor_pct.push_back(dtot > 0.0 ? 100.0 * doctor_counts[l] / dtot : 0.0);
            table[0].push_back(nurse_counts[l]);
            table[1].push_back(doctor_counts[l]);
        }
        if (table[0].size() >= 2 && ntot > 0.0 && dtot > 0.0) {
            try {
                const TestResult tr = chi_square(table);
                fc.test_name = tr.test_name;
                fc.statistic = tr.statistic;
                fc.p_value = tr.p_value;
            } catch (const ZeroExpected&) {
                fc.test_name = "none";
            }
        } else {
            fc.test_name = "none";
        }
        report.rows.push_back(std::move(fc));
    }

    return report;
}

// ---------------------------------------------------------------------------
// Label correlation matrix
// ---------------------------------------------------------------------------

struct LabelCorrelationMatrix {
    std::array<std::array<double, 5>, 5> r{};
    std::array<std::array<double, 5>, 5> r_squared{};
    std::array<std::array<double, 5>, 5> p_value{};
};

inline LabelCorrelationMatrix label_correlation_matrix(
    const std::vector<std::array<double, 5>>& label_rows) {
    if (label_rows.size() < 3) throw InsufficientRows("need >= 3 complete label rows");
    LabelCorrelationMatrix m;
    for (size_t i = 0; i < 5; ++i) {
        m.r[i][i] = 1.0;
        m.r_squared[i][i] = 1.0;
        m.p_value[i][i] = 0.0;
    }
    for (size_t i = 0; i < 5; ++i) {
        for (size_t j = i + 1; j < 5; ++j) {
            std::vector<double> x, y;
            x.reserve(label_rows.size());
            y.reserve(label_rows.size());
            for (const auto& row : label_rows) {
                x.push_back(row[i]);
                y.push_back(row[j]);
            }
            const PearsonResult pr = pearson_r(x, y);
            m.r[i][j] = m.r[j][i] = pr.r;
            m.r_squared[i][j] = m.r_squared[j][i] = pr.r_squared;
            m.p_value[i][j] = m.p_value[j][i] = pr.p_value;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Small symmetric eigen solver (cyclic Jacobi), used for PSD checks
// ---------------------------------------------------------------------------

inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> m) {
    const size_t n = m.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) off += m[i][j] * m[i][j];
        }
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (std::fabs(m[p][q]) < 1e-18) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (size_t i = 0; i < n; ++i) eig[i] = m[i][i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline CsvTable comparison_to_csv(const ComparisonReport& report) {
    CsvTable t;
    t.header = {"feature", "kind", "level", "nurse_mean", "nurse_sd", "doctor_mean",
                "doctor_sd", "nurse_pct", "doctor_pct", "test", "statistic", "p_value"};
    for (const auto& fc : report.rows) {
        const std::string stat = fc.test_name == "none" ? "" : format_double(fc.statistic);
        const std::string p = fc.p_value ? format_double(*fc.p_value) : "";
        if (!fc.categorical) {
            t.rows.push_back({fc.feature, "numeric", "", format_double(fc.nurse.mean),
                              format_double(fc.nurse.sd), format_double(fc.doctor.mean),
                              format_double(fc.doctor.sd), "", "", fc.test_name, stat, p});
        } else {
            for (size_t l = 0; l < fc.level_names.size(); ++l) {
                t.rows.push_back({fc.feature, "categorical", fc.level_names[l], "", "", "", "",
                                  format_double(fc.nurse_pct[l]), format_double(fc.doctor_pct[l]),
                                  fc.test_name, stat, p});
            }
        }
    }
    return t;
}

inline std::string comparison_to_text(const ComparisonReport& report) {
    std::ostringstream out;
    auto fmt_num = [](double v, double sd) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.1f (%.1f)", v, sd);
        return std::string(buf);
    };
    auto fmt_p = [](const std::optional<double>& p) {
        if (!p) return std::string("-");
        if (*p < 0.001) return std::string("<0.001");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", *p);
        return std::string(buf);
    };
    out << "feature                      nurse            doctor           test             p\n";
    out << "-------------------------------------------------------------------------------------\n";
    char line[256];
    for (const auto& fc : report.rows) {
        if (!fc.categorical) {
            std::snprintf(line, sizeof(line), "%-28s %-16s %-16s %-16s %s\n", fc.feature.c_str(),
                          fmt_num(fc.nurse.mean, fc.nurse.sd).c_str(),
                          fmt_num(fc.doctor.mean, fc.doctor.sd).c_str(), fc.test_name.c_str(),
                          fmt_p(fc.p_value).c_str());
            out << line;
        } else {
            std::snprintf(line, sizeof(line), "%-28s %-16s %-16s %-16s %s\n", fc.feature.c_str(),
                          "", "", fc.test_name.c_str(), fmt_p(fc.p_value).c_str());
            out << line;
            for (size_t l = 0; l < fc.level_names.size(); ++l) {
                char pctn[32], pctd[32];
                std::snprintf(pctn, sizeof(pctn), "%.1f%%", fc.nurse_pct[l]);
                std::snprintf(pctd, sizeof(pctd), "%.1f%%", fc.doctor_pct[l]);
                std::snprintf(line, sizeof(line), "  - %-24s %-16s %-16s\n",
                              fc.level_names[l].c_str(), pctn, pctd);
                out << line;
            }
        }
    }
    return out.str();
}

}  // namespace wellbeing
