#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wellbeing/core.hpp"

// Distribution functions used by the statistical tests. Incomplete beta and
// gamma follow the classic series/continued-fraction split (modified Lentz
// for the fractions); accuracy is ~1e-13 over the parameter ranges used here.

namespace wellbeing {

namespace detail {

constexpr double kCfEps = 1e-15;
constexpr int kCfMaxIter = 500;
constexpr double kFpMin = 1e-300;

inline double betacf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kCfMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfEps) break;
    }
    return h;
}

inline double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kCfMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kCfEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kCfMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b)
inline double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw Error("incomplete_beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::betacf(a, b, x) / a;
    return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

// Regularized lower incomplete gamma P(a, x)
inline double incomplete_gamma_p(double a, double x) {
    if (a <= 0.0) throw Error("incomplete_gamma needs a > 0");
    if (x < 0.0) throw Error("incomplete_gamma needs x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_series(a, x);
    return 1.0 - detail::gamma_cf(a, x);
}

inline double incomplete_gamma_q(double a, double x) {
    if (a <= 0.0) throw Error("incomplete_gamma needs a > 0");
    if (x < 0.0) throw Error("incomplete_gamma needs x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_series(a, x);
    return detail::gamma_cf(a, x);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / 2.5066282746310002;  // sqrt(2*pi)
}

// Wichura's AS 241 (PPND16): inverse of the standard normal CDF.
inline double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw Error("normal_quantile needs p in (0,1)");
    const double q = p - 0.5;
    double r, num, den;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                    6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                  1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                    3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                  5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

// Two-sided tail probability of Student's t with (possibly fractional) df.
inline double student_t_sf2(double t, double df) {
    if (df <= 0.0) throw Error("student_t_sf2 needs df > 0");
    if (t == 0.0) return 1.0;
    return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

inline double chi2_sf(double x, double df) {
    if (df <= 0.0) throw Error("chi2_sf needs df > 0");
    if (x <= 0.0) return 1.0;
    return incomplete_gamma_q(0.5 * df, 0.5 * x);
}

inline double f_sf(double f, double d1, double d2) {
    if (d1 <= 0.0 || d2 <= 0.0) throw Error("f_sf needs positive df");
    if (f <= 0.0) return 1.0;
    return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

namespace detail {

// 24-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric; positive half)
inline constexpr double kGl24Node[12] = {
    0.0640568928626056260850430826247450385909,
    0.1911188674736163091586398207570696318404,
    0.3150426796961633743867932913198102407864,
    0.4337935076260451384870842319133497124524,
    0.5454214713888395356583756172183723700107,
    0.6480936519369755692524957869107476266696,
    0.7401241915785543642438281030999784255232,
    0.8200019859739029219539498726697452080761,
    0.8864155270044010342131543419821967550873,
    0.9382745520027327585236490017087214496548,
    0.9747285559713094981983919930081690617411,
    0.9951872199970213601799974097007368118745};
inline constexpr double kGl24Weight[12] = {
    0.1279381953467521569740561652246953718517,
    0.1258374563468282961213753825111836887264,
    0.1216704729278033912044631534762624256070,
    0.1155056680537256013533444839067835598622,
    0.1074442701159656347825773424466062227946,
    0.0976186521041138882698806644642471544279,
    0.0861901615319532759171852029837426671850,
    0.0733464814110803057340336152531165181193,
    0.0592985849154367807463677585001085845412,
    0.0442774388174198061686027482113382288593,
    0.0285313886289336631813078159518782864491,
    0.0123412297999871995468056670700372915759};

template <typename F>
inline double gauss_legendre(F f, double lo, double hi) {
    const double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double dx = h * kGl24Node[i];
        s += kGl24Weight[i] * (f(c + dx) + f(c - dx));
    }
    return s * h;
}

// CDF of the range of k independent standard normals.
inline double normal_range_cdf(double w, int k) {
    if (w <= 0.0) return 0.0;
    auto integrand = [w, k](double z) {
        const double span = normal_cdf(z) - normal_cdf(z - w);
        return normal_pdf(z) * std::pow(span, k - 1);
    };
    double total = 0.0;
    const double lo = -8.0, hi = 8.0;
    const int panels = 8;
    for (int i = 0; i < panels; ++i) {
        const double a = lo + (hi - lo) * i / panels;
        const double b = lo + (hi - lo) * (i + 1) / panels;
        total += gauss_legendre(integrand, a, b);
    }
    return std::min(1.0, k * total);
}

}  // namespace detail

// CDF of the studentized range Q = range / S with k groups and df degrees of
// freedom in S. Evaluated by integrating the range CDF against the chi
// (scaled sample SD) density.
inline double studentized_range_cdf(double q, int k, double df) {
    if (k < 2) throw Error("studentized range needs k >= 2");
    if (q <= 0.0) return 0.0;
    if (df > 5000.0) return detail::normal_range_cdf(q, k);

    const double half_df = 0.5 * df;
    const double log_norm = std::log(2.0) + half_df * (std::log(df) - std::log(2.0)) -
                            std::lgamma(half_df);
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double log_density = log_norm + (df - 1.0) * std::log(u) - 0.5 * df * u * u;
        return std::exp(log_density) * detail::normal_range_cdf(q * u, k);
    };

    // The chi density has mean ~1 and width ~1/sqrt(2*df); cover it generously.
    const double spread = 12.0 / std::sqrt(2.0 * df);
    const double lo = std::max(0.0, 1.0 - spread);
    const double hi = 1.0 + std::max(spread, 3.0 / std::sqrt(df)) + (df < 10.0 ? 3.0 : 0.0);
    double total = 0.0;
    const int panels = 10;
    for (int i = 0; i < panels; ++i) {
        const double a = lo + (hi - lo) * i / panels;
        const double b = lo + (hi - lo) * (i + 1) / panels;
        total += detail::gauss_legendre(integrand, a, b);
    }
    return std::min(1.0, std::max(0.0, total));
}

inline double studentized_range_sf(double q, int k, double df) {
    return 1.0 - studentized_range_cdf(q, k, df);
}

}  // namespace wellbeing
