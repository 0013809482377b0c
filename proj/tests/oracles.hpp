// Test-side reference implementations, kept independent of the library code
// paths they verify.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "wellbeing/features.hpp"
#include "wellbeing/neural.hpp"

namespace oracle {

// Naive O(N^2) sample entropy. Counts template matches separately for the
// m- and (m+1)-length windows with plain nested loops and strict '<'
// comparisons; windows for both lengths run over the first N-m starts, and
// self-matches are excluded. The per-window normalizations (N-m)(N-m-1)
// cancel in the ratio, so the value is -log(total_m1 / total_m).
inline double sample_entropy_naive(const std::vector<double>& x, int m, double r_factor) {
    const size_t n = x.size();
    const size_t t = n - static_cast<size_t>(m);

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double r = r_factor * std::sqrt(ss / static_cast<double>(n - 1));

    std::uint64_t count_m = 0;
    for (size_t i = 0; i < t; ++i) {
        for (size_t j = 0; j < t; ++j) {
            if (i == j) continue;
            double dist = 0.0;
            for (int k = 0; k < m; ++k) {
                dist = std::max(dist, std::fabs(x[i + static_cast<size_t>(k)] -
                                                x[j + static_cast<size_t>(k)]));
            }
            if (dist < r) ++count_m;
        }
    }
    std::uint64_t count_m1 = 0;
    for (size_t i = 0; i < t; ++i) {
        for (size_t j = 0; j < t; ++j) {
            if (i == j) continue;
            double dist = 0.0;
            for (int k = 0; k <= m; ++k) {
                dist = std::max(dist, std::fabs(x[i + static_cast<size_t>(k)] -
                                                x[j + static_cast<size_t>(k)]));
            }
            if (dist < r) ++count_m1;
        }
    }

    if (count_m1 == 0) {
        const double tt = static_cast<double>(t);
        return std::log(tt * (tt - 1.0));
    }
    return -std::log(static_cast<double>(count_m1) / static_cast<double>(count_m));
}

// Direct run-length encoding over a minute classification array
// (-1 excluded, 0 stationary, 1 active).
inline std::pair<std::map<int, std::uint64_t>, std::map<int, std::uint64_t>> run_lengths(
    const std::vector<int>& minute_class) {
    std::map<int, std::uint64_t> stationary, active;
    size_t i = 0;
    while (i < minute_class.size()) {
        if (minute_class[i] < 0) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < minute_class.size() && minute_class[j] == minute_class[i]) ++j;
        const int len = static_cast<int>(j - i);
        if (minute_class[i] == 0) stationary[len] += 1;
        else active[len] += 1;
        i = j;
    }
    return {stationary, active};
}

// Exhaustive agreement count over all 1440 x 6 aligned day pairs.
inline double sleep_regularity_paircount(const wellbeing::SleepMinuteGrid& grid) {
    std::uint64_t both = 0, agree = 0;
    for (int d = 0; d < 6; ++d) {
        for (int minute = 0; minute < 1440; ++minute) {
            const auto a = grid.states[static_cast<size_t>(d)][static_cast<size_t>(minute)];
            const auto b = grid.states[static_cast<size_t>(d + 1)][static_cast<size_t>(minute)];
            if (a == wellbeing::SleepState::missing || b == wellbeing::SleepState::missing) continue;
            ++both;
            if (a == b) ++agree;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(both);
}

// Plain per-element dot products for the layer forward passes.
inline wellbeing::Tensor2D conv_forward_naive(const std::vector<double>& kernels,
                                              const std::vector<double>& bias, size_t channels,
                                              size_t width, const wellbeing::Tensor2D& x,
                                              bool relu) {
    wellbeing::Tensor2D out(x.rows, channels);
    for (size_t r = 0; r < x.rows; ++r) {
        for (size_t c = 0; c < channels; ++c) {
            double acc = bias[c];
            for (size_t j = 0; j < width; ++j) acc += kernels[c * width + j] * x.at(r, j);
            out.at(r, c) = relu && acc < 0.0 ? 0.0 : acc;
        }
    }
    return out;
}

inline wellbeing::Tensor2D dense_forward_naive(const std::vector<double>& weights,
                                               const std::vector<double>& bias, size_t in,
                                               size_t out_dim, const wellbeing::Tensor2D& x,
                                               bool relu) {
    wellbeing::Tensor2D out(x.rows, out_dim);
    for (size_t r = 0; r < x.rows; ++r) {
        for (size_t o = 0; o < out_dim; ++o) {
            double acc = bias[o];
            for (size_t i = 0; i < in; ++i) acc += x.at(r, i) * weights[i * out_dim + o];
            out.at(r, o) = relu && acc < 0.0 ? 0.0 : acc;
        }
    }
    return out;
}

// Plain softmax cross-entropy with per-class weights (the gamma = 0 focal
// reference).
inline double weighted_cross_entropy(const wellbeing::Tensor2D& logits,
                                     const std::vector<int>& targets,
                                     const std::vector<double>& alpha) {
    double total = 0.0;
    for (size_t r = 0; r < logits.rows; ++r) {
        double zmax = logits.at(r, 0);
        for (size_t c = 1; c < logits.cols; ++c) zmax = std::max(zmax, logits.at(r, c));
        double sum = 0.0;
        for (size_t c = 0; c < logits.cols; ++c) sum += std::exp(logits.at(r, c) - zmax);
        const double logp = logits.at(r, static_cast<size_t>(targets[r])) - zmax - std::log(sum);
        const double a = alpha.empty() ? 1.0 : alpha[static_cast<size_t>(targets[r])];
        total -= a * logp;
    }
    return total / static_cast<double>(logits.rows);
}

}  // namespace oracle
