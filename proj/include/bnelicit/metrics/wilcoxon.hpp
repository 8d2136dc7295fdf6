#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "bnelicit/errors.hpp"

namespace bnelicit::metrics {

/// Result of a two-sided Wilcoxon signed-rank test. `statistic` is
/// W = min(W+, W-). Zero differences are dropped before ranking; when every
/// difference is zero the result is flagged degenerate with p = 1.
struct WilcoxonResult {
    double statistic = 0.0;
    double p_two_sided = 1.0;
    size_t n_effective = 0;
    bool degenerate = false;
    bool exact = false; // exact sign-flip enumeration vs normal approximation
};

namespace wilcoxon_detail {

/// Average ranks of |d|, ties sharing the mean of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& absd) {
    const size_t n = absd.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return absd[a] < absd[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && absd[order[j + 1]] == absd[order[i]]) ++j;
        double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

/// P(W+ <= w) by dynamic programming over doubled ranks (average ranks are
/// multiples of 1/2, so doubling makes them integers).
inline double exact_cdf_le(const std::vector<double>& ranks, double w) {
    std::vector<int> r2;
    int total2 = 0;
    for (double r : ranks) {
        int v = static_cast<int>(std::llround(r * 2.0));
        r2.push_back(v);
        total2 += v;
    }
    std::vector<std::uint64_t> ways(static_cast<size_t>(total2) + 1, 0);
    ways[0] = 1;
    for (int v : r2)
        for (int s = total2; s >= v; --s) ways[static_cast<size_t>(s)] += ways[static_cast<size_t>(s - v)];
    const long long w2 = std::llround(w * 2.0);
    std::uint64_t count = 0;
    for (long long s = 0; s <= w2 && s <= total2; ++s) count += ways[static_cast<size_t>(s)];
    return static_cast<double>(count) / std::pow(2.0, static_cast<double>(ranks.size()));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace wilcoxon_detail

/// Two-sided Wilcoxon signed-rank test on paired samples. Exact sign-flip
/// enumeration (p = 2 P(W+ <= W), capped at 1) when the effective sample
/// size is at most `exact_limit`; otherwise a normal approximation with
/// continuity and tie corrections.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs,
                                           size_t exact_limit = 14) {
    std::vector<double> d;
    for (const auto& [a, b] : pairs) {
        double diff = a - b;
        if (diff != 0.0) d.push_back(diff);
    }
    WilcoxonResult res;
    res.n_effective = d.size();
    if (d.empty()) {
        res.degenerate = true;
        res.p_two_sided = 1.0;
        return res;
    }

    std::vector<double> absd;
    for (double x : d) absd.push_back(std::fabs(x));
    auto ranks = wilcoxon_detail::average_ranks(absd);

    double wplus = 0.0, wminus = 0.0;
    for (size_t i = 0; i < d.size(); ++i)
        (d[i] > 0 ? wplus : wminus) += ranks[i];
    res.statistic = std::min(wplus, wminus);

    const size_t n = d.size();
    if (n <= exact_limit) {
        res.exact = true;
        res.p_two_sided = std::min(1.0, 2.0 * wilcoxon_detail::exact_cdf_le(ranks, res.statistic));
    } else {
        double mu = static_cast<double>(n) * (n + 1) / 4.0;
        double var = static_cast<double>(n) * (n + 1) * (2.0 * n + 1) / 24.0;
        // tie correction
        std::vector<double> sorted = absd;
        std::sort(sorted.begin(), sorted.end());
        size_t i = 0;
        while (i < sorted.size()) {
            size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            var -= (t * t * t - t) / 48.0;
            i = j + 1;
        }
        double z = (res.statistic - mu + 0.5) / std::sqrt(var);
        res.p_two_sided = std::min(1.0, 2.0 * wilcoxon_detail::normal_cdf(z));
    }
    return res;
}

} // namespace bnelicit::metrics
