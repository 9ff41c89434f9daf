#pragma once

// Two-sided Wilcoxon signed-rank test on paired values. Zero differences
// are dropped; ties get average ranks. Exact null distribution (dynamic
// program over signed rank sums) for n <= 25, normal approximation with
// continuity and tie correction above.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rague/errors.hpp"

namespace rague {

struct WilcoxonResult {
    double p = 1.0;
    double w_plus = 0.0;   // sum of positive-difference ranks
    int n_nonzero = 0;
    bool degenerate = false;  // all differences zero
};

namespace detail {

// Average ranks for |d|, scaled by 2 so ties stay integral.
inline std::vector<std::int64_t> double_ranks(const std::vector<double>& abs_d) {
    const std::size_t n = abs_d.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
    std::vector<std::int64_t> r2(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && abs_d[order[j]] == abs_d[order[i]]) ++j;
        // tied block [i, j): average rank = (i+1 + j)/2, doubled = i+1+j
        const std::int64_t avg2 = static_cast<std::int64_t>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) r2[order[k]] = avg2;
        i = j;
    }
    return r2;
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace detail

inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& before,
                                           const std::vector<double>& after) {
    if (before.size() != after.size() || before.empty())
        throw InvalidInput("wilcoxon: paired vectors must be non-empty and equal length");
    std::vector<double> diffs;
    diffs.reserve(before.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        const double d = after[i] - before[i];
        if (!std::isfinite(d)) throw InvalidScore("wilcoxon: non-finite difference");
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult res;
    res.n_nonzero = static_cast<int>(diffs.size());
    if (diffs.empty()) {
        res.degenerate = true;
        res.p = 1.0;
        return res;
    }
    std::vector<double> abs_d(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) abs_d[i] = std::abs(diffs[i]);
    const std::vector<std::int64_t> r2 = detail::double_ranks(abs_d);

    std::int64_t w2_plus = 0;  // doubled W+
    std::int64_t total2 = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        total2 += r2[i];
        if (diffs[i] > 0) w2_plus += r2[i];
    }
    res.w_plus = static_cast<double>(w2_plus) / 2.0;

    const std::size_t n = diffs.size();
    if (n <= 25) {
        // exact: count sign assignments by doubled rank sum
        std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
        count[0] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<std::size_t>(r2[i]);
            for (std::size_t s = count.size(); s-- > r;) count[s] += count[s - r];
        }
        const double denom = std::ldexp(1.0, static_cast<int>(n));  // 2^n
        double p_le = 0.0, p_ge = 0.0;
        for (std::size_t s = 0; s < count.size(); ++s) {
            if (static_cast<std::int64_t>(s) <= w2_plus) p_le += count[s];
            if (static_cast<std::int64_t>(s) >= w2_plus) p_ge += count[s];
        }
        res.p = std::min(1.0, 2.0 * std::min(p_le, p_ge) / denom);
    } else {
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        // tie correction: subtract sum(t^3 - t)/48 per tied group
        std::vector<double> sorted_abs = abs_d;
        std::sort(sorted_abs.begin(), sorted_abs.end());
        std::size_t i = 0;
        while (i < sorted_abs.size()) {
            std::size_t j = i;
            while (j < sorted_abs.size() && sorted_abs[j] == sorted_abs[i]) ++j;
            const double t = static_cast<double>(j - i);
            var -= (t * t * t - t) / 48.0;
            i = j;
        }
        const double w = static_cast<double>(w2_plus) / 2.0;
        const double cc = w > mean ? -0.5 : (w < mean ? 0.5 : 0.0);
        const double z = (w - mean + cc) / std::sqrt(var);
        res.p = std::min(1.0, 2.0 * detail::normal_sf(std::abs(z)));
    }
    return res;
}

}  // namespace rague
