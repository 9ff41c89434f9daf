#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "rague/stats.hpp"

using namespace rague;
using Catch::Matchers::WithinAbs;

namespace {

// Oracle: brute-force enumeration of all 2^n sign assignments over the
// average ranks, independent of the implementation's dynamic program.
double exact_p_oracle(const std::vector<double>& diffs) {
    std::vector<double> abs_d;
    for (double d : diffs)
        if (d != 0.0) abs_d.push_back(std::abs(d));
    const std::size_t n = abs_d.size();
    if (n == 0) return 1.0;

    // average ranks
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && abs_d[order[j]] == abs_d[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k)
            rank[order[k]] = static_cast<double>(i + 1 + j) / 2.0;
        i = j;
    }

    double w_obs = 0.0;
    std::size_t idx = 0;
    for (double d : diffs) {
        if (d == 0.0) continue;
        if (d > 0) w_obs += rank[idx];
        ++idx;
    }

    std::size_t le = 0, ge = 0;
    const std::size_t total = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t b = 0; b < n; ++b)
            if (mask & (std::size_t{1} << b)) w += rank[b];
        if (w <= w_obs + 1e-12) ++le;
        if (w >= w_obs - 1e-12) ++ge;
    }
    const double p = 2.0 * std::min(le, ge) / static_cast<double>(total);
    return std::min(1.0, p);
}

}  // namespace

TEST_CASE("n=6 all-positive deltas: exact two-sided p = 0.03125") {
    std::vector<double> before(6, 0.0), after;
    for (int i = 1; i <= 6; ++i) after.push_back(0.1 * i);
    const auto res = wilcoxon_signed_rank(before, after);
    CHECK_THAT(res.p, WithinAbs(0.03125, 1e-15));
    CHECK(res.n_nonzero == 6);
    CHECK_FALSE(res.degenerate);
}

TEST_CASE("all-zero differences are degenerate with p = 1") {
    const std::vector<double> v{1.0, 2.0, 3.0};
    const auto res = wilcoxon_signed_rank(v, v);
    CHECK(res.degenerate);
    CHECK(res.p == 1.0);
}

TEST_CASE("implementation matches exhaustive sign-enumeration oracle") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> len(1, 10);
    std::uniform_int_distribution<int> step(-4, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = len(rng);
        std::vector<double> before(static_cast<std::size_t>(n)), after;
        std::vector<double> diffs;
        for (int i = 0; i < n; ++i) {
            const double d = 0.25 * step(rng);  // induces ties and zeros
            diffs.push_back(d);
            after.push_back(before[static_cast<std::size_t>(i)] + d);
        }
        bool all_zero = std::all_of(diffs.begin(), diffs.end(),
                                    [](double d) { return d == 0.0; });
        const auto res = wilcoxon_signed_rank(before, after);
        if (all_zero) {
            CHECK(res.degenerate);
            continue;
        }
        CHECK_THAT(res.p, WithinAbs(exact_p_oracle(diffs), 1e-12));
    }
}

TEST_CASE("large-n normal approximation is sane") {
    std::mt19937 rng(23);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> before, after;
    for (int i = 0; i < 60; ++i) {
        const double b = noise(rng);
        before.push_back(b);
        after.push_back(b + 1.0 + 0.1 * noise(rng));  // strong positive shift
    }
    const auto shifted = wilcoxon_signed_rank(before, after);
    CHECK(shifted.p < 0.001);

    std::vector<double> same_dist;
    for (int i = 0; i < 60; ++i) same_dist.push_back(before[static_cast<std::size_t>(i)] +
                                                     0.01 * noise(rng));
    const auto null_case = wilcoxon_signed_rank(before, same_dist);
    CHECK(null_case.p > 0.01);
    CHECK(null_case.p <= 1.0);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(wilcoxon_signed_rank({}, {}), InvalidInput);
    CHECK_THROWS_AS(wilcoxon_signed_rank({1.0}, {1.0, 2.0}), InvalidInput);
    CHECK_THROWS_AS(wilcoxon_signed_rank({1.0}, {std::nan("")}), InvalidScore);
}
