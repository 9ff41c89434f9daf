#pragma once

// Axiomatic calibration: the coefficient alpha = k1*E + k2*R(c,q,r1) +
// k3*R(c,q,r2), the calibrated score (k4 - alpha) * U, and grid-search
// fitting of (k1..k4) on a validation set.

#include <algorithm>
#include <array>
#include <cmath>

#include "rague/axioms.hpp"
#include "rague/core.hpp"
#include "rague/metrics.hpp"

namespace rague {

/// Continuous relation scores plus the uncalibrated RAG uncertainty for
/// one sample.
struct CalibrationInput {
    double e_score = 0.0;   // E(r1, r2), in [0,1]
    double r1_score = 0.0;  // R(c, q, r1), in [0,1]
    double r2_score = 0.0;  // R(c, q, r2), in [0,1]
    double u_rag = 0.0;
};

inline double alpha(const CalibrationInput& in, const CalibrationCoefficients& k) {
    return k.k1 * in.e_score + k.k2 * in.r1_score + k.k3 * in.r2_score;
}

/// Calibrated uncertainty (k4 - alpha) * u_rag. The multiplier is
/// floored at 0.01 so it never flips the sign of the score.
inline double calibrate(const CalibrationInput& in, const CalibrationCoefficients& k) {
    constexpr double kMultiplierFloor = 0.01;
    const double m = std::max(k.k4 - alpha(in, k), kMultiplierFloor);
    return m * in.u_rag;
}

struct GridSpec {
    std::vector<double> k1s, k2s, k3s, k4s;

    static GridSpec defaults() {
        GridSpec g;
        for (int i = 0; i <= 20; ++i) {
            const double v = static_cast<double>(i * 5) / 100.0;  // exact 0.05 steps
            g.k1s.push_back(v);
            g.k2s.push_back(v);
            g.k3s.push_back(v);
        }
        for (int i = 0; i <= 10; ++i)
            g.k4s.push_back(static_cast<double>(100 + i * 5) / 100.0);
        return g;
    }

    bool empty() const { return k1s.empty() || k2s.empty() || k3s.empty() || k4s.empty(); }
};

/// One validation sample: relation scores, axiom label (None allowed;
/// such samples contribute to AUROC only), correctness of the RAG
/// most-likely response, and the no-RAG uncertainty for direction checks.
struct ValidationSample {
    CalibrationInput input;
    Axiom axiom = Axiom::None;
    bool correct = false;
    double u_no_rag = 0.0;
};

namespace detail {

struct CandidateEval {
    double auroc_value = 0.0;
    std::array<double, 5> pass_pct{};  // indexed by axiom A1..A5
    std::array<std::size_t, 5> counts{};
    double total_pass_pct = 0.0;
    bool feasible = false;
};

inline CandidateEval evaluate_candidate(const std::vector<ValidationSample>& samples,
                                        const CalibrationCoefficients& k) {
    CandidateEval ev;
    std::array<std::size_t, 5> passed{};
    std::vector<LabeledScore> labeled;
    labeled.reserve(samples.size());
    std::size_t total_checked = 0, total_passed = 0;
    for (const auto& s : samples) {
        const double u_cal = calibrate(s.input, k);
        labeled.push_back({u_cal, s.correct});
        if (s.axiom == Axiom::None) continue;
        const auto idx = static_cast<std::size_t>(s.axiom);
        const AxiomCheck chk =
            check_sample({s.axiom, Instantiation::ReferenceBased}, s.u_no_rag, u_cal);
        ++ev.counts[idx];
        ++total_checked;
        if (chk.passed) {
            ++passed[idx];
            ++total_passed;
        }
    }
    for (std::size_t i = 0; i < 5; ++i)
        ev.pass_pct[i] = ev.counts[i] == 0
                             ? 100.0
                             : 100.0 * static_cast<double>(passed[i]) /
                                   static_cast<double>(ev.counts[i]);
    ev.total_pass_pct = total_checked == 0
                            ? 100.0
                            : 100.0 * static_cast<double>(total_passed) /
                                  static_cast<double>(total_checked);
    ev.auroc_value = auroc(labeled);
    return ev;
}

}  // namespace detail

/// Grid search over (k1, k2, k3, k4). Selects the candidate maximizing
/// AUROC among those whose per-axiom pass percentages each match or beat
/// the uncalibrated baseline; falls back to unconstrained max AUROC if
/// no candidate qualifies. Ties break toward higher total pass
/// percentage, then the lexicographically smallest (k1, k2, k3, k4).
inline CalibrationCoefficients fit_coefficients(
    const std::vector<ValidationSample>& validation,
    const GridSpec& grid = GridSpec::defaults()) {
    if (validation.empty()) throw InvalidInput("empty validation set");
    if (grid.empty()) throw InvalidInput("empty grid");
    const bool any_correct =
        std::any_of(validation.begin(), validation.end(),
                    [](const ValidationSample& s) { return s.correct; });
    const bool any_incorrect =
        std::any_of(validation.begin(), validation.end(),
                    [](const ValidationSample& s) { return !s.correct; });
    if (!any_correct || !any_incorrect)
        throw FitUndefined("validation set needs both correct and incorrect samples");

    const detail::CandidateEval baseline =
        detail::evaluate_candidate(validation, CalibrationCoefficients::identity());

    struct Best {
        bool set = false;
        bool feasible = false;
        double auroc_value = -1.0;
        double total_pass = -1.0;
        CalibrationCoefficients k;
    };
    auto better = [](bool cand_feasible, double cand_auroc, double cand_pass,
                     const CalibrationCoefficients& ck, const Best& best) {
        if (!best.set) return true;
        if (cand_feasible != best.feasible) return cand_feasible;
        if (cand_auroc != best.auroc_value) return cand_auroc > best.auroc_value;
        if (cand_pass != best.total_pass) return cand_pass > best.total_pass;
        const auto key = [](const CalibrationCoefficients& c) {
            return std::array<double, 4>{c.k1, c.k2, c.k3, c.k4};
        };
        return key(ck) < key(best.k);
    };

    Best best;
    for (double k1 : grid.k1s)
        for (double k2 : grid.k2s)
            for (double k3 : grid.k3s)
                for (double k4 : grid.k4s) {
                    CalibrationCoefficients k{k1, k2, k3, k4, CoeffSource::Fitted};
                    detail::CandidateEval ev = detail::evaluate_candidate(validation, k);
                    bool feasible = true;
                    for (std::size_t i = 0; i < 5; ++i)
                        if (ev.counts[i] > 0 && ev.pass_pct[i] < baseline.pass_pct[i])
                            feasible = false;
                    if (better(feasible, ev.auroc_value, ev.total_pass_pct, k, best)) {
                        best = {true, feasible, ev.auroc_value, ev.total_pass_pct, k};
                    }
                }
    return best.k;
}

}  // namespace rague
