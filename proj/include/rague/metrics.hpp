#pragma once

// Correctness labeling, AUROC, and accuracy aggregates. AUROC treats
// uncertainty as a predictor of incorrectness: the returned value is the
// probability that an incorrect sample ranks above a correct one, ties
// counting half.

#include <algorithm>

#include "rague/core.hpp"
#include "rague/relations.hpp"

namespace rague {

struct LabeledScore {
    double uncertainty = 0.0;
    bool correct = false;
};

/// Exact match of the most-likely response against any gold alias.
inline bool correctness(const TokenizedResponse& most_likely,
                        const std::vector<std::string>& gold_answers) {
    if (gold_answers.empty()) throw NoReference("correctness needs gold answers");
    return matches_any(most_likely.text, gold_answers);
}

/// Rank-sum AUROC with average ranks for ties.
inline double auroc(const std::vector<LabeledScore>& scores) {
    std::size_t n_pos = 0, n_neg = 0;  // pos = incorrect (the event predicted)
    for (const auto& s : scores) {
        if (!std::isfinite(s.uncertainty)) throw InvalidScore("non-finite uncertainty");
        (s.correct ? n_neg : n_pos)++;
    }
    if (n_pos == 0 || n_neg == 0)
        throw Undefined("auroc needs both correct and incorrect samples");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a].uncertainty < scores[b].uncertainty;
    });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() &&
               scores[order[j]].uncertainty == scores[order[i]].uncertainty)
            ++j;
        const double avg_rank = static_cast<double>(i + 1 + j) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (!scores[order[k]].correct) rank_sum_pos += avg_rank;
        i = j;
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

/// Fraction of records whose most-likely response for `condition` is
/// correct. Records lacking the requested bundle are skipped.
inline double accuracy(const std::vector<QueryRecord>& records, Condition condition) {
    if (records.empty()) throw EmptyInput("accuracy over empty record list");
    std::size_t total = 0, correct_count = 0;
    for (const auto& rec : records) {
        const GenerationBundle* b =
            condition == Condition::NoRag ? &rec.no_rag : (rec.rag ? &*rec.rag : nullptr);
        if (!b) continue;
        ++total;
        if (correctness(b->most_likely, rec.gold_answers)) ++correct_count;
    }
    if (total == 0) throw EmptyInput("no records carry the requested condition");
    return static_cast<double>(correct_count) / static_cast<double>(total);
}

}  // namespace rague
