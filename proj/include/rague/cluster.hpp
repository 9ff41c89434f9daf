#pragma once

// Semantic-equivalence clustering of sampled responses and the
// semantic-entropy family.

#include <cmath>
#include <limits>

#include "rague/nli.hpp"
#include "rague/relations.hpp"
#include "rague/seqprob.hpp"

namespace rague {

struct ClusterAssignment {
    std::vector<int> cluster_of;  // one entry per sample, contiguous ids from 0
    int num_clusters = 0;
};

enum class EquivalenceMode {
    MergedNeutral,     // equivalent unless either order's argmax is contradiction
    StrictEntailment,  // both orders must argmax to entailment
};

namespace detail {

inline bool equivalent_pair(const std::string& a, const std::string& b,
                            NliScorer& nli, EquivalenceMode mode) {
    const NliVerdict fwd = nli.score(a, b).renormalized();
    const NliVerdict rev = nli.score(b, a).renormalized();
    if (mode == EquivalenceMode::StrictEntailment)
        return fwd.argmax() == NliVerdict::Class::Entailment &&
               rev.argmax() == NliVerdict::Class::Entailment;
    return fwd.argmax() != NliVerdict::Class::Contradiction &&
           rev.argmax() != NliVerdict::Class::Contradiction;
}

}  // namespace detail

/// Greedy single-pass clustering. Each sample joins the first cluster
/// whose representative (first member) is bidirectionally equivalent to
/// it under the question-conditioned NLI predicate; otherwise it opens a
/// new cluster. Membership decisions are applied in sample order, so the
/// assignment is deterministic for a fixed scorer.
inline ClusterAssignment cluster_responses(const GenerationBundle& bundle,
                                           const std::string& question,
                                           NliScorer& nli,
                                           EquivalenceMode mode = EquivalenceMode::MergedNeutral) {
    if (bundle.samples.empty()) throw EmptyBundle("cluster_responses needs samples");
    ClusterAssignment out;
    out.cluster_of.resize(bundle.samples.size(), -1);
    std::vector<std::size_t> representatives;  // sample index of each cluster's first member
    for (std::size_t i = 0; i < bundle.samples.size(); ++i) {
        const std::string text_i =
            concat_query_response(question, bundle.samples[i].text);
        int assigned = -1;
        for (std::size_t c = 0; c < representatives.size(); ++c) {
            const std::string rep =
                concat_query_response(question, bundle.samples[representatives[c]].text);
            const bool eq = bundle.samples[i].text == bundle.samples[representatives[c]].text ||
                            detail::equivalent_pair(rep, text_i, nli, mode);
            if (eq) {
                assigned = static_cast<int>(c);
                break;
            }
        }
        if (assigned < 0) {
            assigned = static_cast<int>(representatives.size());
            representatives.push_back(i);
        }
        out.cluster_of[i] = assigned;
    }
    out.num_clusters = static_cast<int>(representatives.size());
    return out;
}

/// Semantic entropy over the cluster assignment. Cluster mass is the sum
/// of member sequence probabilities, accumulated with log-sum-exp.
inline double semantic_entropy(const GenerationBundle& bundle,
                               const ClusterAssignment& assign,
                               const TokenWeightFunction& w) {
    if (assign.cluster_of.size() != bundle.samples.size())
        throw InvalidInput("assignment does not cover bundle samples");
    if (assign.num_clusters < 1) throw InvalidInput("empty assignment");
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> cluster_log_mass(static_cast<std::size_t>(assign.num_clusters),
                                         neg_inf);
    for (std::size_t i = 0; i < bundle.samples.size(); ++i) {
        const double lp = log_weighted_probability(bundle.samples[i], w);
        double& acc = cluster_log_mass[static_cast<std::size_t>(assign.cluster_of[i])];
        // log-sum-exp of two terms
        if (acc == neg_inf) {
            acc = lp;
        } else {
            const double hi = std::max(acc, lp), lo = std::min(acc, lp);
            acc = hi + std::log1p(std::exp(lo - hi));
        }
    }
    double sum = 0.0;
    for (double lm : cluster_log_mass) {
        if (lm == neg_inf)
            throw DegenerateCluster("cluster with zero total probability");
        sum += lm;
    }
    return -sum / static_cast<double>(assign.num_clusters);
}

inline int num_sets(const ClusterAssignment& assign) { return assign.num_clusters; }

}  // namespace rague
