#pragma once

// The relation functions: equivalence E(r1, r2) between two responses
// and context relation R(c, q, r), with three backends (CTI token-level
// KL, NLI entailment, grounding scorer), plus the pairwise similarity
// matrix consumed by the spectral estimators.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "rague/core.hpp"
#include "rague/nli.hpp"

namespace rague {

enum class RelationClass { Entailment, Contradiction };

/// `score` is the continuous value used by calibration; `cls` is the
/// discretization used by axiom checks (entailment and neutral merged).
struct RelationVerdict {
    RelationClass cls = RelationClass::Entailment;
    double score = 0.0;
};

struct CtiConfig {
    int top_k_vocab = 20;
    double tau = 0.1;  // KL threshold, nats
};

/// Lowercase, strip punctuation, collapse whitespace.
inline std::string normalize_answer(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (std::isspace(c) || std::ispunct(c)) {
            pending_space = true;
        }
    }
    return out;
}

/// Exact match on normalized token sequences.
inline bool equivalence_em(const std::string& r1, const std::string& r2) {
    return normalize_answer(r1) == normalize_answer(r2);
}

/// EM against an alias set; any match counts.
inline bool matches_any(const std::string& r, const std::vector<std::string>& golds) {
    return std::any_of(golds.begin(), golds.end(),
                       [&](const std::string& g) { return equivalence_em(r, g); });
}

/// Continuous equivalence: maximum entailment probability over both
/// premise/hypothesis orders. Symmetric by construction.
inline double equivalence_nli(const std::string& r1, const std::string& r2,
                              NliScorer& nli) {
    const NliVerdict fwd = nli.score(r1, r2).renormalized();
    const NliVerdict rev = nli.score(r2, r1).renormalized();
    return std::max(fwd.p_entail, rev.p_entail);
}

inline std::string concat_query_response(const std::string& q, const std::string& r) {
    return q + " " + r;
}

/// R(c, q, r) via NLI: premise is the context, hypothesis is "<q> <r>".
/// Both orders are scored; contradiction in either order wins, otherwise
/// entailment (merged entailment+neutral). Score is the max-order
/// entailment probability.
inline RelationVerdict relation_nli(const std::string& c, const std::string& q,
                                    const std::string& r, NliScorer& nli) {
    if (c.empty()) throw InvalidInput("relation_nli: empty context");
    const std::string hyp = concat_query_response(q, r);
    const NliVerdict fwd = nli.score(c, hyp).renormalized();
    const NliVerdict rev = nli.score(hyp, c).renormalized();
    RelationVerdict v;
    v.score = std::max(fwd.p_entail, rev.p_entail);
    const bool contra = fwd.argmax() == NliVerdict::Class::Contradiction ||
                        rev.argmax() == NliVerdict::Class::Contradiction;
    v.cls = contra ? RelationClass::Contradiction : RelationClass::Entailment;
    return v;
}

namespace detail {

// Restrict both distributions to the union of their top-k tokens,
// floor absent/zero mass at 1e-10, renormalize, return KL(p || q).
inline double topk_union_kl(const std::map<std::string, double>& with_ctx,
                            const std::map<std::string, double>& without_ctx,
                            int top_k) {
    auto top_tokens = [top_k](const std::map<std::string, double>& d) {
        std::vector<std::pair<double, std::string>> v;
        v.reserve(d.size());
        for (const auto& [tok, p] : d) v.emplace_back(p, tok);
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        if (static_cast<int>(v.size()) > top_k) v.resize(static_cast<std::size_t>(top_k));
        return v;
    };
    std::set<std::string> support;
    for (const auto& [p, tok] : top_tokens(with_ctx)) support.insert(tok);
    for (const auto& [p, tok] : top_tokens(without_ctx)) support.insert(tok);

    constexpr double kFloor = 1e-10;
    auto lookup = [](const std::map<std::string, double>& d, const std::string& tok) {
        auto it = d.find(tok);
        return it == d.end() ? 0.0 : std::max(it->second, 0.0);
    };
    std::vector<double> p, q;
    double ps = 0.0, qs = 0.0;
    for (const auto& tok : support) {
        const double pv = std::max(lookup(with_ctx, tok), kFloor);
        const double qv = std::max(lookup(without_ctx, tok), kFloor);
        p.push_back(pv);
        q.push_back(qv);
        ps += pv;
        qs += qv;
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i] / ps, qi = q[i] / qs;
        kl += pi * std::log(pi / qi);
    }
    return std::max(kl, 0.0);
}

}  // namespace detail

/// Context-sensitive token identification: fraction of positions whose
/// with/without-context distribution divergence exceeds tau.
/// Output lies on the grid {0, 1/N, ..., 1}.
inline double relation_cti(const std::vector<std::map<std::string, double>>& dist_with,
                           const std::vector<std::map<std::string, double>>& dist_without,
                           const CtiConfig& cfg = {}) {
    if (dist_with.empty() || dist_with.size() != dist_without.size())
        throw InvalidInput("relation_cti: distribution length mismatch or empty");
    std::size_t selected = 0;
    for (std::size_t n = 0; n < dist_with.size(); ++n) {
        const double m = detail::topk_union_kl(dist_with[n], dist_without[n],
                                               cfg.top_k_vocab);
        if (m > cfg.tau) ++selected;
    }
    return static_cast<double>(selected) / static_cast<double>(dist_with.size());
}

/// MiniCheck-style grounding relation: the scorer's value for claim
/// "<q> <r>" against document c, clamped to [0,1].
inline double relation_grounding(const std::string& c, const std::string& q,
                                 const std::string& r, GroundingScorer& scorer) {
    if (c.empty()) throw InvalidInput("relation_grounding: empty context");
    const double s = scorer.score(c, concat_query_response(q, r));
    return std::clamp(s, 0.0, 1.0);
}

/// Raw pairwise entailment matrix over the bundle's samples: a_ij is the
/// entailment probability of "<q> <r_j>" given premise "<q> <r_i>";
/// diagonal fixed at 1. Symmetrization happens downstream.
inline Eigen::MatrixXd similarity_matrix(const GenerationBundle& bundle,
                                         const std::string& question,
                                         NliScorer& nli) {
    const auto b = static_cast<Eigen::Index>(bundle.samples.size());
    if (b < 2) throw InvalidInput("similarity_matrix needs at least 2 samples");
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(b, b);
    for (Eigen::Index i = 0; i < b; ++i) {
        const std::string premise =
            concat_query_response(question, bundle.samples[static_cast<std::size_t>(i)].text);
        for (Eigen::Index j = 0; j < b; ++j) {
            if (i == j) continue;
            const std::string hyp = concat_query_response(
                question, bundle.samples[static_cast<std::size_t>(j)].text);
            a(i, j) = nli.score(premise, hyp).renormalized().p_entail;
        }
    }
    return a;
}

}  // namespace rague
