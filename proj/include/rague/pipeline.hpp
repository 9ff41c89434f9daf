#pragma once

// Record-level orchestration shared by the CLI subcommands and the
// end-to-end tests: per-method scoring, axiom reports, calibration, and
// evaluation tables.

#include <map>
#include <optional>
#include <sstream>

#include "rague/axioms.hpp"
#include "rague/calibration.hpp"
#include "rague/cluster.hpp"
#include "rague/core.hpp"
#include "rague/metrics.hpp"
#include "rague/relations.hpp"
#include "rague/spectral.hpp"

namespace rague {

enum class RelationBackendKind { Cti, Nli, Grounding };

inline std::string to_string(RelationBackendKind k) {
    switch (k) {
        case RelationBackendKind::Cti: return "cti";
        case RelationBackendKind::Nli: return "nli";
        case RelationBackendKind::Grounding: return "grounding";
    }
    return "?";
}

struct ScoringConfig {
    std::vector<Method> methods;
    double ecc_threshold = 0.9;
    EquivalenceMode cluster_mode = EquivalenceMode::MergedNeutral;
};

struct ScoreRow {
    std::string record_id;
    Method method;
    Condition condition;
    double value = 0.0;
    bool calibrated = false;
};

namespace detail {

// Meaning-aware weights: per-response supplied weights when the record
// carries them, length normalization otherwise.
inline TokenWeightFunction meaning_weights(const GenerationBundle& bundle) {
    const bool all_have_weights =
        !bundle.samples.empty() &&
        std::all_of(bundle.samples.begin(), bundle.samples.end(),
                    [](const TokenizedResponse& r) { return r.weights.has_value(); });
    if (all_have_weights) return {TokenWeightFunction::Kind::Supplied, std::nullopt};
    return TokenWeightFunction::length_normalized();
}

}  // namespace detail

/// Compute every requested method for one bundle. NLI-dependent methods
/// (SE, SE_M, NumSet, spectral) share one cluster assignment and one
/// similarity matrix per bundle.
inline std::vector<ScoreRow> score_bundle(const QueryRecord& rec,
                                          const GenerationBundle& bundle,
                                          const ScoringConfig& cfg, NliScorer& nli) {
    std::vector<ScoreRow> rows;
    std::optional<ClusterAssignment> assign;
    std::optional<SimilarityGraph> graph;
    auto need_cluster = [&]() -> const ClusterAssignment& {
        if (!assign)
            assign = cluster_responses(bundle, rec.question, nli, cfg.cluster_mode);
        return *assign;
    };
    auto need_graph = [&]() -> const SimilarityGraph& {
        if (!graph)
            graph = build_similarity_graph(similarity_matrix(bundle, rec.question, nli));
        return *graph;
    };
    for (Method m : cfg.methods) {
        double value = 0.0;
        switch (m) {
            case Method::PE:
                value = predictive_entropy(bundle, TokenWeightFunction::unit());
                break;
            case Method::PE_M:
                value = predictive_entropy(bundle, detail::meaning_weights(bundle));
                break;
            case Method::SE:
                value = semantic_entropy(bundle, need_cluster(),
                                         TokenWeightFunction::unit());
                break;
            case Method::SE_M:
                value = semantic_entropy(bundle, need_cluster(),
                                         detail::meaning_weights(bundle));
                break;
            case Method::EigV: value = eigv_score(need_graph()); break;
            case Method::Deg: value = deg_score(need_graph()); break;
            case Method::ECC: value = ecc_score(need_graph(), cfg.ecc_threshold); break;
            case Method::NumSet:
                value = static_cast<double>(num_sets(need_cluster()));
                break;
        }
        rows.push_back({rec.id, m, bundle.condition, value, false});
    }
    return rows;
}

struct ScoreTable {
    std::vector<ScoreRow> rows;

    std::optional<double> find(const std::string& id, Method m, Condition c,
                               bool calibrated = false) const {
        for (const auto& r : rows)
            if (r.record_id == id && r.method == m && r.condition == c &&
                r.calibrated == calibrated)
                return r.value;
        return std::nullopt;
    }
};

inline ScoreTable score_records(const std::vector<QueryRecord>& records,
                                const ScoringConfig& cfg, NliScorer& nli) {
    ScoreTable table;
    for (const auto& rec : records) {
        auto no_rag_rows = score_bundle(rec, rec.no_rag, cfg, nli);
        table.rows.insert(table.rows.end(), no_rag_rows.begin(), no_rag_rows.end());
        if (rec.rag) {
            auto rag_rows = score_bundle(rec, *rec.rag, cfg, nli);
            table.rows.insert(table.rows.end(), rag_rows.begin(), rag_rows.end());
        }
    }
    return table;
}

/// Continuous relation scores for calibration, per the configured
/// backend. CTI needs per-token distributions on the record; NLI and
/// grounding need the respective scorer.
struct RelationScores {
    double e_score = 0.0;
    double r1_score = 0.0;
    double r2_score = 0.0;
};

inline RelationScores relation_scores(const QueryRecord& rec,
                                      RelationBackendKind backend, NliScorer& nli,
                                      GroundingScorer* grounding = nullptr,
                                      const CtiConfig& cti_cfg = {}) {
    if (!rec.rag || !rec.context) throw NotPaired("record is not a paired RAG record");
    const std::string& r1 = rec.no_rag.most_likely.text;
    const std::string& r2 = rec.rag->most_likely.text;
    RelationScores out;
    out.e_score = equivalence_nli(r1, r2, nli);
    switch (backend) {
        case RelationBackendKind::Nli:
            out.r1_score = relation_nli(rec.context->text, rec.question, r1, nli).score;
            out.r2_score = relation_nli(rec.context->text, rec.question, r2, nli).score;
            break;
        case RelationBackendKind::Grounding:
            if (!grounding) throw ScorerUnavailable("no grounding scorer configured");
            out.r1_score =
                relation_grounding(rec.context->text, rec.question, r1, *grounding);
            out.r2_score =
                relation_grounding(rec.context->text, rec.question, r2, *grounding);
            break;
        case RelationBackendKind::Cti: {
            if (!rec.cti)
                throw InvalidInput("record '" + rec.id +
                                   "' has no CTI distributions");
            out.r2_score = relation_cti(rec.cti->with_context,
                                        rec.cti->without_context, cti_cfg);
            // r1 distributions are optional; fall back to the r2 score
            // when the record carries only one decode.
            out.r1_score = rec.cti->r1_with_context.empty()
                               ? out.r2_score
                               : relation_cti(rec.cti->r1_with_context,
                                              rec.cti->r1_without_context, cti_cfg);
            break;
        }
    }
    return out;
}

inline CalibrationCoefficients paper_defaults_for(RelationBackendKind backend) {
    return backend == RelationBackendKind::Cti
               ? CalibrationCoefficients::paper_default_cti()
               : CalibrationCoefficients::paper_default_nli();
}

/// FNV-1a hash of a canonical config string; stamped into every emitted
/// report for provenance.
inline std::string config_hash(const std::string& canonical) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(canonical)));
    return buf;
}

}  // namespace rague
