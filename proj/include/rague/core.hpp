#pragma once

// Domain types shared across the library. All types are plain immutable
// value types; construct once, share freely across threads.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rague/errors.hpp"

namespace rague {

enum class Condition { NoRag, Rag };

/// One generated answer with its per-token natural-log probabilities.
/// `weights` carries optional externally supplied token importance
/// weights (MARS/TokenSAR style); they are inputs, never computed here.
struct TokenizedResponse {
    std::string text;
    std::vector<std::string> tokens;
    std::vector<double> logprobs;  // natural log, one per token, each <= 0
    std::optional<std::vector<double>> weights;

    bool operator==(const TokenizedResponse&) const = default;
};

/// Most-likely response plus B sampled responses for one condition.
struct GenerationBundle {
    TokenizedResponse most_likely;
    std::vector<TokenizedResponse> samples;
    double temperature = 1.0;
    Condition condition = Condition::NoRag;

    std::size_t sample_count() const { return samples.size(); }

    bool operator==(const GenerationBundle&) const = default;
};

enum class RelevanceFlag { Relevant, Irrelevant, Unknown };

struct ContextRecord {
    std::string doc_id;
    std::string text;
    RelevanceFlag relevance = RelevanceFlag::Unknown;

    bool operator==(const ContextRecord&) const = default;
};

/// Per-token vocabulary distributions for the RAG response, decoded with
/// and without the context in the prompt. Input to the CTI relation.
/// The r1_* pair, when present, holds the same distributions for the
/// no-RAG response so R(c, q, r1) can also be scored with CTI.
struct CtiDistributions {
    std::vector<std::map<std::string, double>> with_context;
    std::vector<std::map<std::string, double>> without_context;
    std::vector<std::map<std::string, double>> r1_with_context;
    std::vector<std::map<std::string, double>> r1_without_context;

    bool operator==(const CtiDistributions&) const = default;
};

struct QueryRecord {
    std::string id;
    std::string question;
    std::vector<std::string> gold_answers;  // empty = reference-free only
    std::optional<ContextRecord> context;
    GenerationBundle no_rag;
    std::optional<GenerationBundle> rag;
    std::optional<CtiDistributions> cti;

    bool operator==(const QueryRecord&) const = default;
};

enum class Method { PE, SE, PE_M, SE_M, EigV, Deg, ECC, NumSet };

struct UncertaintyScore {
    Method method;
    double value = 0.0;
    Condition condition = Condition::NoRag;
    bool calibrated = false;
};

enum class CoeffSource { PaperDefaultCTI, PaperDefaultNLI, Fitted };

struct CalibrationCoefficients {
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 1.0;
    CoeffSource source = CoeffSource::Fitted;

    static CalibrationCoefficients paper_default_cti() {
        return {0.05, 0.20, 0.75, 1.30, CoeffSource::PaperDefaultCTI};
    }
    static CalibrationCoefficients paper_default_nli() {
        return {0.05, 0.05, 0.90, 1.20, CoeffSource::PaperDefaultNLI};
    }
    /// Identity: multiplier is exactly k4 = 1.
    static CalibrationCoefficients identity() {
        return {0.0, 0.0, 0.0, 1.0, CoeffSource::Fitted};
    }
};

namespace detail {

inline void validate_response(const TokenizedResponse& r, const std::string& where,
                              std::vector<std::string>& out) {
    if (r.tokens.empty()) out.push_back(where + ": tokens must be non-empty");
    if (r.tokens.size() != r.logprobs.size())
        out.push_back(where + ": tokens/logprobs length mismatch");
    for (double lp : r.logprobs) {
        if (!std::isfinite(lp) && lp != -std::numeric_limits<double>::infinity()) {
            out.push_back(where + ": logprob must be finite or -inf");
            break;
        }
        if (lp > 0.0) {
            out.push_back(where + ": logprob must be <= 0");
            break;
        }
    }
    if (r.weights && r.weights->size() != r.tokens.size())
        out.push_back(where + ": supplied weights length mismatch");
    if (r.weights) {
        for (double w : *r.weights) {
            if (!std::isfinite(w) || w < 0.0) {
                out.push_back(where + ": supplied weights must be finite and >= 0");
                break;
            }
        }
    }
}

}  // namespace detail

/// Returns human-readable invariant violations; empty list means valid.
/// Pure: never throws, never mutates.
inline std::vector<std::string> validate_record(const QueryRecord& rec) {
    std::vector<std::string> out;
    if (rec.id.empty()) out.push_back("id must be non-empty");
    detail::validate_response(rec.no_rag.most_likely, "no_rag.most_likely", out);
    for (std::size_t i = 0; i < rec.no_rag.samples.size(); ++i)
        detail::validate_response(rec.no_rag.samples[i],
                                  "no_rag.samples[" + std::to_string(i) + "]", out);
    if (rec.rag) {
        if (!rec.context) out.push_back("rag requires context");
        detail::validate_response(rec.rag->most_likely, "rag.most_likely", out);
        for (std::size_t i = 0; i < rec.rag->samples.size(); ++i)
            detail::validate_response(rec.rag->samples[i],
                                      "rag.samples[" + std::to_string(i) + "]", out);
    }
    if (rec.context && rec.context->text.empty())
        out.push_back("context text must be non-empty");
    return out;
}

// ---- JSON serialization (nlohmann) ----

inline std::string to_string(Method m) {
    switch (m) {
        case Method::PE: return "pe";
        case Method::SE: return "se";
        case Method::PE_M: return "pe_m";
        case Method::SE_M: return "se_m";
        case Method::EigV: return "eigv";
        case Method::Deg: return "deg";
        case Method::ECC: return "ecc";
        case Method::NumSet: return "numset";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "pe") return Method::PE;
    if (s == "se") return Method::SE;
    if (s == "pe_m") return Method::PE_M;
    if (s == "se_m") return Method::SE_M;
    if (s == "eigv") return Method::EigV;
    if (s == "deg") return Method::Deg;
    if (s == "ecc") return Method::ECC;
    if (s == "numset") return Method::NumSet;
    throw InvalidInput("unknown method name: " + s);
}

inline std::string to_string(Condition c) {
    return c == Condition::NoRag ? "no_rag" : "rag";
}

inline void to_json(nlohmann::json& j, const TokenizedResponse& r) {
    j = nlohmann::json{{"text", r.text}, {"tokens", r.tokens}, {"logprobs", r.logprobs}};
    if (r.weights) j["weights"] = *r.weights;
}

inline void from_json(const nlohmann::json& j, TokenizedResponse& r) {
    j.at("text").get_to(r.text);
    j.at("tokens").get_to(r.tokens);
    j.at("logprobs").get_to(r.logprobs);
    if (j.contains("weights")) r.weights = j.at("weights").get<std::vector<double>>();
}

inline void to_json(nlohmann::json& j, const GenerationBundle& b) {
    j = nlohmann::json{{"most_likely", b.most_likely},
                       {"samples", b.samples},
                       {"temperature", b.temperature}};
}

inline void from_json(const nlohmann::json& j, GenerationBundle& b) {
    j.at("most_likely").get_to(b.most_likely);
    j.at("samples").get_to(b.samples);
    if (j.contains("temperature")) j.at("temperature").get_to(b.temperature);
}

inline void to_json(nlohmann::json& j, const ContextRecord& c) {
    const char* rel = c.relevance == RelevanceFlag::Relevant     ? "relevant"
                      : c.relevance == RelevanceFlag::Irrelevant ? "irrelevant"
                                                                 : "unknown";
    j = nlohmann::json{{"doc_id", c.doc_id}, {"text", c.text}, {"relevance", rel}};
}

inline void from_json(const nlohmann::json& j, ContextRecord& c) {
    j.at("doc_id").get_to(c.doc_id);
    j.at("text").get_to(c.text);
    std::string rel = j.value("relevance", "unknown");
    c.relevance = rel == "relevant"     ? RelevanceFlag::Relevant
                  : rel == "irrelevant" ? RelevanceFlag::Irrelevant
                                        : RelevanceFlag::Unknown;
}

inline void to_json(nlohmann::json& j, const CtiDistributions& d) {
    j = nlohmann::json{{"with_context", d.with_context},
                       {"without_context", d.without_context}};
    if (!d.r1_with_context.empty()) {
        j["r1_with_context"] = d.r1_with_context;
        j["r1_without_context"] = d.r1_without_context;
    }
}

inline void from_json(const nlohmann::json& j, CtiDistributions& d) {
    j.at("with_context").get_to(d.with_context);
    j.at("without_context").get_to(d.without_context);
    if (j.contains("r1_with_context")) {
        j.at("r1_with_context").get_to(d.r1_with_context);
        j.at("r1_without_context").get_to(d.r1_without_context);
    }
}

inline void to_json(nlohmann::json& j, const QueryRecord& r) {
    j = nlohmann::json{{"id", r.id},
                       {"question", r.question},
                       {"gold_answers", r.gold_answers},
                       {"no_rag", r.no_rag}};
    if (r.context) j["context"] = *r.context;
    if (r.rag) j["rag"] = *r.rag;
    if (r.cti) j["cti"] = *r.cti;
}

inline void from_json(const nlohmann::json& j, QueryRecord& r) {
    j.at("id").get_to(r.id);
    j.at("question").get_to(r.question);
    j.at("gold_answers").get_to(r.gold_answers);
    j.at("no_rag").get_to(r.no_rag);
    r.no_rag.condition = Condition::NoRag;
    if (j.contains("context")) r.context = j.at("context").get<ContextRecord>();
    if (j.contains("rag")) {
        r.rag = j.at("rag").get<GenerationBundle>();
        r.rag->condition = Condition::Rag;
    }
    if (j.contains("cti")) r.cti = j.at("cti").get<CtiDistributions>();
}

}  // namespace rague
