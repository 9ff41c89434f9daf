#pragma once

// Sequence-level log probabilities and the predictive-entropy family.
// Everything stays in log space; per-token probabilities are never
// exponentiated.

#include <numeric>

#include "rague/core.hpp"
#include "rague/errors.hpp"

namespace rague {

/// Token weighting scheme for the weighted log probability.
/// Unit reproduces the plain sequence probability, LengthNormalized the
/// 1/N-weighted variant, Supplied uses externally provided importance
/// weights (used exactly as given, no renormalization).
struct TokenWeightFunction {
    enum class Kind { Unit, LengthNormalized, Supplied };

    Kind kind = Kind::Unit;
    std::optional<std::vector<double>> supplied;

    static TokenWeightFunction unit() { return {Kind::Unit, std::nullopt}; }
    static TokenWeightFunction length_normalized() {
        return {Kind::LengthNormalized, std::nullopt};
    }
    static TokenWeightFunction with_weights(std::vector<double> w) {
        return {Kind::Supplied, std::move(w)};
    }

    double weight(std::size_t n, std::size_t total) const {
        switch (kind) {
            case Kind::Unit: return 1.0;
            case Kind::LengthNormalized: return 1.0 / static_cast<double>(total);
            case Kind::Supplied: return (*supplied)[n];
        }
        return 1.0;
    }
};

/// Sum of token logprobs: the log of the full sequence probability.
inline double log_sequence_probability(const TokenizedResponse& resp) {
    if (resp.tokens.empty()) throw InvalidResponse("empty token list");
    if (resp.tokens.size() != resp.logprobs.size())
        throw InvalidResponse("tokens/logprobs length mismatch");
    return std::accumulate(resp.logprobs.begin(), resp.logprobs.end(), 0.0);
}

/// Weighted sum of token logprobs. If the weight function is Supplied,
/// per-response weights on the TokenizedResponse take precedence over
/// weights carried in the function itself.
inline double log_weighted_probability(const TokenizedResponse& resp,
                                       const TokenWeightFunction& w) {
    if (resp.tokens.empty()) throw InvalidResponse("empty token list");
    const std::size_t n_tokens = resp.logprobs.size();
    if (w.kind == TokenWeightFunction::Kind::Supplied) {
        const std::vector<double>* weights =
            resp.weights ? &*resp.weights : (w.supplied ? &*w.supplied : nullptr);
        if (!weights || weights->size() != n_tokens)
            throw WeightMismatch("supplied weights length != token count");
        double sum = 0.0;
        for (std::size_t i = 0; i < n_tokens; ++i) sum += (*weights)[i] * resp.logprobs[i];
        return sum;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n_tokens; ++i)
        sum += w.weight(i, n_tokens) * resp.logprobs[i];
    return sum;
}

/// Monte-Carlo predictive entropy: mean negative weighted log
/// probability over the sampled responses. Unit weights give PE,
/// LengthNormalized / Supplied give the PE+M family.
inline double predictive_entropy(const GenerationBundle& bundle,
                                 const TokenWeightFunction& w) {
    if (bundle.samples.empty()) throw EmptyBundle("predictive_entropy needs samples");
    double sum = 0.0;
    for (const auto& s : bundle.samples) sum += log_weighted_probability(s, w);
    return -sum / static_cast<double>(bundle.samples.size());
}

}  // namespace rague
