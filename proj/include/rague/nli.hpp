#pragma once

// Scorer interfaces plus offline fixture implementations. The HTTP
// clients in clients.hpp implement the same interfaces; every consumer
// is written against the abstract scorer so the whole pipeline runs
// with zero network access.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "rague/errors.hpp"

namespace rague {

struct NliVerdict {
    double p_entail = 0.0;
    double p_neutral = 0.0;
    double p_contradict = 0.0;

    enum class Class { Entailment, Neutral, Contradiction };

    Class argmax() const {
        if (p_contradict >= p_entail && p_contradict >= p_neutral)
            return Class::Contradiction;
        if (p_entail >= p_neutral) return Class::Entailment;
        return Class::Neutral;
    }

    bool normalized(double eps = 1e-6) const {
        const double s = p_entail + p_neutral + p_contradict;
        return p_entail >= 0 && p_neutral >= 0 && p_contradict >= 0 &&
               std::abs(s - 1.0) <= eps;
    }

    NliVerdict renormalized() const {
        const double s = p_entail + p_neutral + p_contradict;
        if (s <= 0.0) return {1.0 / 3, 1.0 / 3, 1.0 / 3};
        return {p_entail / s, p_neutral / s, p_contradict / s};
    }
};

/// Directional NLI scorer: premise/hypothesis order matters.
class NliScorer {
public:
    virtual ~NliScorer() = default;
    virtual NliVerdict score(const std::string& premise,
                             const std::string& hypothesis) = 0;
};

/// Grounding scorer: how well a claim is supported by a document, in [0,1].
class GroundingScorer {
public:
    virtual ~GroundingScorer() = default;
    virtual double score(const std::string& document, const std::string& claim) = 0;
};

/// Table-backed NLI fixture for tests. Misses throw unless a default
/// verdict is installed. Call counting supports cache-behavior tests.
class FixtureNli : public NliScorer {
public:
    void add(const std::string& premise, const std::string& hypothesis,
             NliVerdict v) {
        table_[{premise, hypothesis}] = v;
    }
    void add_symmetric(const std::string& a, const std::string& b, NliVerdict v) {
        add(a, b, v);
        add(b, a, v);
    }
    void set_default(NliVerdict v) { default_ = v; }

    NliVerdict score(const std::string& premise,
                     const std::string& hypothesis) override {
        ++calls_;
        auto it = table_.find({premise, hypothesis});
        if (it != table_.end()) return it->second;
        if (default_) return *default_;
        throw ScorerUnavailable("no fixture entry for premise '" + premise +
                                "' / hypothesis '" + hypothesis + "'");
    }

    std::size_t calls() const { return calls_; }

private:
    std::map<std::pair<std::string, std::string>, NliVerdict> table_;
    std::optional<NliVerdict> default_;
    std::size_t calls_ = 0;
};

namespace detail {
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}
}  // namespace detail

/// Deterministic procedural NLI scorer: verdicts are a pure function of
/// the input pair. Textually identical pairs entail strongly; otherwise
/// probabilities are derived from a hash of both texts. Used by the
/// end-to-end fixtures so no table needs to enumerate every pair.
class HashNli : public NliScorer {
public:
    NliVerdict score(const std::string& premise,
                     const std::string& hypothesis) override {
        if (premise == hypothesis) return {0.95, 0.04, 0.01};
        const std::uint64_t h = detail::fnv1a(hypothesis, detail::fnv1a(premise + "\x1f"));
        // map hash to p_entail in [0.02, 0.92]
        const double u = static_cast<double>(h % 9001) / 9000.0;
        const double pe = 0.02 + 0.90 * u;
        const double pc = (1.0 - pe) * (0.15 + 0.70 * (static_cast<double>((h >> 17) % 997) / 996.0));
        return {pe, 1.0 - pe - pc, pc};
    }
};

class FixtureGrounding : public GroundingScorer {
public:
    void add(const std::string& document, const std::string& claim, double s) {
        table_[{document, claim}] = s;
    }
    void set_default(double s) { default_ = s; }

    double score(const std::string& document, const std::string& claim) override {
        auto it = table_.find({document, claim});
        if (it != table_.end()) return it->second;
        if (default_) return *default_;
        throw ScorerUnavailable("no grounding fixture entry");
    }

private:
    std::map<std::pair<std::string, std::string>, double> table_;
    std::optional<double> default_;
};

/// Procedural grounding fixture matching HashNli's determinism.
class HashGrounding : public GroundingScorer {
public:
    double score(const std::string& document, const std::string& claim) override {
        const std::uint64_t h = detail::fnv1a(claim, detail::fnv1a(document + "\x1f"));
        return static_cast<double>(h % 10001) / 10000.0;
    }
};

}  // namespace rague
