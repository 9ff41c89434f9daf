#pragma once

// Content-addressed score cache. Keys hash the scorer identity plus the
// ordered input texts, so (premise, hypothesis) and (hypothesis,
// premise) are distinct entries. Writes are atomic (temp then rename);
// the full key material is stored in the entry and verified on read, so
// hash collisions surface as misses rather than wrong values.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <unistd.h>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "rague/errors.hpp"
#include "rague/nli.hpp"  // detail::fnv1a

namespace rague {

class ScoreCache {
public:
    explicit ScoreCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    static std::string make_key(const std::string& scorer_id,
                                const std::vector<std::string>& inputs) {
        std::string material = scorer_id;
        for (const auto& s : inputs) {
            material.push_back('\x1e');
            material += s;
        }
        return material;
    }

    std::optional<nlohmann::json> get(const std::string& key) const {
        const auto p = path_for(key);
        std::ifstream in(p);
        if (!in) return std::nullopt;
        nlohmann::json entry;
        try {
            in >> entry;
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;
        }
        if (entry.value("key", "") != key) return std::nullopt;  // hash collision
        return entry.at("value");
    }

    void put(const std::string& key, const nlohmann::json& value) const {
        std::lock_guard<std::mutex> lock(mu_);
        const auto p = path_for(key);
        const auto tmp = p.string() + ".tmp." + std::to_string(::getpid());
        {
            std::ofstream out(tmp);
            if (!out) throw InvalidInput("cannot write cache entry: " + tmp);
            out << nlohmann::json{{"key", key}, {"value", value}}.dump() << '\n';
        }
        std::filesystem::rename(tmp, p);
    }

    const std::filesystem::path& directory() const { return dir_; }

private:
    std::filesystem::path path_for(const std::string& key) const {
        const std::uint64_t h1 = detail::fnv1a(key);
        const std::uint64_t h2 = detail::fnv1a(key, 0x9e3779b97f4a7c15ULL);
        char name[38];  // 32 hex digits + ".json" + NUL
        std::snprintf(name, sizeof(name), "%016llx%016llx.json",
                      static_cast<unsigned long long>(h1),
                      static_cast<unsigned long long>(h2));
        return dir_ / name;
    }

    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

/// NliScorer decorator that writes every verdict through the cache and
/// serves repeats from disk without touching the inner scorer.
class CachingNli : public NliScorer {
public:
    CachingNli(NliScorer& inner, ScoreCache& cache, std::string scorer_id = "nli")
        : inner_(inner), cache_(cache), scorer_id_(std::move(scorer_id)) {}

    NliVerdict score(const std::string& premise, const std::string& hypothesis) override {
        const std::string key = ScoreCache::make_key(scorer_id_, {premise, hypothesis});
        if (auto hit = cache_.get(key)) {
            return {hit->at("entailment").get<double>(),
                    hit->at("neutral").get<double>(),
                    hit->at("contradiction").get<double>()};
        }
        const NliVerdict v = inner_.score(premise, hypothesis);
        cache_.put(key, {{"entailment", v.p_entail},
                         {"neutral", v.p_neutral},
                         {"contradiction", v.p_contradict}});
        return v;
    }

private:
    NliScorer& inner_;
    ScoreCache& cache_;
    std::string scorer_id_;
};

class CachingGrounding : public GroundingScorer {
public:
    CachingGrounding(GroundingScorer& inner, ScoreCache& cache,
                     std::string scorer_id = "grounding")
        : inner_(inner), cache_(cache), scorer_id_(std::move(scorer_id)) {}

    double score(const std::string& document, const std::string& claim) override {
        const std::string key = ScoreCache::make_key(scorer_id_, {document, claim});
        if (auto hit = cache_.get(key)) return hit->get<double>();
        const double s = inner_.score(document, claim);
        cache_.put(key, s);
        return s;
    }

private:
    GroundingScorer& inner_;
    ScoreCache& cache_;
    std::string scorer_id_;
};

}  // namespace rague
