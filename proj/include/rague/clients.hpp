#pragma once

// Wire-level clients for the generation, NLI, and grounding services.
// All consumers depend on the abstract interfaces in nli.hpp /
// CompletionBackend below; these classes only add HTTP transport,
// retries, and auth.

#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "rague/core.hpp"
#include "rague/errors.hpp"
#include "rague/nli.hpp"

namespace rague {

struct ClientConfig {
    std::string endpoint;          // e.g. "http://localhost:8000"
    std::string auth_token_env;    // name of env var holding the bearer token
    double timeout_seconds = 30.0;
    int max_retries = 2;
    int concurrency_limit = 4;
};

// Prompt templates used when populating bundles from a live model.
inline constexpr const char* kNoRagPromptTemplate =
    "Answer the question. Question: <question> Answer:";
inline constexpr const char* kRagPromptTemplate =
    "You are given a question, and you MUST respond with an answer (max 10 tokens) "
    "using either the provided document or your memorized knowledge. "
    "Document: <context> Question:<question> Answer:";

inline std::string render_prompt(const std::string& question,
                                 const std::optional<std::string>& context) {
    std::string t = context ? kRagPromptTemplate : kNoRagPromptTemplate;
    auto replace = [&t](const std::string& tag, const std::string& value) {
        const auto pos = t.find(tag);
        if (pos != std::string::npos) t.replace(pos, tag.size(), value);
    };
    replace("<question>", question);
    if (context) replace("<context>", *context);
    return t;
}

struct CompletionRequest {
    std::string prompt;
    double temperature = 1.0;
    int max_tokens = 64;
    bool greedy = false;
    int top_logprobs = 0;  // >0 requests per-token top-k alternates
};

struct Completion {
    std::string text;
    std::vector<std::string> tokens;
    std::vector<double> logprobs;
    // per-token top-k alternates (token -> logprob), present when requested
    std::vector<std::map<std::string, double>> top_logprobs;
};

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual Completion complete(const CompletionRequest& req) = 0;
    virtual bool supports_logprobs() { return true; }
};

namespace detail {

inline httplib::Headers auth_headers(const ClientConfig& cfg) {
    httplib::Headers h;
    if (!cfg.auth_token_env.empty()) {
        if (const char* tok = std::getenv(cfg.auth_token_env.c_str()))
            h.emplace("Authorization", std::string("Bearer ") + tok);
    }
    return h;
}

inline nlohmann::json post_json_with_retries(const ClientConfig& cfg,
                                             const std::string& path,
                                             const nlohmann::json& body) {
    httplib::Client client(cfg.endpoint);
    const auto secs = static_cast<time_t>(cfg.timeout_seconds);
    const auto usecs =
        static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_read_timeout(secs, usecs);
    client.set_connection_timeout(secs, usecs);
    const auto headers = auth_headers(cfg);
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw ProtocolError("unexpected status " + std::to_string(res->status) +
                                " from " + path);
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError(std::string("malformed response body: ") + e.what());
        }
    }
    throw ScorerUnavailable("request to " + cfg.endpoint + path +
                            " failed after retries: " + last_error);
}

}  // namespace detail

class HttpNliScorer : public NliScorer {
public:
    explicit HttpNliScorer(ClientConfig cfg) : cfg_(std::move(cfg)) {}

    NliVerdict score(const std::string& premise, const std::string& hypothesis) override {
        const nlohmann::json resp = detail::post_json_with_retries(
            cfg_, "/nli", {{"premise", premise}, {"hypothesis", hypothesis}});
        NliVerdict v;
        try {
            v.p_entail = resp.at("entailment").get<double>();
            v.p_neutral = resp.at("neutral").get<double>();
            v.p_contradict = resp.at("contradiction").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError(std::string("malformed NLI verdict: ") + e.what());
        }
        if (!v.normalized()) v = v.renormalized();
        return v;
    }

private:
    ClientConfig cfg_;
};

class HttpGroundingScorer : public GroundingScorer {
public:
    explicit HttpGroundingScorer(ClientConfig cfg) : cfg_(std::move(cfg)) {}

    double score(const std::string& document, const std::string& claim) override {
        const nlohmann::json resp = detail::post_json_with_retries(
            cfg_, "/grounding", {{"document", document}, {"claim", claim}});
        try {
            return resp.at("score").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError(std::string("malformed grounding score: ") + e.what());
        }
    }

private:
    ClientConfig cfg_;
};

/// Chat-completions-style generation client with per-token logprobs and
/// optional top-k alternates.
class HttpCompletionBackend : public CompletionBackend {
public:
    explicit HttpCompletionBackend(ClientConfig cfg) : cfg_(std::move(cfg)) {}

    Completion complete(const CompletionRequest& req) override {
        nlohmann::json body{{"prompt", req.prompt},
                            {"temperature", req.greedy ? 0.0 : req.temperature},
                            {"max_tokens", req.max_tokens},
                            {"greedy", req.greedy}};
        if (req.top_logprobs > 0) body["top_logprobs"] = req.top_logprobs;
        const nlohmann::json resp = detail::post_json_with_retries(cfg_, "/generate", body);
        Completion c;
        try {
            c.text = resp.at("text").get<std::string>();
            c.tokens = resp.at("tokens").get<std::vector<std::string>>();
            if (!resp.contains("logprobs"))
                throw CapabilityError("generation service returned no logprobs");
            c.logprobs = resp.at("logprobs").get<std::vector<double>>();
            if (resp.contains("top_logprobs"))
                c.top_logprobs =
                    resp.at("top_logprobs")
                        .get<std::vector<std::map<std::string, double>>>();
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError(std::string("malformed completion: ") + e.what());
        }
        return c;
    }

private:
    ClientConfig cfg_;
};

struct GenerationConfig {
    int num_samples = 10;  // B
    double temperature = 1.0;
    int max_tokens = 64;
};

/// One greedy request for the most-likely response plus B sampled
/// requests; the prompt template is selected by context presence.
inline GenerationBundle generate_bundle(CompletionBackend& backend,
                                        const std::string& question,
                                        const std::optional<std::string>& context,
                                        const GenerationConfig& cfg = {}) {
    if (!backend.supports_logprobs())
        throw CapabilityError("generation backend does not expose logprobs");
    const std::string prompt = render_prompt(question, context);

    auto to_response = [](const Completion& c) {
        if (c.tokens.size() != c.logprobs.size())
            throw ProtocolError("completion token/logprob length mismatch");
        return TokenizedResponse{c.text, c.tokens, c.logprobs, std::nullopt};
    };

    GenerationBundle bundle;
    bundle.condition = context ? Condition::Rag : Condition::NoRag;
    bundle.temperature = cfg.temperature;
    bundle.most_likely =
        to_response(backend.complete({prompt, cfg.temperature, cfg.max_tokens, true, 0}));
    bundle.samples.reserve(static_cast<std::size_t>(cfg.num_samples));
    for (int b = 0; b < cfg.num_samples; ++b)
        bundle.samples.push_back(
            to_response(backend.complete({prompt, cfg.temperature, cfg.max_tokens, false, 0})));
    return bundle;
}

}  // namespace rague
