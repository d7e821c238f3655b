#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dedc/config.hpp"
#include "dedc/formal_core.hpp"
#include "dedc/hash.hpp"

namespace dedc {

struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& msg, int last_status = 0)
        : std::runtime_error(msg), last_status(last_status) {}
    int last_status;
};

struct CredentialError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CompletionResult {
    std::string text;
    int attempts = 0;
    long long latency_ms = 0;
    bool from_cache = false;
};

// Cache key: content hash of exactly the payload identity. Any prompt or
// sampling change produces a different key; replays are byte-stable.
inline std::string cache_key(const std::string& prompt, const std::string& model,
                             double temperature) {
    nlohmann::json j = {{"prompt", prompt}, {"model", model}, {"temperature", temperature}};
    return sha256_hex(j.dump());
}

// One JSON file per entry under the cache directory.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::optional<std::string> get(const std::string& key) const {
        std::ifstream in(entry_path(key));
        if (!in) return std::nullopt;
        nlohmann::json j;
        in >> j;
        return j.at("response_text").get<std::string>();
    }

    void put(const std::string& key, const std::string& model, double temperature,
             const std::string& response_text, int attempts, long long latency_ms) const {
        nlohmann::json j = {{"key", key},
                            {"model", model},
                            {"temperature", temperature},
                            {"response_text", response_text},
                            {"attempts", attempts},
                            {"latency_ms", latency_ms}};
        std::ofstream out(entry_path(key));
        out << j.dump(2) << "\n";
    }

private:
    std::filesystem::path entry_path(const std::string& key) const {
        return dir_ / (key + ".json");
    }
    std::filesystem::path dir_;
};

namespace detail {

inline std::string extract_by_path(const nlohmann::json& j, const std::string& dotted) {
    const nlohmann::json* cur = &j;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (!part.empty() && is_integer_token(part)) {
            cur = &cur->at(static_cast<std::size_t>(std::stoul(part)));
        } else {
            cur = &cur->at(part);
        }
    }
    return cur->get<std::string>();
}

}  // namespace detail

// Sends a chat-style completion request with bounded retries and exponential
// backoff. Authentication failures (401/403) never retry; transport failures
// and retryable statuses (408/429/5xx) back off up to max_retries.
inline CompletionResult complete(const std::string& prompt, const EndpointConfig& cfg,
                                 const ResponseCache* cache = nullptr) {
    const std::string key = cache_key(prompt, cfg.model, cfg.temperature);
    if (cache) {
        if (auto hit = cache->get(key)) {
            CompletionResult r;
            r.text = *hit;
            r.from_cache = true;
            return r;
        }
    }

    std::string token;
    if (!cfg.credential_env.empty()) {
        const char* v = std::getenv(cfg.credential_env.c_str());
        if (!v || !*v) {
            throw CredentialError("credential environment variable '" + cfg.credential_env +
                                  "' is not set");
        }
        token = v;
    }

    nlohmann::json body = {{"model", cfg.model},
                           {"temperature", cfg.temperature},
                           {"messages", {{{"role", "user"}, {"content", prompt}}}}};
    const std::string payload = body.dump();

    const auto started = std::chrono::steady_clock::now();
    int last_status = 0;
    std::string last_error;
    for (int attempt = 1; attempt <= cfg.max_retries + 1; ++attempt) {
        httplib::Client client(cfg.base_url);
        client.set_connection_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
        client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

        auto res = client.Post(cfg.path, headers, payload, "application/json");
        if (res) {
            last_status = res->status;
            if (res->status == 200) {
                CompletionResult r;
                r.text = detail::extract_by_path(nlohmann::json::parse(res->body),
                                                 cfg.response_text_path);
                r.attempts = attempt;
                r.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - started)
                                   .count();
                if (cache) cache->put(key, cfg.model, cfg.temperature, r.text, r.attempts,
                                      r.latency_ms);
                return r;
            }
            if (res->status == 401 || res->status == 403) {
                throw CredentialError("endpoint rejected credentials with status " +
                                      std::to_string(res->status));
            }
            const bool retryable =
                res->status == 408 || res->status == 429 || res->status >= 500;
            if (!retryable) {
                throw TransportError("endpoint returned non-retryable status " +
                                         std::to_string(res->status),
                                     res->status);
            }
            last_error = "status " + std::to_string(res->status);
        } else {
            last_error = httplib::to_string(res.error());
        }
        if (attempt <= cfg.max_retries) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(cfg.backoff_base_ms * (1LL << (attempt - 1))));
        }
    }
    throw TransportError("endpoint failed after " + std::to_string(cfg.max_retries + 1) +
                             " attempts: " + last_error,
                         last_status);
}

// ---------------------------------------------------------------------------
// Mock models
// ---------------------------------------------------------------------------

// A mock receives the task's gold program and naming scheme and returns raw
// output text, standing in for a remote model with a fixed behavioral defect.
using MockModel = std::function<std::string(const Program& gold, const NamingScheme& naming)>;

namespace mocks {

inline std::string gold_oracle(const Program& gold, const NamingScheme& naming) {
    return render_program(gold, naming);
}

// Replaces one primitive with a same-signature neighbor, leaving every lhs and
// argument untouched: the archetypal confusion error. The substitution chain
// guarantees some expression is always swappable.
inline std::string confuser(const Program& gold, const NamingScheme& naming) {
    static const NamingScheme opaque = NamingScheme::opaque();
    Program out = gold;
    auto swap_first = [&](auto pred, auto replace) {
        for (auto& e : out) {
            auto id = opaque.resolve(e.callee);
            if (id && pred(*id)) {
                e.callee = primitive(replace(*id)).opaque_name();
                return true;
            }
        }
        return false;
    };
    const bool swapped =
        swap_first([](int id) { return id == 1 || id == 3 || id == 6; },
                   [](int id) { return id == 1 ? 3 : id == 3 ? 6 : 1; }) ||
        swap_first([](int id) { return id == 0 || id == 2; },
                   [](int id) { return id == 0 ? 2 : 0; }) ||
        swap_first([](int id) { return id == 4; }, [](int) { return 7; }) ||
        swap_first([](int id) { return id == 8; }, [](int) { return 9; }) ||
        swap_first([](int id) { return id == 9; }, [](int) { return 8; });
    if (!swapped) throw std::logic_error("confuser: no swappable primitive in gold program");
    return render_program(out, naming);
}

// Drops the first non-final View-producing step and re-points its uses at the
// full table: the archetypal omission-of-scope error.
inline std::string omitter(const Program& gold, const NamingScheme& naming) {
    static const NamingScheme opaque = NamingScheme::opaque();
    Program out;
    std::string dropped_lhs;
    for (std::size_t i = 0; i + 1 < gold.size() && dropped_lhs.empty(); ++i) {
        auto id = opaque.resolve(gold[i].callee);
        if (id && primitive(*id).output == OutputType::View) dropped_lhs = gold[i].lhs;
    }
    if (dropped_lhs.empty()) dropped_lhs = gold.front().lhs;  // fall back to the first step
    for (const auto& e : gold) {
        if (e.lhs == dropped_lhs) continue;
        Expression n = e;
        for (auto& a : n.args) {
            if (a == dropped_lhs) a = std::string(kAllViews);
        }
        out.push_back(std::move(n));
    }
    return render_program(out, naming);
}

// Produces prose with no parsable statement at all.
inline std::string babbler(const Program&, const NamingScheme&) {
    return "I could not derive a formal answer for this question. The table would need to be "
           "filtered and aggregated in several steps, but the exact operations are unclear to "
           "me.";
}

}  // namespace mocks

inline const std::map<std::string, MockModel>& mock_models() {
    static const std::map<std::string, MockModel> models = {
        {"gold_oracle", mocks::gold_oracle},
        {"confuser", mocks::confuser},
        {"omitter", mocks::omitter},
        {"babbler", mocks::babbler},
    };
    return models;
}

}  // namespace dedc
