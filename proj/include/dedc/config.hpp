#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dedc/formal_core.hpp"
#include "dedc/hash.hpp"
#include "dedc/sample_gen.hpp"

namespace dedc {

// Remote endpoint description. The credential is named, not stored: it is
// read from the environment at request time.
struct EndpointConfig {
    std::string base_url;  // e.g. "http://127.0.0.1:8080"
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string credential_env;        // name of the env var holding the token
    double temperature = 0.0;          // fixed for reproducibility
    int timeout_ms = 60000;
    int max_retries = 3;
    int backoff_base_ms = 250;
    // Dotted path into the response object; integer components index arrays.
    std::string response_text_path = "choices.0.message.content";

    static EndpointConfig from_file(const std::string& path);
};

inline void to_json(nlohmann::json& j, const EndpointConfig& e) {
    j = {{"base_url", e.base_url},
         {"path", e.path},
         {"model", e.model},
         {"credential_env", e.credential_env},
         {"temperature", e.temperature},
         {"timeout_ms", e.timeout_ms},
         {"max_retries", e.max_retries},
         {"backoff_base_ms", e.backoff_base_ms},
         {"response_text_path", e.response_text_path}};
}

inline void from_json(const nlohmann::json& j, EndpointConfig& e) {
    e.base_url = j.value("base_url", e.base_url);
    e.path = j.value("path", e.path);
    e.model = j.value("model", e.model);
    e.credential_env = j.value("credential_env", e.credential_env);
    e.temperature = j.value("temperature", e.temperature);
    e.timeout_ms = j.value("timeout_ms", e.timeout_ms);
    e.max_retries = j.value("max_retries", e.max_retries);
    e.backoff_base_ms = j.value("backoff_base_ms", e.backoff_base_ms);
    e.response_text_path = j.value("response_text_path", e.response_text_path);
}

inline EndpointConfig EndpointConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open endpoint config: " + path);
    nlohmann::json j;
    in >> j;
    return j.get<EndpointConfig>();
}

inline constexpr const char* kDefaultPromptHeader =
    "Convert the question into expressions of a formal language.\n"
    "Each expression has the form: lhs := name (arg1, arg2, ...);\n"
    "Use \"all\" for the full table of items. The final expression must assign to \"result\".\n"
    "Answer with expressions only.\n";

// Everything that influences generated bytes. Two runs with equal RunConfig
// and equal command lines produce byte-identical files.
struct RunConfig {
    std::uint64_t seed = 1;
    GenRanges ranges;
    // In the full-gap setting, require every demonstration's typed label to
    // differ from the test label (instead of at least one).
    bool strict_full_gap = true;
    std::string prompt_template_version = "v1";
    std::string prompt_header = kDefaultPromptHeader;
    std::array<std::string, 10> anomalous_table = NamingScheme::default_anomalous_table();
    std::array<std::string, 10> cross_table = NamingScheme::default_cross_table();
    EndpointConfig endpoint;

    NamingScheme naming(NamingKind kind) const {
        switch (kind) {
            case NamingKind::Opaque: return NamingScheme::opaque();
            case NamingKind::Anomalous:
                return NamingScheme::from_table(NamingKind::Anomalous, anomalous_table);
            case NamingKind::CrossMapping:
                return NamingScheme::from_table(NamingKind::CrossMapping, cross_table);
        }
        throw std::logic_error("RunConfig::naming: bad kind");
    }

    // Hash over the reproducibility-relevant fields. The endpoint is excluded:
    // it selects what produced the outputs (recorded separately per run), not
    // how inputs were generated.
    std::string config_hash() const {
        nlohmann::json j = {{"seed", seed},
                            {"attr_lo", ranges.attr_lo},
                            {"attr_hi", ranges.attr_hi},
                            {"num_lo", ranges.num_lo},
                            {"num_hi", ranges.num_hi},
                            {"k_lo", ranges.k_lo},
                            {"k_hi", ranges.k_hi},
                            {"strict_full_gap", strict_full_gap},
                            {"prompt_template_version", prompt_template_version},
                            {"prompt_header", prompt_header},
                            {"anomalous_table", anomalous_table},
                            {"cross_table", cross_table}};
        return sha256_hex(j.dump());
    }

    std::string prompt_template_hash() const {
        return sha256_hex(prompt_template_version + "\x1f" + prompt_header);
    }

    std::string naming_hash() const {
        nlohmann::json j = {{"anomalous", anomalous_table}, {"cross", cross_table}};
        return sha256_hex(j.dump());
    }

    nlohmann::json to_json_obj() const {
        nlohmann::json j = {{"seed", seed},
                            {"attr_lo", ranges.attr_lo},
                            {"attr_hi", ranges.attr_hi},
                            {"num_lo", ranges.num_lo},
                            {"num_hi", ranges.num_hi},
                            {"k_lo", ranges.k_lo},
                            {"k_hi", ranges.k_hi},
                            {"strict_full_gap", strict_full_gap},
                            {"prompt_template_version", prompt_template_version},
                            {"prompt_header", prompt_header},
                            {"anomalous_table", anomalous_table},
                            {"cross_table", cross_table}};
        j["endpoint"] = endpoint;
        return j;
    }

    static RunConfig from_json_obj(const nlohmann::json& j) {
        RunConfig c;
        c.seed = j.value("seed", c.seed);
        c.ranges.attr_lo = j.value("attr_lo", c.ranges.attr_lo);
        c.ranges.attr_hi = j.value("attr_hi", c.ranges.attr_hi);
        c.ranges.num_lo = j.value("num_lo", c.ranges.num_lo);
        c.ranges.num_hi = j.value("num_hi", c.ranges.num_hi);
        c.ranges.k_lo = j.value("k_lo", c.ranges.k_lo);
        c.ranges.k_hi = j.value("k_hi", c.ranges.k_hi);
        c.strict_full_gap = j.value("strict_full_gap", c.strict_full_gap);
        c.prompt_template_version = j.value("prompt_template_version", c.prompt_template_version);
        c.prompt_header = j.value("prompt_header", c.prompt_header);
        if (j.contains("anomalous_table")) {
            c.anomalous_table = j.at("anomalous_table").get<std::array<std::string, 10>>();
        }
        if (j.contains("cross_table")) {
            c.cross_table = j.at("cross_table").get<std::array<std::string, 10>>();
        }
        if (j.contains("endpoint")) c.endpoint = j.at("endpoint").get<EndpointConfig>();
        return c;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        nlohmann::json j;
        in >> j;
        return from_json_obj(j);
    }
};

}  // namespace dedc
