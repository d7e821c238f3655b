#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dedc/checker.hpp"
#include "dedc/error_classifier.hpp"
#include "dedc/sample_gen.hpp"
#include "dedc/scheme_enum.hpp"
#include "dedc/task_builder.hpp"

namespace dedc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Record serialization. Keys are emitted sorted (nlohmann object ordering),
// files carry no timestamps, so identical inputs give identical bytes.
// ---------------------------------------------------------------------------

inline json to_json_record(const Scheme& s) {
    json matching = json::array();
    for (const auto& m : s.slot_matching) {
        matching.push_back({{"from", m.from}, {"to", m.to}, {"param", m.param}});
    }
    return {{"record", "scheme"},
            {"scheme_id", s.scheme_id},
            {"graph_id", s.graph_id},
            {"assignment", s.assignment},
            {"slot_matching", matching},
            {"typed_label", s.typed_label}};
}

inline json node_params_to_json(const NodeParams& p) {
    json j = json::object();
    if (p.h) j["h"] = *p.h;
    if (p.col) j["col"] = *p.col;
    if (p.val) j["val"] = *p.val;
    if (p.val2) j["val2"] = *p.val2;
    if (p.k) j["k"] = *p.k;
    return j;
}

inline NodeParams node_params_from_json(const json& j) {
    NodeParams p;
    if (j.contains("h")) p.h = j.at("h").get<std::string>();
    if (j.contains("col")) p.col = j.at("col").get<std::string>();
    if (j.contains("val")) p.val = j.at("val").get<long long>();
    if (j.contains("val2")) p.val2 = j.at("val2").get<long long>();
    if (j.contains("k")) p.k = j.at("k").get<int>();
    return p;
}

inline json to_json_record(const Sample& s) {
    json params = json::array();
    for (const auto& p : s.params) params.push_back(node_params_to_json(p));
    return {{"record", "sample"},
            {"sample_id", s.sample_id},
            {"scheme_id", s.scheme_id},
            {"graph_id", s.graph_id},
            {"assignment", s.assignment},
            {"typed_label", s.typed_label},
            {"seed", s.seed},
            {"params", params},
            {"question", s.question},
            {"gold_program_text", s.gold_text},
            {"primitive_set", std::vector<int>(s.primitive_set.begin(), s.primitive_set.end())}};
}

inline Sample sample_from_json(const json& j) {
    Sample s;
    s.sample_id = j.at("sample_id").get<int>();
    s.scheme_id = j.at("scheme_id").get<int>();
    s.graph_id = j.at("graph_id").get<int>();
    s.assignment = j.at("assignment").get<Assignment>();
    s.typed_label = j.at("typed_label").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& params = j.at("params");
    for (std::size_t i = 0; i < 4; ++i) {
        s.params[i] = node_params_from_json(params.at(i));
    }
    s.question = j.at("question").get<std::string>();
    s.gold_text = j.at("gold_program_text").get<std::string>();
    auto parsed = parse_program(s.gold_text);
    if (!parsed.diagnostics.empty()) {
        throw std::runtime_error("sample " + std::to_string(s.sample_id) +
                                 ": stored gold program does not round-trip");
    }
    s.gold = std::move(parsed.program);
    for (int p : j.at("primitive_set").get<std::vector<int>>()) s.primitive_set.insert(p);
    return s;
}

inline json to_json_record(const Task& t) {
    json pdemos = json::array();
    for (const auto& d : t.primitive_demos) {
        pdemos.push_back({{"prim", d.prim},
                          {"question", d.question},
                          {"program_text", render_program(d.program)}});
    }
    // Beyond the identifying fields, tasks carry the prompt and gold so that
    // evaluation needs no other input file.
    return {{"record", "task"},
            {"task_id", t.task_id},
            {"test_sample_id", t.test_sample_id},
            {"mode", to_string(t.mode)},
            {"gap_setting", to_string(t.gap)},
            {"naming_kind", to_string(t.naming_kind)},
            {"demo_ids", t.demo_ids},
            {"gap_present", t.gap_present},
            {"primitive_demos", pdemos},
            {"prompt", t.prompt},
            {"prompt_hash", t.prompt_hash},
            {"question", t.question},
            {"gold_program_text", t.gold_text}};
}

inline Task task_from_json(const json& j) {
    Task t;
    t.task_id = j.at("task_id").get<int>();
    t.test_sample_id = j.at("test_sample_id").get<int>();
    t.mode = mode_from_string(j.at("mode").get<std::string>());
    const auto gap = j.at("gap_setting").get<std::string>();
    t.gap = gap == "base" ? GapSetting::Base : gap == "gap0" ? GapSetting::ZeroGap
                                                             : GapSetting::FullGap;
    t.naming_kind = naming_kind_from_string(j.at("naming_kind").get<std::string>());
    t.demo_ids = j.at("demo_ids").get<std::array<int, 3>>();
    t.gap_present = j.at("gap_present").get<bool>();
    for (const auto& d : j.at("primitive_demos")) {
        PrimitiveDemo pd;
        pd.prim = d.at("prim").get<int>();
        pd.question = d.at("question").get<std::string>();
        pd.program = parse_program(d.at("program_text").get<std::string>()).program;
        t.primitive_demos.push_back(std::move(pd));
    }
    t.prompt = j.at("prompt").get<std::string>();
    t.prompt_hash = j.at("prompt_hash").get<std::string>();
    t.question = j.at("question").get<std::string>();
    t.gold_text = j.at("gold_program_text").get<std::string>();
    t.gold = parse_program(t.gold_text).program;
    return t;
}

// One judged model output.
struct EvalResult {
    int task_id = -1;
    std::string raw_output;
    std::string extracted_text;  // re-rendered parsed statements
    VerdictStatus verdict = VerdictStatus::Malformed;
    std::vector<std::string> canonical_predicted;
    std::vector<std::string> canonical_gold;
    std::vector<ErrorLabel> labels;  // empty for Correct
    std::vector<std::string> diagnostics;
    int attempts = 0;
    long long latency_ms = 0;
    bool from_cache = false;
};

inline json to_json_record(const EvalResult& r) {
    json labels = json::array();
    for (const auto& l : r.labels) {
        labels.push_back({{"kind", to_string(l.kind)}, {"evidence", l.evidence}});
    }
    return {{"record", "result"},
            {"task_id", r.task_id},
            {"raw_output", r.raw_output},
            {"extracted_program_text", r.extracted_text},
            {"verdict", to_string(r.verdict)},
            {"canonical_predicted", r.canonical_predicted},
            {"canonical_gold", r.canonical_gold},
            {"error_labels", labels},
            {"primary_label", r.labels.empty() ? "" : to_string(r.labels.front().kind)},
            {"diagnostics", r.diagnostics},
            {"attempts", r.attempts},
            {"latency_ms", r.latency_ms},
            {"from_cache", r.from_cache}};
}

inline ErrorKind error_kind_from_string(const std::string& s) {
    for (auto k : {ErrorKind::VariableMisuse, ErrorKind::PrimitiveFiction,
                   ErrorKind::PrimitiveConfusion, ErrorKind::Omission, ErrorKind::Redundancy,
                   ErrorKind::IncorrectMeaning, ErrorKind::Unparseable}) {
        if (s == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown error kind: " + s);
}

inline VerdictStatus verdict_from_string(const std::string& s) {
    for (auto v :
         {VerdictStatus::Correct, VerdictStatus::Incorrect, VerdictStatus::Malformed}) {
        if (s == to_string(v)) return v;
    }
    throw std::invalid_argument("unknown verdict: " + s);
}

inline EvalResult result_from_json(const json& j) {
    EvalResult r;
    r.task_id = j.at("task_id").get<int>();
    r.raw_output = j.at("raw_output").get<std::string>();
    r.extracted_text = j.at("extracted_program_text").get<std::string>();
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.canonical_predicted = j.at("canonical_predicted").get<std::vector<std::string>>();
    r.canonical_gold = j.at("canonical_gold").get<std::vector<std::string>>();
    for (const auto& l : j.at("error_labels")) {
        r.labels.push_back({error_kind_from_string(l.at("kind").get<std::string>()),
                            l.at("evidence").get<std::string>()});
    }
    r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    r.attempts = j.at("attempts").get<int>();
    r.latency_ms = j.at("latency_ms").get<long long>();
    r.from_cache = j.at("from_cache").get<bool>();
    return r;
}

// ---------------------------------------------------------------------------
// Line-delimited files with a leading header record
// ---------------------------------------------------------------------------

struct FileHeader {
    std::string file_kind;  // "schemes" | "corpus" | "tasks" | "results" | "report"
    json meta;              // hashes and run descriptors

    json to_json_obj() const {
        json j = meta;
        j["record"] = "header";
        j["file_kind"] = file_kind;
        return j;
    }
};

inline void write_jsonl(const std::filesystem::path& path, const FileHeader& header,
                        const std::vector<json>& records) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << header.to_json_obj().dump() << "\n";
    for (const auto& r : records) out << r.dump() << "\n";
}

struct JsonlFile {
    FileHeader header;
    std::vector<json> records;
};

inline JsonlFile read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path.string());
    JsonlFile f;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (first) {
            if (j.value("record", "") != "header") {
                throw std::runtime_error("file has no header record: " + path.string());
            }
            f.header.file_kind = j.value("file_kind", "");
            j.erase("record");
            j.erase("file_kind");
            f.header.meta = std::move(j);
            first = false;
            continue;
        }
        f.records.push_back(std::move(j));
    }
    if (first) throw std::runtime_error("empty file: " + path.string());
    return f;
}

}  // namespace dedc
