#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dedc/config.hpp"
#include "dedc/gateway.hpp"
#include "dedc/io.hpp"
#include "dedc/metrics.hpp"

namespace dedc {

struct LineageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "0.70"-style two-decimal ratio (not a percentage), half up.
inline std::string render_ratio(long long num, long long den) {
    if (den <= 0) throw MetricError("ratio denominator must be positive");
    const long long h = (200 * num + den) / (2 * den);
    std::string frac = std::to_string(h % 100);
    if (frac.size() < 2) frac.insert(frac.begin(), '0');
    return std::to_string(h / 100) + "." + frac;
}

struct SettingSpec {
    GapSetting gap;
    NamingKind naming;
};

inline SettingSpec setting_from_string(const std::string& s) {
    if (s == "base") return {GapSetting::Base, NamingKind::Opaque};
    if (s == "gap0") return {GapSetting::ZeroGap, NamingKind::Opaque};
    if (s == "gap100") return {GapSetting::FullGap, NamingKind::Opaque};
    if (s == "anomalous") return {GapSetting::Base, NamingKind::Anomalous};
    if (s == "cross") return {GapSetting::Base, NamingKind::CrossMapping};
    throw std::invalid_argument("unknown setting: " + s);
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOutput {
    std::vector<Scheme> schemes;
    std::vector<Sample> corpus;
    std::string corpus_hash;
    std::filesystem::path schemes_path;
    std::filesystem::path corpus_path;
};

// Hash over the corpus record bytes (header excluded, so the header can embed
// the hash it describes).
inline std::string corpus_hash_of(const std::vector<json>& records) {
    std::string buf;
    for (const auto& r : records) {
        buf += r.dump();
        buf += '\n';
    }
    return sha256_hex(buf);
}

inline GenerateOutput run_generate(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    GenerateOutput out;
    out.schemes = enumerate_schemes();
    out.corpus = generate_corpus(out.schemes, cfg.seed, cfg.ranges);

    std::vector<json> scheme_records;
    for (const auto& s : out.schemes) scheme_records.push_back(to_json_record(s));
    std::vector<json> sample_records;
    for (const auto& s : out.corpus) sample_records.push_back(to_json_record(s));
    out.corpus_hash = corpus_hash_of(sample_records);

    out.schemes_path = out_dir / "schemes.jsonl";
    out.corpus_path = out_dir / "corpus.jsonl";
    write_jsonl(out.schemes_path,
                {"schemes",
                 {{"config_hash", cfg.config_hash()},
                  {"seed", cfg.seed},
                  {"scheme_count", out.schemes.size()}}},
                scheme_records);
    write_jsonl(out.corpus_path,
                {"corpus",
                 {{"config_hash", cfg.config_hash()},
                  {"seed", cfg.seed},
                  {"corpus_hash", out.corpus_hash},
                  {"sample_count", out.corpus.size()}}},
                sample_records);
    return out;
}

inline std::vector<Sample> load_corpus(const std::filesystem::path& path,
                                       std::string* corpus_hash = nullptr,
                                       std::string* config_hash = nullptr) {
    auto f = read_jsonl(path);
    if (f.header.file_kind != "corpus") {
        throw std::runtime_error("not a corpus file: " + path.string());
    }
    if (corpus_hash) *corpus_hash = f.header.meta.value("corpus_hash", "");
    if (config_hash) *config_hash = f.header.meta.value("config_hash", "");
    std::vector<Sample> corpus;
    corpus.reserve(f.records.size());
    for (const auto& r : f.records) corpus.push_back(sample_from_json(r));
    return corpus;
}

// ---------------------------------------------------------------------------
// tasks
// ---------------------------------------------------------------------------

struct TasksOutput {
    std::vector<Task> tasks;
    long long gap_count = 0;
    std::string run_id;  // "<mode>-<setting>"
    std::filesystem::path path;
};

inline TasksOutput run_tasks(const RunConfig& cfg, const std::vector<Sample>& corpus,
                             const std::string& corpus_hash, Mode mode,
                             const std::string& setting, const std::filesystem::path& out_path) {
    const auto spec = setting_from_string(setting);
    TasksOutput out;
    out.run_id = std::string(to_string(mode)) + "-" + setting;
    out.tasks = build_run(corpus, mode, spec.gap, spec.naming, cfg);
    for (const auto& t : out.tasks) {
        if (t.gap_present) ++out.gap_count;
    }

    std::vector<json> records;
    for (const auto& t : out.tasks) records.push_back(to_json_record(t));
    out.path = out_path;
    write_jsonl(out_path,
                {"tasks",
                 {{"config_hash", cfg.config_hash()},
                  {"corpus_hash", corpus_hash},
                  {"prompt_template_hash", cfg.prompt_template_hash()},
                  {"naming_hash", cfg.naming_hash()},
                  {"run_id", out.run_id},
                  {"mode", to_string(mode)},
                  {"setting", setting},
                  {"task_count", out.tasks.size()},
                  {"gap_count", out.gap_count},
                  {"gap_fraction", render_ratio(out.gap_count,
                                                static_cast<long long>(out.tasks.size()))}}},
                records);
    return out;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOutput {
    std::vector<EvalResult> results;
    long long correct = 0, incorrect = 0, malformed = 0;
    std::string run_id;
    std::filesystem::path path;
};

inline EvalResult judge_task(const Task& t, const NamingScheme& naming,
                             const std::string& output_text) {
    EvalResult r;
    r.task_id = t.task_id;
    r.raw_output = output_text;
    Verdict v = judge(t.gold, output_text, naming);
    r.extracted_text = render_program(v.extracted);
    r.verdict = v.status;
    r.canonical_predicted.assign(v.canonical_predicted.begin(), v.canonical_predicted.end());
    r.canonical_gold.assign(v.canonical_gold.begin(), v.canonical_gold.end());
    r.diagnostics = v.diagnostics;
    if (v.status == VerdictStatus::Malformed) {
        r.labels = classify_malformed(v.diagnostics.empty() ? "no parsable program"
                                                            : v.diagnostics.front());
    } else if (v.status == VerdictStatus::Incorrect) {
        r.labels = classify(t.gold, v.extracted, naming);
    }
    return r;
}

// Evaluates a task file against a mock model or a remote endpoint. Mock runs
// are fully offline and deterministic (latency recorded as 0). Endpoint runs
// use bounded request parallelism; results keep task order regardless.
inline EvalOutput run_eval(const RunConfig& cfg, const std::vector<Task>& tasks,
                           const json& tasks_header_meta,
                           const std::optional<std::string>& mock_name,
                           const std::optional<std::filesystem::path>& cache_dir,
                           const std::filesystem::path& out_path, int parallelism = 4) {
    EvalOutput out;
    out.run_id = tasks_header_meta.value("run_id", "");
    out.results.resize(tasks.size());

    std::map<NamingKind, NamingScheme> namings;
    for (const auto& t : tasks) {
        if (!namings.count(t.naming_kind)) namings.emplace(t.naming_kind, cfg.naming(t.naming_kind));
    }

    std::string model_id;
    if (mock_name) {
        model_id = "mock:" + *mock_name;
        const auto& models = mock_models();
        auto it = models.find(*mock_name);
        if (it == models.end()) throw std::invalid_argument("unknown mock model: " + *mock_name);
        const MockModel& model = it->second;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const auto& t = tasks[i];
            const auto& naming = namings.at(t.naming_kind);
            out.results[i] = judge_task(t, naming, model(t.gold, naming));
        }
    } else {
        model_id = cfg.endpoint.model;
        std::optional<ResponseCache> cache;
        if (cache_dir) cache.emplace(*cache_dir);
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mu;
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    const auto& t = tasks[i];
                    auto completion = complete(t.prompt, cfg.endpoint,
                                               cache ? &*cache : nullptr);
                    auto r = judge_task(t, namings.at(t.naming_kind), completion.text);
                    r.attempts = completion.attempts;
                    r.latency_ms = completion.latency_ms;
                    r.from_cache = completion.from_cache;
                    out.results[i] = std::move(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    next.store(tasks.size());
                    return;
                }
            }
        };
        std::vector<std::thread> threads;
        const int n = std::max(1, std::min<int>(parallelism, static_cast<int>(tasks.size())));
        threads.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    for (const auto& r : out.results) {
        switch (r.verdict) {
            case VerdictStatus::Correct: ++out.correct; break;
            case VerdictStatus::Incorrect: ++out.incorrect; break;
            case VerdictStatus::Malformed: ++out.malformed; break;
        }
    }

    std::vector<json> records;
    for (const auto& r : out.results) records.push_back(to_json_record(r));
    json meta = {{"config_hash", cfg.config_hash()},
                 {"corpus_hash", tasks_header_meta.value("corpus_hash", "")},
                 {"prompt_template_hash", tasks_header_meta.value("prompt_template_hash", "")},
                 {"run_id", out.run_id},
                 {"mode", tasks_header_meta.value("mode", "")},
                 {"setting", tasks_header_meta.value("setting", "")},
                 {"model", model_id},
                 {"task_count", tasks.size()},
                 {"correct", out.correct},
                 {"incorrect", out.incorrect},
                 {"malformed", out.malformed}};
    out.path = out_path;
    write_jsonl(out_path, {"results", meta}, records);
    return out;
}

inline std::vector<Task> load_tasks(const std::filesystem::path& path, json* header_meta) {
    auto f = read_jsonl(path);
    if (f.header.file_kind != "tasks") {
        throw std::runtime_error("not a tasks file: " + path.string());
    }
    if (header_meta) *header_meta = f.header.meta;
    std::vector<Task> tasks;
    tasks.reserve(f.records.size());
    for (const auto& r : f.records) tasks.push_back(task_from_json(r));
    return tasks;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreOutput {
    json report;
    std::string report_text;
    std::filesystem::path json_path;
    std::filesystem::path text_path;
};

namespace detail {

struct LoadedRun {
    std::string run_id;
    std::string mode;
    std::string setting;
    long long correct = 0;
    long long total = 0;
    std::map<std::string, long long> primary_counts;
};

inline const char* kErrorColumns[] = {"primitive_confusion", "primitive_fiction",
                                      "variable_misuse", "redundancy",
                                      "omission", "incorrect_meaning", "unparseable"};

}  // namespace detail

inline ScoreOutput run_score(const std::vector<std::filesystem::path>& result_files,
                             const std::filesystem::path& out_dir) {
    if (result_files.empty()) throw std::invalid_argument("score: no result files");

    std::vector<detail::LoadedRun> runs;
    std::string corpus_hash, config_hash;
    for (const auto& path : result_files) {
        auto f = read_jsonl(path);
        if (f.header.file_kind != "results") {
            throw std::runtime_error("not a results file: " + path.string());
        }
        const std::string ch = f.header.meta.value("corpus_hash", "");
        const std::string cfgh = f.header.meta.value("config_hash", "");
        if (corpus_hash.empty()) {
            corpus_hash = ch;
            config_hash = cfgh;
        } else if (ch != corpus_hash || cfgh != config_hash) {
            throw LineageError("result files come from different corpora or configs: " +
                               path.string());
        }
        detail::LoadedRun run;
        run.run_id = f.header.meta.value("run_id", "");
        run.mode = f.header.meta.value("mode", "");
        run.setting = f.header.meta.value("setting", "");
        for (const auto& rec : f.records) {
            auto r = result_from_json(rec);
            ++run.total;
            if (r.verdict == VerdictStatus::Correct) ++run.correct;
            if (!r.labels.empty()) ++run.primary_counts[to_string(r.labels.front().kind)];
        }
        runs.push_back(std::move(run));
    }

    auto counts_of = [](const detail::LoadedRun& r) {
        return RunCounts{r.run_id, r.mode, r.setting, r.correct, r.total};
    };
    auto find_run = [&](const std::string& mode, const std::string& setting)
        -> const detail::LoadedRun* {
        for (const auto& r : runs) {
            if (r.mode == mode && r.setting == setting) return &r;
        }
        return nullptr;
    };

    json report;
    report["corpus_hash"] = corpus_hash;
    report["config_hash"] = config_hash;
    report["runs"] = json::array();
    for (const auto& r : runs) {
        report["runs"].push_back({{"run_id", r.run_id},
                                  {"mode", r.mode},
                                  {"setting", r.setting},
                                  {"correct", r.correct},
                                  {"total", r.total},
                                  {"accuracy", accuracy(counts_of(r))}});
    }

    // Decoupled scores per setting present in both modes.
    report["decoupled"] = json::array();
    std::vector<std::string> settings_seen;
    for (const auto& r : runs) {
        if (std::find(settings_seen.begin(), settings_seen.end(), r.setting) ==
            settings_seen.end()) {
            settings_seen.push_back(r.setting);
        }
    }
    for (const auto& setting : settings_seen) {
        const auto* dc = find_run("dc", setting);
        const auto* c = find_run("c", setting);
        if (!dc || !c) continue;
        auto d = decouple(counts_of(*dc), counts_of(*c));
        report["decoupled"].push_back({{"setting", setting},
                                       {"p_dc", d.p_dc},
                                       {"p_c", d.p_c},
                                       {"d_c", d.d_c},
                                       {"d_d", d.d_d},
                                       {"correct_dc", dc->correct},
                                       {"correct_c", c->correct},
                                       {"total", dc->total}});
    }

    // Deltas of each non-base setting against base, when all four runs exist.
    report["deltas"] = json::array();
    const auto* base_dc = find_run("dc", "base");
    const auto* base_c = find_run("c", "base");
    if (base_dc && base_c) {
        for (const auto& setting : settings_seen) {
            if (setting == "base") continue;
            const auto* set_dc = find_run("dc", setting);
            const auto* set_c = find_run("c", setting);
            if (!set_dc || !set_c) continue;
            auto d = setting_delta(counts_of(*base_dc), counts_of(*base_c),
                                   counts_of(*set_dc), counts_of(*set_c));
            report["deltas"].push_back(
                {{"setting", setting}, {"ds_c", d.ds_c}, {"ds_d", d.ds_d}});
        }
    }

    // Advisory error-label table: primary labels per run.
    report["errors"] = json::array();
    for (const auto& r : runs) {
        json row = {{"run_id", r.run_id}};
        for (const char* col : detail::kErrorColumns) {
            row[col] = r.primary_counts.count(col) ? r.primary_counts.at(col) : 0;
        }
        report["errors"].push_back(row);
    }

    // Plain-text rendering.
    std::string text;
    {
        char buf[256];
        text += "== runs ==\n";
        for (const auto& r : report["runs"]) {
            std::snprintf(buf, sizeof(buf), "%-16s %7lld /%5lld   acc %s\n",
                          r["run_id"].get<std::string>().c_str(), r["correct"].get<long long>(),
                          r["total"].get<long long>(), r["accuracy"].get<std::string>().c_str());
            text += buf;
        }
        if (!report["decoupled"].empty()) {
            text += "\n== decoupled ==\nsetting      P_dc    P_c     D_c     D_d\n";
            for (const auto& d : report["decoupled"]) {
                std::snprintf(buf, sizeof(buf), "%-12s %-7s %-7s %-7s %-7s\n",
                              d["setting"].get<std::string>().c_str(),
                              d["p_dc"].get<std::string>().c_str(),
                              d["p_c"].get<std::string>().c_str(),
                              d["d_c"].get<std::string>().c_str(),
                              d["d_d"].get<std::string>().c_str());
                text += buf;
            }
        }
        if (!report["deltas"].empty()) {
            text += "\n== deltas vs base ==\nsetting      ds_c    ds_d\n";
            for (const auto& d : report["deltas"]) {
                std::snprintf(buf, sizeof(buf), "%-12s %-7s %-7s\n",
                              d["setting"].get<std::string>().c_str(),
                              d["ds_c"].get<std::string>().c_str(),
                              d["ds_d"].get<std::string>().c_str());
                text += buf;
            }
        }
        text += "\n== primary error labels ==\nrun              Pc    Pf    Vm     R     O    Im  Unp\n";
        for (const auto& e : report["errors"]) {
            std::snprintf(buf, sizeof(buf), "%-16s %4lld %5lld %5lld %5lld %5lld %5lld %4lld\n",
                          e["run_id"].get<std::string>().c_str(),
                          e["primitive_confusion"].get<long long>(),
                          e["primitive_fiction"].get<long long>(),
                          e["variable_misuse"].get<long long>(),
                          e["redundancy"].get<long long>(), e["omission"].get<long long>(),
                          e["incorrect_meaning"].get<long long>(),
                          e["unparseable"].get<long long>());
            text += buf;
        }
    }

    ScoreOutput out;
    out.report = std::move(report);
    out.report_text = std::move(text);
    out.json_path = out_dir / "report.json";
    out.text_path = out_dir / "report.txt";
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream jf(out.json_path, std::ios::binary);
        jf << out.report.dump(2) << "\n";
        std::ofstream tf(out.text_path, std::ios::binary);
        tf << out.report_text;
    }
    return out;
}

}  // namespace dedc
