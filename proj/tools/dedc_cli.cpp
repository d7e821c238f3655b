// dedc command-line tool: generate / tasks / eval / score.
//
// Exit codes: 0 success, 1 validation or lineage error, 2 infeasible demo
// selection, 3 transport failure after retries.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dedc/dedc.hpp"

namespace {

dedc::RunConfig load_config(const std::string& config_path, long long seed_flag,
                            bool seed_given) {
    dedc::RunConfig cfg;
    if (!config_path.empty()) cfg = dedc::RunConfig::from_file(config_path);
    if (seed_given) cfg.seed = static_cast<std::uint64_t>(seed_flag);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DEDC benchmark toolkit: corpus generation, task assembly, "
                 "evaluation, and scoring"};
    app.require_subcommand(1);
    // Let global options (--config, --seed) appear after the subcommand too.
    app.fallthrough();

    std::string config_path;
    long long seed_flag = 1;
    app.add_option("--config", config_path, "Run-config JSON file")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed_flag, "Corpus seed (overrides config)");

    // generate
    auto* gen = app.add_subcommand("generate", "Enumerate schemes and instantiate the corpus");
    std::string gen_out = "out";
    gen->add_option("--out", gen_out, "Output directory")->capture_default_str();

    // tasks
    auto* tasks = app.add_subcommand("tasks", "Assemble prompts for one run");
    std::string tasks_corpus, tasks_mode = "dc", tasks_setting = "base", tasks_out;
    bool non_strict = false;
    tasks->add_option("--corpus", tasks_corpus, "corpus.jsonl from `generate`")->required();
    tasks->add_option("--mode", tasks_mode, "dc | c")->capture_default_str();
    tasks->add_option("--setting", tasks_setting, "base | gap0 | gap100 | anomalous | cross")
        ->capture_default_str();
    tasks->add_option("--out", tasks_out, "Output tasks.jsonl path")->required();
    tasks->add_flag("--no-strict", non_strict,
                    "Relax gap100 to `some demo label differs` instead of `all differ`");

    // eval
    auto* eval = app.add_subcommand("eval", "Run a model over a task file and judge outputs");
    std::string eval_tasks, eval_out, eval_mock, eval_endpoint, eval_cache;
    int eval_parallel = 4;
    eval->add_option("--tasks", eval_tasks, "tasks.jsonl from `tasks`")->required();
    eval->add_option("--out", eval_out, "Output results.jsonl path")->required();
    eval->add_option("--mock", eval_mock,
                     "Mock model: gold_oracle | confuser | omitter | babbler");
    eval->add_option("--endpoint", eval_endpoint, "Endpoint config JSON file");
    eval->add_option("--cache-dir", eval_cache, "Response cache directory (endpoint mode)");
    eval->add_option("--parallelism", eval_parallel, "Concurrent requests (endpoint mode)")
        ->capture_default_str();

    // score
    auto* score = app.add_subcommand("score", "Aggregate result files into a report");
    std::vector<std::string> score_results;
    std::string score_out = "out";
    score->add_option("--results", score_results, "results.jsonl files")->required();
    score->add_option("--out", score_out, "Report output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        dedc::RunConfig cfg = load_config(config_path, seed_flag, seed_opt->count() > 0);

        if (gen->parsed()) {
            auto out = dedc::run_generate(cfg, gen_out);
            std::printf("schemes: %zu -> %s\n", out.schemes.size(),
                        out.schemes_path.string().c_str());
            std::printf("samples: %zu -> %s\n", out.corpus.size(),
                        out.corpus_path.string().c_str());
            std::printf("corpus_hash: %s\n", out.corpus_hash.c_str());
        } else if (tasks->parsed()) {
            if (non_strict) cfg.strict_full_gap = false;
            std::string corpus_hash;
            auto corpus = dedc::load_corpus(tasks_corpus, &corpus_hash);
            auto mode = dedc::mode_from_string(tasks_mode);
            auto out = dedc::run_tasks(cfg, corpus, corpus_hash, mode, tasks_setting, tasks_out);
            std::printf("tasks: %zu -> %s\n", out.tasks.size(), out.path.string().c_str());
            std::printf("gap_fraction: %s\n",
                        dedc::render_ratio(out.gap_count,
                                           static_cast<long long>(out.tasks.size()))
                            .c_str());
        } else if (eval->parsed()) {
            if (eval_mock.empty() == eval_endpoint.empty()) {
                std::fprintf(stderr, "eval: pass exactly one of --mock or --endpoint\n");
                return 1;
            }
            if (!eval_endpoint.empty()) {
                cfg.endpoint = dedc::EndpointConfig::from_file(eval_endpoint);
            }
            nlohmann::json header_meta;
            auto task_list = dedc::load_tasks(eval_tasks, &header_meta);
            std::optional<std::string> mock;
            if (!eval_mock.empty()) mock = eval_mock;
            std::optional<std::filesystem::path> cache;
            if (!eval_cache.empty()) cache = eval_cache;
            auto out = dedc::run_eval(cfg, task_list, header_meta, mock, cache, eval_out,
                                      eval_parallel);
            std::printf("results: %zu -> %s\n", out.results.size(), out.path.string().c_str());
            std::printf("correct %lld / incorrect %lld / malformed %lld\n", out.correct,
                        out.incorrect, out.malformed);
        } else if (score->parsed()) {
            std::vector<std::filesystem::path> paths(score_results.begin(), score_results.end());
            auto out = dedc::run_score(paths, score_out);
            std::fputs(out.report_text.c_str(), stdout);
            std::printf("\nreport: %s\n", out.json_path.string().c_str());
        }
        return 0;
    } catch (const dedc::InfeasibleSelection& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 2;
    } catch (const dedc::CredentialError& e) {
        std::fprintf(stderr, "credential error: %s\n", e.what());
        return 3;
    } catch (const dedc::TransportError& e) {
        std::fprintf(stderr, "transport error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
