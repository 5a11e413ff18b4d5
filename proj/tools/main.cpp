// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

// instructgen: command-line driver for the instruction-dataset pipeline.

#include "instructgen/analytics.hpp"
#include "instructgen/errors.hpp"
#include "instructgen/gateway.hpp"
#include "instructgen/http_backend.hpp"
#include "instructgen/keywords.hpp"
#include "instructgen/pipeline.hpp"
#include "instructgen/task_model.hpp"
#include "instructgen/text_util.hpp"
#include "instructgen/transcript.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace instructgen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitBackend = 3;
constexpr int kExitStageOrder = 4;

struct GlobalOptions {
    std::string config;
    std::string task;
    std::string backend = "live";
    std::string transcript;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> settings;
    std::optional<std::string> tau;
    bool skip_expansion = false;
    bool skip_retrieval = false;
    bool no_cognitive_levels = false;
    bool force = false;
    bool quiet = false;
};

struct StatsOptions {
    std::string dataset;
    std::uint64_t min_pair_frequency = 1;
    std::string sunburst;
    std::uint64_t top = kSunburstPairsPerVerb;
    std::string json;
};

ConfigOverrides collect_overrides(const GlobalOptions& g)
{
    ConfigOverrides o;
    for (const auto& s : g.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + s + "'");
        o[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
    }
    if (g.seed) o["rng_seed"] = std::to_string(*g.seed);
    if (g.skip_expansion) o["skip_expansion"] = "true";
    if (g.skip_retrieval) o["skip_retrieval"] = "true";
    if (g.no_cognitive_levels) o["cognitive_levels"] = "false";
    if (g.tau) {
        // tau 0 keeps every candidate; anything else is a real threshold.
        const auto f = Fraction::parse(*g.tau);
        if (f.num == 0) {
            o["filter_enabled"] = "false";
        } else {
            o["consistency_threshold"] = f.to_string();
        }
    }
    return o;
}

PipelineConfig resolve_config(const GlobalOptions& g)
{
    const auto overrides = collect_overrides(g);
    auto config = g.config.empty() ? parse_config("", overrides) : load_config(g.config, overrides);
    // A relative corpus path in a config file is relative to that file.
    if (!g.config.empty() && !overrides.count("corpus_dir") && !config.corpus_dir.empty() &&
        fs::path(config.corpus_dir).is_relative()) {
        config.corpus_dir = (fs::path(g.config).parent_path() / config.corpus_dir).lexically_normal().string();
    }
    return config;
}

TaskDefinition resolve_task(const GlobalOptions& g)
{
    if (g.task.empty()) throw ValidationError("--task is required");
    return load_task(g.task);
}

fs::path run_dir(const GlobalOptions& g, const TaskDefinition& task)
{
    if (!g.out.empty()) return g.out;
    const auto name = canonicalize(task.name);
    return fs::path("runs") / (name.empty() ? std::string("task") : name);
}

std::shared_ptr<Gateway> make_gateway(const GlobalOptions& g, const PipelineConfig& config, const fs::path& dir)
{
    GatewayOptions opts;
    opts.max_attempts = config.retry_attempts;
    opts.backoff.initial = std::chrono::milliseconds(config.retry_backoff_ms);
    opts.parallelism = config.parallelism;

    if (g.backend == "mock") {
        if (g.transcript.empty()) throw ValidationError("--backend mock needs --transcript");
        auto mock = std::make_shared<MockBackend>();
        mock->load(load_transcript(g.transcript));
        return std::make_shared<Gateway>(mock, opts);
    }
    auto backend = std::make_shared<HttpBackend>(http_options_from_env());
    auto gw = std::make_shared<Gateway>(backend, opts);
    const fs::path record_to = g.transcript.empty() ? dir / "transcript.jsonl" : fs::path(g.transcript);
    if (record_to.has_parent_path()) fs::create_directories(record_to.parent_path());
    gw->set_transcript(std::make_shared<Transcript>(record_to));
    return gw;
}

void print_stage(const PipelineState& st, Stage s)
{
    const auto it = st.completed.find(s);
    if (it == st.completed.end()) return;
    std::printf("%-10s", std::string(to_string(s)).c_str());
    for (const auto& [k, v] : it->second.counts) std::printf(" %s=%llu", k.c_str(), static_cast<unsigned long long>(v));
    std::printf(" llm_calls=%llu (%.2fs)\n", static_cast<unsigned long long>(it->second.llm_calls),
                it->second.wall_seconds);
}

int cmd_stage(const GlobalOptions& g, Stage stage)
{
    const auto task = resolve_task(g);
    const auto config = resolve_config(g);
    const auto dir = run_dir(g, task);
    Pipeline p(dir, task, config, make_gateway(g, config, dir));
    const bool was_done = p.state().done(stage);
    p.run_stage(stage, g.force);
    if (was_done && !g.force) {
        std::fprintf(stderr, "%s already complete in %s (use --force to rerun)\n", std::string(to_string(stage)).c_str(),
                     dir.string().c_str());
    }
    if (!g.quiet) print_stage(p.state(), stage);
    return kExitOk;
}

int cmd_run(const GlobalOptions& g)
{
    const auto task = resolve_task(g);
    const auto config = resolve_config(g);
    const auto dir = run_dir(g, task);
    Pipeline p(dir, task, config, make_gateway(g, config, dir));
    if (g.force) p.run_stage(Stage::Seeded, true);
    const auto report = p.run_all();
    if (!g.quiet) {
        for (auto s : kAllStages) print_stage(p.state(), s);
        std::printf("dataset: %s (%llu records)\n", p.path_of(Stage::Exported).string().c_str(),
                    static_cast<unsigned long long>(report.dataset_size));
    }
    return kExitOk;
}

std::vector<std::string> read_instructions(const fs::path& path)
{
    std::vector<std::string> out;
    int lineno = 0;
    for (auto line : split_lines(read_file(path))) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(line).at("instruction").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

int cmd_stats(const GlobalOptions& g, const StatsOptions& o)
{
    fs::path dataset = o.dataset;
    if (dataset.empty()) {
        if (g.out.empty() && g.task.empty()) throw ValidationError("stats needs --dataset, --out or --task");
        dataset = (g.out.empty() ? run_dir(g, resolve_task(g)) : fs::path(g.out)) / checkpoint_name(Stage::Exported);
    }
    const auto instructions = read_instructions(dataset);
    const auto stats = compute_stats(instructions, o.min_pair_frequency);
    std::fputs(stats_table(stats).c_str(), stdout);
    if (!o.json.empty()) write_file_atomic(o.json, stats_to_json(stats));
    if (!o.sunburst.empty()) {
        // The sunburst view only shows pairs occurring more than ten times.
        const auto view = compute_stats(instructions, std::max(o.min_pair_frequency, kSunburstMinFrequency));
        const auto rows = export_sunburst(view, o.top, o.sunburst);
        std::printf("sunburst: %zu rows -> %s\n", rows, o.sunburst.c_str());
    }
    return kExitOk;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const StageOrderError*>(&e)) return kExitStageOrder;
    if (dynamic_cast<const TransportError*>(&e) || dynamic_cast<const BackendError*>(&e) ||
        dynamic_cast<const ScriptExhausted*>(&e) || dynamic_cast<const SeedShortfall*>(&e)) {
        return kExitBackend;
    }
    return kExitValidation;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Synthetic instruction dataset pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "Pipeline config file (key = value)");
    app.add_option("--task", g.task, "Task definition file");
    app.add_option("--backend", g.backend, "LLM backend")->check(CLI::IsMember({"live", "mock"}));
    app.add_option("--transcript", g.transcript, "Transcript to replay (mock) or record to (live)");
    app.add_option("--seed", g.seed, "Root RNG seed");
    app.add_option("--out", g.out, "Run directory (default runs/<task name>)");
    app.add_option("--set", g.settings, "Config override key=value (repeatable)");
    app.add_option("--tau", g.tau, "Consistency threshold, e.g. 3/5; 0 disables filtering");
    app.add_flag("--skip-expansion", g.skip_expansion, "Pass the seed pool through unexpanded");
    app.add_flag("--skip-retrieval", g.skip_retrieval, "Pass the expanded pool through without retrieval");
    app.add_flag("--no-cognitive-levels", g.no_cognitive_levels, "Generate level-free questions");
    app.add_flag("--force", g.force, "Rerun a completed stage and discard later ones");
    app.add_flag("-q,--quiet", g.quiet, "Print nothing on success");

    struct Sub {
        const char* name;
        const char* help;
        Stage stage;
    };
    const Sub stage_cmds[] = {
        {"seed", "Generate the initial keyword pool", Stage::Seeded},
        {"expand", "Bi-directional keyword expansion", Stage::Expanded},
        {"retrieve", "Retrieval-augmented keyword extraction", Stage::Retrieved},
        {"generate", "Generate candidate instructions", Stage::Generated},
        {"filter", "Self-consistency filtering", Stage::Filtered},
        {"export", "Write the final dataset", Stage::Exported},
    };
    std::optional<Stage> chosen_stage;
    for (const auto& s : stage_cmds) {
        app.add_subcommand(s.name, s.help)->callback([&chosen_stage, st = s.stage] { chosen_stage = st; });
    }
    auto* run = app.add_subcommand("run", "Run every remaining stage");
    auto* replay = app.add_subcommand("replay", "Rerun the pipeline against a recorded transcript");
    auto* stats = app.add_subcommand("stats", "Diversity statistics for a dataset");
    StatsOptions so;
    stats->add_option("--dataset", so.dataset, "Dataset NDJSON (default <out>/dataset.jsonl)");
    stats->add_option("--min-pair-frequency", so.min_pair_frequency, "Ignore rarer verb-noun pairs");
    stats->add_option("--sunburst", so.sunburst, "Write verb,noun,count CSV here");
    stats->add_option("--top", so.top, "Pairs per verb in the sunburst CSV");
    stats->add_option("--json", so.json, "Write the stats report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (chosen_stage) return cmd_stage(g, *chosen_stage);
        if (run->parsed()) return cmd_run(g);
        if (replay->parsed()) {
            if (g.transcript.empty()) throw ValidationError("replay needs --transcript");
            g.backend = "mock";
            return cmd_run(g);
        }
        if (stats->parsed()) return cmd_stats(g, so);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "instructgen: %s: %s\n", error_kind(e).c_str(), e.what());
        return exit_code_for(e);
    }
    return kExitOk;
}
