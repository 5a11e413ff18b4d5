// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/pipeline.hpp"

#include "instructgen/analytics.hpp"
#include "instructgen/consistency.hpp"
#include "instructgen/errors.hpp"
#include "instructgen/instructions.hpp"
#include "instructgen/keywords.hpp"
#include "instructgen/random.hpp"
#include "instructgen/retrieval.hpp"
#include "instructgen/text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <sstream>

namespace instructgen {

namespace fs = std::filesystem;

std::string_view to_string(Stage stage)
{
    switch (stage) {
    case Stage::Seeded: return "Seeded";
    case Stage::Expanded: return "Expanded";
    case Stage::Retrieved: return "Retrieved";
    case Stage::Generated: return "Generated";
    case Stage::Filtered: return "Filtered";
    case Stage::Exported: return "Exported";
    }
    return "Seeded";
}

Stage parse_stage(std::string_view name)
{
    static constexpr std::array<std::string_view, 6> verbs = {"seed", "expand", "retrieve", "generate", "filter", "export"};
    for (std::size_t i = 0; i < kAllStages.size(); ++i) {
        if (iequals_ascii(name, to_string(kAllStages[i])) || iequals_ascii(name, verbs[i])) return kAllStages[i];
    }
    throw ValidationError("unknown stage: " + std::string(name));
}

std::optional<Stage> predecessor(Stage stage)
{
    if (stage == Stage::Seeded) return std::nullopt;
    return static_cast<Stage>(static_cast<int>(stage) - 1);
}

std::string_view checkpoint_name(Stage stage)
{
    switch (stage) {
    case Stage::Seeded: return "seed.pool.jsonl";
    case Stage::Expanded: return "expanded.pool.jsonl";
    case Stage::Retrieved: return "retrieved.pool.jsonl";
    case Stage::Generated: return "candidates.jsonl";
    case Stage::Filtered: return "filtered.jsonl";
    case Stage::Exported: return "dataset.jsonl";
    }
    return "";
}

// ------------------------------------------------------------------ state

std::optional<Stage> PipelineState::stage() const
{
    if (completed.empty()) return std::nullopt;
    return completed.rbegin()->first;
}

namespace {

nlohmann::ordered_json record_json(const StageRecord& r, bool with_time)
{
    nlohmann::ordered_json j;
    j["checkpoint"] = r.checkpoint;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.counts) counts[k] = v;
    j["counts"] = std::move(counts);
    j["llm_calls"] = r.llm_calls;
    if (with_time) j["wall_seconds"] = r.wall_seconds;
    return j;
}

} // namespace

std::string PipelineState::to_json() const
{
    nlohmann::ordered_json j;
    j["stage"] = stage() ? nlohmann::ordered_json(std::string(to_string(*stage()))) : nlohmann::ordered_json(nullptr);
    j["config_hash"] = config_hash;
    j["rng_seed"] = rng_seed;
    nlohmann::ordered_json stages = nlohmann::ordered_json::object();
    for (const auto& [s, r] : completed) stages[std::string(to_string(s))] = record_json(r, true);
    j["completed"] = std::move(stages);
    return j.dump(2) + "\n";
}

PipelineState PipelineState::from_json(std::string_view text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        PipelineState st;
        st.config_hash = j.at("config_hash").get<std::string>();
        st.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        for (const auto& [name, rj] : j.at("completed").items()) {
            StageRecord r;
            r.checkpoint = rj.at("checkpoint").get<std::string>();
            for (const auto& [k, v] : rj.at("counts").items()) r.counts[k] = v.get<std::uint64_t>();
            r.llm_calls = rj.at("llm_calls").get<std::uint64_t>();
            r.wall_seconds = rj.value("wall_seconds", 0.0);
            st.completed[parse_stage(name)] = std::move(r);
        }
        // Stages complete strictly in order, so the set must be a prefix.
        std::size_t n = 0;
        for (auto s : kAllStages) {
            if (!st.done(s)) break;
            ++n;
        }
        if (n != st.completed.size()) throw ParseError("state.json: completed stages are not a prefix");
        return st;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("state.json: ") + e.what());
    }
}

std::string config_hash(const PipelineConfig& config, const TaskDefinition& task)
{
    // Execution knobs that cannot change any output are left out so a run can
    // be resumed with different parallelism or retry settings.
    PipelineConfig c = config;
    const PipelineConfig defaults;
    c.parallelism = defaults.parallelism;
    c.retry_attempts = defaults.retry_attempts;
    c.retry_backoff_ms = defaults.retry_backoff_ms;
    // The corpus enters through its contents, not its location.
    c.corpus_dir.clear();
    return hex64(fnv1a64(serialize_config(c) + "\n--\n" + serialize_task(task)));
}

std::string corpus_fingerprint(const fs::path& root)
{
    std::vector<std::pair<std::string, fs::path>> files;
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (it->is_regular_file() && it->path().extension() == ".txt") {
            files.emplace_back(fs::relative(it->path(), root).generic_string(), it->path());
        }
    }
    if (ec) throw IoError("cannot scan corpus " + root.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());
    std::uint64_t h = fnv1a64("corpus");
    for (const auto& [rel, path] : files) {
        h = fnv1a64(rel, h);
        h = fnv1a64(read_file(path), h);
    }
    return hex64(h);
}

std::string RunReport::to_json() const
{
    nlohmann::ordered_json j;
    j["task"] = task_name;
    j["config_hash"] = config_hash;
    j["rng_seed"] = rng_seed;
    nlohmann::ordered_json st = nlohmann::ordered_json::object();
    for (const auto& [s, r] : stages) st[std::string(to_string(s))] = record_json(r, false);
    j["stages"] = std::move(st);
    j["dataset_size"] = dataset_size;
    j["llm_calls"] = llm_calls;
    return j.dump(2) + "\n";
}

std::string RunReport::timings_json() const
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    double total = 0;
    for (const auto& [s, r] : stages) {
        j[std::string(to_string(s))] = r.wall_seconds;
        total += r.wall_seconds;
    }
    j["total"] = total;
    return j.dump(2) + "\n";
}

// --------------------------------------------------------------- pipeline

Pipeline::Pipeline(fs::path run_dir, TaskDefinition task, PipelineConfig config, std::shared_ptr<Gateway> gateway)
    : run_dir_(std::move(run_dir)), task_(std::move(task)), config_(std::move(config)), gateway_(std::move(gateway))
{
    if (!gateway_) throw ValidationError("pipeline needs a gateway");
    validate(task_);
    validate(config_);
    hash_ = config_hash(config_, task_);
    if (!config_.skip_retrieval && !config_.corpus_dir.empty() && fs::is_directory(config_.corpus_dir)) {
        hash_ = hex64(fnv1a64(corpus_fingerprint(config_.corpus_dir), fnv1a64(hash_)));
    }
    std::error_code ec;
    fs::create_directories(run_dir_, ec);
    if (ec) throw IoError("cannot create run directory " + run_dir_.string() + ": " + ec.message());
    load_or_init_state();
}

void Pipeline::load_or_init_state()
{
    const auto path = run_dir_ / "state.json";
    if (fs::exists(path)) {
        state_ = PipelineState::from_json(read_file(path));
    } else {
        state_.config_hash = hash_;
        state_.rng_seed = config_.rng_seed;
    }
}

void Pipeline::save_state() const
{
    write_file_atomic(run_dir_ / "state.json", state_.to_json());
}

void Pipeline::invalidate_from(Stage stage)
{
    for (auto s : kAllStages) {
        if (static_cast<int>(s) < static_cast<int>(stage)) continue;
        std::error_code ec;
        fs::remove(path_of(s), ec);
        state_.completed.erase(s);
    }
}

const PipelineState& Pipeline::run_stage(Stage stage, bool force)
{
    if (auto prev = predecessor(stage); prev && !state_.done(*prev)) {
        throw StageOrderError(std::string(to_string(stage)) + " requires " + std::string(to_string(*prev)) +
                              " to complete first");
    }
    if (!state_.completed.empty() && state_.config_hash != hash_ && !force) {
        throw ValidationError("run directory " + run_dir_.string() +
                              " was produced with a different config or task; use --force or a new --out");
    }
    if (state_.done(stage) && !force) return state_;
    invalidate_from(stage);
    if (state_.completed.empty() || force) {
        state_.config_hash = hash_;
        state_.rng_seed = config_.rng_seed;
    }

    const auto calls_before = gateway_->call_count();
    const auto t0 = std::chrono::steady_clock::now();
    StageRecord rec = execute(stage);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.llm_calls = gateway_->call_count() - calls_before;
    rec.checkpoint = std::string(checkpoint_name(stage));
    state_.completed[stage] = std::move(rec);
    save_state();
    return state_;
}

namespace {

KeywordPool load_pool(const fs::path& path)
{
    return pool_from_ndjson(read_file(path));
}

std::uint64_t count_provenance(const KeywordPool& pool, Provenance p)
{
    std::uint64_t n = 0;
    for (const auto& e : pool.entries()) n += e.provenance == p ? 1 : 0;
    return n;
}

} // namespace

StageRecord Pipeline::execute(Stage stage)
{
    StageRecord rec;
    auto& counts = rec.counts;
    auto& gw = *gateway_;
    switch (stage) {
    case Stage::Seeded: {
        SeedOptions opts;
        opts.temperature = config_.generation_temperature;
        opts.max_tokens = config_.max_generation_tokens;
        auto pool = seed_keywords(task_, config_.n_seed_keywords, gw, opts);
        write_file_atomic(path_of(stage), pool_to_ndjson(pool));
        counts["keywords"] = pool.size();
        break;
    }
    case Stage::Expanded: {
        auto pool = load_pool(path_of(Stage::Seeded));
        const auto before = pool.size();
        std::uint64_t failed = 0;
        if (!config_.skip_expansion) {
            Rng rng = derive_stream(config_.rng_seed, "expand");
            auto result = run_expansion(std::move(pool), task_, config_, gw, rng);
            pool = std::move(result.pool);
            failed = result.failed_iterations;
        }
        write_file_atomic(path_of(stage), pool_to_ndjson(pool));
        counts["keywords"] = pool.size();
        counts["added"] = pool.size() - before;
        counts["prerequisite"] = count_provenance(pool, Provenance::Prerequisite);
        counts["advanced"] = count_provenance(pool, Provenance::Advanced);
        counts["failed_iterations"] = failed;
        break;
    }
    case Stage::Retrieved: {
        auto pool = load_pool(path_of(Stage::Expanded));
        const auto before = pool.size();
        std::uint64_t failed = 0;
        if (!config_.skip_retrieval) {
            if (config_.corpus_dir.empty()) throw ValidationError("retrieval needs corpus_dir (or skip_retrieval)");
            auto ingest = ingest_corpus(config_.corpus_dir, config_.chunk_tokens);
            auto index = Bm25Index::build(ingest.documents, config_.bm25_k1, config_.bm25_b);
            write_file_atomic(run_dir_ / "bm25.index.json", index.to_json());
            Rng rng = derive_stream(config_.rng_seed, "retrieve");
            auto result = retrieval_augment(std::move(pool), task_, index, ingest.documents, config_, gw, rng);
            pool = std::move(result.pool);
            failed = result.failed_rounds;
            counts["documents"] = ingest.documents.size();
            counts["files_read"] = ingest.files_read;
            counts["encoding_errors"] = ingest.encoding_errors;
        }
        write_file_atomic(path_of(stage), pool_to_ndjson(pool));
        counts["keywords"] = pool.size();
        counts["added"] = pool.size() - before;
        counts["failed_rounds"] = failed;
        break;
    }
    case Stage::Generated: {
        const auto pool = load_pool(path_of(Stage::Retrieved));
        Rng rng = derive_stream(config_.rng_seed, "generate");
        const auto jobs = enumerate_jobs(pool, config_, rng);
        write_file_atomic(run_dir_ / "jobs.jsonl", jobs_to_ndjson(jobs));
        auto batch = generate_candidates(jobs, task_, config_, gw);
        write_file_atomic(path_of(stage), candidates_to_ndjson(batch.candidates));
        std::uint64_t single = 0;
        for (const auto& j : jobs) single += j.strategy == Strategy::Single ? 1 : 0;
        counts["jobs"] = jobs.size();
        counts["single_jobs"] = single;
        counts["pair_jobs"] = jobs.size() - single;
        counts["candidates"] = batch.candidates.size();
        counts["dropped"] = batch.drops.size();
        break;
    }
    case Stage::Filtered: {
        const auto candidates = candidates_from_ndjson(read_file(path_of(Stage::Generated)));
        auto outcome = filter_and_select(candidates, task_, config_, gw);
        write_file_atomic(run_dir_ / "drops.json", drop_report_json(outcome.drops));
        write_file_atomic(path_of(stage), dataset_to_ndjson(outcome.records));
        counts["candidates"] = candidates.size();
        counts["kept"] = outcome.records.size();
        counts["below_threshold"] = outcome.drops.below_threshold;
        counts["unparseable_consensus"] = outcome.drops.unparseable_consensus;
        counts["backend"] = outcome.drops.backend;
        counts["truncated"] = outcome.drops.truncated;
        break;
    }
    case Stage::Exported: {
        const auto records = read_dataset(path_of(Stage::Filtered), task_.answer_format);
        export_dataset(records, path_of(stage));
        const auto stats = compute_stats(records);
        write_file_atomic(run_dir_ / "stats.json", stats_to_json(stats));
        counts["records"] = records.size();
        counts["unique_pairs"] = stats.unique_pairs;
        break;
    }
    }
    return rec;
}

RunReport Pipeline::report() const
{
    RunReport r;
    r.task_name = task_.name;
    r.config_hash = state_.config_hash;
    r.rng_seed = state_.rng_seed;
    r.stages = state_.completed;
    for (const auto& [s, rec] : r.stages) r.llm_calls += rec.llm_calls;
    if (auto it = r.stages.find(Stage::Exported); it != r.stages.end()) r.dataset_size = it->second.counts.at("records");
    return r;
}

RunReport Pipeline::run_all()
{
    for (auto s : kAllStages) {
        if (!state_.done(s)) run_stage(s);
    }
    auto r = report();
    write_file_atomic(run_dir_ / "report.json", r.to_json());
    write_file_atomic(run_dir_ / "timings.json", r.timings_json());
    return r;
}

} // namespace instructgen
