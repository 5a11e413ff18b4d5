// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/gateway.hpp"
#include "instructgen/task_model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace instructgen {

enum class Stage { Seeded, Expanded, Retrieved, Generated, Filtered, Exported };

inline constexpr std::array<Stage, 6> kAllStages = {Stage::Seeded,    Stage::Expanded, Stage::Retrieved,
                                                    Stage::Generated, Stage::Filtered, Stage::Exported};

/// "Seeded", "Expanded", ...
std::string_view to_string(Stage stage);
/// Accepts stage names case-insensitively and the verbs used on the
/// command line ("seed", "expand", "retrieve", "generate", "filter", "export").
Stage parse_stage(std::string_view name);
std::optional<Stage> predecessor(Stage stage);
/// Name of the checkpoint file the stage writes inside the run directory.
std::string_view checkpoint_name(Stage stage);

struct StageRecord {
    std::string checkpoint;
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t llm_calls = 0;
    double wall_seconds = 0;

    friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

struct PipelineState {
    std::string config_hash;
    std::uint64_t rng_seed = 0;
    std::map<Stage, StageRecord> completed;

    /// Last completed stage, if any.
    std::optional<Stage> stage() const;
    bool done(Stage s) const { return completed.count(s) > 0; }

    std::string to_json() const;
    static PipelineState from_json(std::string_view text);
};

/// Hash of the effective config and task; a resumed run must match it.
std::string config_hash(const PipelineConfig& config, const TaskDefinition& task);
/// Hash over the relative paths and bytes of every *.txt file under root.
std::string corpus_fingerprint(const std::filesystem::path& root);

struct RunReport {
    std::string task_name;
    std::string config_hash;
    std::uint64_t rng_seed = 0;
    std::map<Stage, StageRecord> stages;
    std::uint64_t dataset_size = 0;
    std::uint64_t llm_calls = 0;

    /// Counts only, so identical runs give identical bytes.
    std::string to_json() const;
    /// Wall time per stage in seconds.
    std::string timings_json() const;
};

/// Orchestrates the stages inside one run directory. Each stage reads its
/// predecessor's checkpoint, writes its own atomically, then updates
/// state.json. Errors leave earlier checkpoints untouched.
class Pipeline {
  public:
    Pipeline(std::filesystem::path run_dir, TaskDefinition task, PipelineConfig config,
             std::shared_ptr<Gateway> gateway);

    const PipelineState& state() const { return state_; }
    const std::filesystem::path& run_dir() const { return run_dir_; }
    std::filesystem::path path_of(Stage stage) const { return run_dir_ / checkpoint_name(stage); }

    /// Runs one stage. Throws StageOrderError when the predecessor has not
    /// completed. A completed stage is left alone unless `force`, which
    /// reruns it and discards every later stage.
    const PipelineState& run_stage(Stage stage, bool force = false);

    /// Runs all remaining stages in order, resuming after the last one
    /// completed, and writes report.json and timings.json.
    RunReport run_all();

    RunReport report() const;

  private:
    void load_or_init_state();
    void save_state() const;
    void invalidate_from(Stage stage);
    StageRecord execute(Stage stage);

    std::filesystem::path run_dir_;
    TaskDefinition task_;
    PipelineConfig config_;
    std::shared_ptr<Gateway> gateway_;
    PipelineState state_;
    std::string hash_;
};

} // namespace instructgen
