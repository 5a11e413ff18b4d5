// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/gateway.hpp"
#include "instructgen/keywords.hpp"
#include "instructgen/random.hpp"
#include "instructgen/task_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace instructgen {

enum class CognitiveLevel { Remember, Understand, Apply, Analyze, Evaluate, Create };

inline constexpr std::array<CognitiveLevel, 6> kAllLevels = {
    CognitiveLevel::Remember, CognitiveLevel::Understand, CognitiveLevel::Apply,
    CognitiveLevel::Analyze,  CognitiveLevel::Evaluate,   CognitiveLevel::Create,
};

/// Levels allowed for keyword pairs.
inline constexpr std::array<CognitiveLevel, 4> kRelationalLevels = {
    CognitiveLevel::Understand, CognitiveLevel::Apply, CognitiveLevel::Analyze, CognitiveLevel::Evaluate,
};

bool is_relational(CognitiveLevel level);
std::string_view to_string(CognitiveLevel level);    ///< "Apply"
std::string_view gerund(CognitiveLevel level);       ///< "Applying"
std::string_view description(CognitiveLevel level);  ///< prompt text for the level
CognitiveLevel parse_level(std::string_view name);

enum class Strategy { Single, Pair };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

struct GenerationJob {
    Strategy strategy = Strategy::Single;
    /// One keyword for Single, two (ascending canonical order) for Pair.
    std::vector<std::string> keywords;
    /// Empty only when cognitive levels are disabled.
    std::optional<CognitiveLevel> level;
    std::string job_id;

    /// Human-readable key, e.g. "single/limit/Apply"; used as the request tag stem.
    std::string key() const;

    friend bool operator==(const GenerationJob&, const GenerationJob&) = default;
};

GenerationJob make_single_job(std::string keyword, std::optional<CognitiveLevel> level);
/// Orders the two keywords. Throws ValidationError for equal keywords or a
/// non-relational level.
GenerationJob make_pair_job(std::string a, std::string b, std::optional<CognitiveLevel> level);

struct EnumerationOptions {
    /// Total job budget; nullopt means unlimited (every single and pair job).
    std::optional<std::uint64_t> budget;
    bool cognitive_levels = true;
};

/// Budget for a config: ceil(target_dataset_size * oversample_factor).
std::uint64_t job_budget(const PipelineConfig& config);

/// All |pool| x 6 single jobs when they fit the budget, with uniformly sampled
/// pair jobs filling what is left. Otherwise singles are subsampled to 60% of
/// the budget and pairs fill the remainder. Output order is shuffled.
std::vector<GenerationJob> enumerate_jobs(const KeywordPool& pool, const EnumerationOptions& options, Rng& rng);
std::vector<GenerationJob> enumerate_jobs(const KeywordPool& pool, const PipelineConfig& config, Rng& rng);

std::string render_instruction_prompt(const GenerationJob& job, const TaskDefinition& task);

/// Strips surrounding quotes and leading "Question:" style labels.
/// Returns an empty string when nothing usable remains.
std::string clean_completion(std::string_view raw);

struct InstructionCandidate {
    std::string text;
    GenerationJob job;
    std::string raw_completion;
};

struct CandidateDrop {
    std::string job_id;
    std::string reason; ///< "empty" or the gateway error kind
    std::string detail;
};

struct CandidateBatch {
    std::vector<InstructionCandidate> candidates;
    std::vector<CandidateDrop> drops;
};

/// One single-sample request per job, run through the gateway batch API.
CandidateBatch generate_candidates(const std::vector<GenerationJob>& jobs, const TaskDefinition& task,
                                   const PipelineConfig& config, Gateway& gateway);

/// Checkpoint: `{"job_id","strategy","keywords","level","instruction"}` per line.
std::string candidates_to_ndjson(const std::vector<InstructionCandidate>& candidates);
std::vector<InstructionCandidate> candidates_from_ndjson(std::string_view text);

std::string jobs_to_ndjson(const std::vector<GenerationJob>& jobs);

} // namespace instructgen
