// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace instructgen {

/// Exact non-negative rational, used for the consistency threshold so that
/// `count / N >= tau` is decided in integer arithmetic.
struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    /// Accepts "3/5", "0.6", "1". Result is reduced. Throws ValidationError.
    static Fraction parse(std::string_view text);
    std::string to_string() const;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    /// count / total >= *this
    bool admits(std::uint64_t count, std::uint64_t total) const;

    friend bool operator==(const Fraction&, const Fraction&) = default;
};

enum class AnswerKind { MultipleChoice, YesNoMaybe, FinalAnswerLine, BoxedLatex };

std::string_view to_string(AnswerKind kind);
AnswerKind parse_answer_kind(std::string_view text);

struct AnswerFormat {
    AnswerKind kind = AnswerKind::FinalAnswerLine;
    /// Only meaningful for MultipleChoice.
    std::vector<std::string> options;
    /// The response-format instruction appended to response prompts.
    std::string suffix_text;

    friend bool operator==(const AnswerFormat&, const AnswerFormat&) = default;
};

/// Bundled response-format suffix for a kind. For MultipleChoice the option
/// labels are spliced into the `Answer: <A|B|C|D>` line.
std::string default_suffix(AnswerKind kind, const std::vector<std::string>& options = {"A", "B", "C", "D"});

AnswerFormat make_answer_format(AnswerKind kind, std::vector<std::string> options = {});

struct TaskDefinition {
    std::string name;
    std::string description;
    std::string domain_label;
    AnswerFormat answer_format;
    /// Optional illustrations for the seeding prompt ("e.g., ...").
    std::string keyword_example_compound;
    std::string keyword_example_single;

    friend bool operator==(const TaskDefinition&, const TaskDefinition&) = default;
};

TaskDefinition parse_task(std::string_view text);
TaskDefinition load_task(const std::filesystem::path& path);
std::string serialize_task(const TaskDefinition& task);
void validate(const TaskDefinition& task);

struct PipelineConfig {
    std::uint64_t n_seed_keywords = 50;
    std::uint64_t expansion_iterations = 100;
    std::uint64_t keywords_per_direction = 5;
    std::uint64_t expansion_sample_size = 5;
    std::uint64_t retrieval_rounds = 20;
    std::uint64_t retrieval_query_keywords = 10;
    std::uint64_t retrieval_top_k = 5;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    std::uint64_t consistency_samples = 5;
    Fraction consistency_threshold{3, 5};
    double generation_temperature = 0.7;
    std::uint64_t max_generation_tokens = 2048;
    std::uint64_t target_dataset_size = 6000;
    std::uint64_t rng_seed = 42;

    double oversample_factor = 1.5;
    std::uint64_t chunk_tokens = 512;
    std::uint64_t keyword_digest_size = 100;
    std::uint64_t parallelism = 8;
    std::uint64_t retry_attempts = 3;
    std::uint64_t retry_backoff_ms = 1000;
    std::string corpus_dir;

    // Ablation switches; each disables exactly one mechanism.
    bool skip_expansion = false;
    bool skip_retrieval = false;
    bool cognitive_levels = true;
    bool filter_enabled = true;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

using ConfigOverrides = std::map<std::string, std::string>;

/// Names of every recognised config key, in serialization order.
const std::vector<std::string>& config_keys();

/// Defaults, then file values, then overrides; validated. A missing file
/// yields defaults. Throws ParseError / ValidationError.
PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
PipelineConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);
std::string serialize_config(const PipelineConfig& config);
void validate(const PipelineConfig& config);

} // namespace instructgen
