// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/gateway.hpp"
#include "instructgen/instructions.hpp"
#include "instructgen/task_model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace instructgen {

enum class AnswerVariant { Option, Decision, Numeric, Expression, Unparseable };

struct ExtractedAnswer {
    AnswerVariant variant = AnswerVariant::Unparseable;
    std::string value;

    static ExtractedAnswer unparseable() { return {}; }
    bool parseable() const { return variant != AnswerVariant::Unparseable; }
    /// Variant-qualified key used for equality, histogram order and
    /// tie-breaking, e.g. "option:B", "numeric:1234.5", "unparseable".
    std::string canonical() const;

    friend bool operator==(const ExtractedAnswer&, const ExtractedAnswer&) = default;
};

/// Canonical decimal form of a plain number ("+001,234.50" -> "1234.5"),
/// or nullopt when `text` is not one. Currency symbols, thousands
/// separators, a trailing percent sign and a trailing unit word ("7 apples")
/// are ignored.
std::optional<std::string> canonical_number(std::string_view text);

/// Applies the task's answer grammar:
///  - MultipleChoice: last `Answer: <X>` line naming one of the option labels
///  - YesNoMaybe: last `Answer: yes|no|maybe` line, lowercased
///  - FinalAnswerLine: text after the last `final answer:`, numerically
///    canonicalized when it is a number, else kept as an Expression
///  - BoxedLatex: contents of the last balanced `\boxed{...}`, numerically
///    canonicalized when they are a plain number
ExtractedAnswer extract_answer(std::string_view raw, const AnswerFormat& format);

struct ResponseSample {
    std::string raw_text;
    ExtractedAnswer extracted;
    std::size_t sample_index = 0;
};

struct VoteResult {
    /// Distinct answers in ascending canonical order with their counts.
    std::vector<std::pair<ExtractedAnswer, std::uint64_t>> histogram;
    ExtractedAnswer consensus;
    std::uint64_t consensus_count = 0;
    std::uint64_t total = 0;
    double consensus_fraction = 0;

    /// V(y) for a sample whose extracted answer is `answer`.
    double vote(const ExtractedAnswer& answer) const;
};

/// Majority vote. Unparseable samples count toward N and form their own
/// bucket but only win when every sample is Unparseable. Ties go to the
/// smallest canonical string, so the result ignores sample order.
VoteResult compute_votes(const std::vector<ExtractedAnswer>& answers);
VoteResult compute_votes(const std::vector<ResponseSample>& samples);

enum class DropReason { None, BelowThreshold, UnparseableConsensus, Backend, Truncated };
std::string_view to_string(DropReason reason);

struct Verdict {
    VoteResult votes;
    DropReason reason = DropReason::None;
    /// Earliest sample agreeing with the consensus.
    std::size_t selected = 0;

    bool kept() const { return reason == DropReason::None; }
};

/// Keep iff the consensus is parseable and consensus_count / N >= tau.
/// With `filter_enabled == false` every candidate is kept.
Verdict judge(const std::vector<ExtractedAnswer>& answers, const Fraction& tau, bool filter_enabled = true);

std::string render_response_prompt(const std::string& instruction, const TaskDefinition& task);

struct InstructionRecord {
    std::string instruction;
    std::string response;
    ExtractedAnswer consensus_answer;
    double consensus_fraction = 0;
    GenerationJob job;

    friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

struct DropCounts {
    std::uint64_t below_threshold = 0;
    std::uint64_t unparseable_consensus = 0;
    std::uint64_t backend = 0;
    std::uint64_t truncated = 0;

    friend bool operator==(const DropCounts&, const DropCounts&) = default;
};

/// `{"below_threshold", "unparseable_consensus", "backend", "truncated"}`
std::string drop_report_json(const DropCounts& drops);

struct FilterOutcome {
    std::vector<InstructionRecord> records;
    DropCounts drops;
};

/// Samples N responses per candidate, votes, and keeps consistent ones. The
/// kept list preserves candidate order and is cut to target_dataset_size.
FilterOutcome filter_and_select(const std::vector<InstructionCandidate>& candidates, const TaskDefinition& task,
                                const PipelineConfig& config, Gateway& gateway);

/// NDJSON with fields in the order instruction, response, answer, level,
/// keywords, strategy, consensus_fraction.
std::string dataset_to_ndjson(const std::vector<InstructionRecord>& records);
std::size_t export_dataset(const std::vector<InstructionRecord>& records, const std::filesystem::path& path);
/// The answer format is needed to recover each answer's variant.
std::vector<InstructionRecord> dataset_from_ndjson(std::string_view text, const AnswerFormat& format);
std::vector<InstructionRecord> read_dataset(const std::filesystem::path& path, const AnswerFormat& format);

} // namespace instructgen
