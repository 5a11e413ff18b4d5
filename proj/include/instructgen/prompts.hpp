// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Prompt templates for every LLM call the pipeline makes. Rendering is pure:
// identical inputs give byte-identical prompts.

#include "instructgen/task_model.hpp"

#include <string>
#include <vector>

namespace instructgen::prompts {

std::string initial_keywords(const TaskDefinition& task, std::uint64_t n);

/// Appended to the initial-keyword prompt when the previous reply was short.
std::string seed_shortfall(const std::vector<std::string>& have, std::uint64_t missing);

std::string bidirectional_expansion(const TaskDefinition& task, const std::vector<std::string>& sample_keywords,
                                    std::uint64_t per_direction);

struct Passage {
    std::string source_tag;
    std::string text;
};

std::string retrieval_extraction(const TaskDefinition& task, const std::vector<std::string>& current_keywords,
                                 const std::vector<Passage>& passages, const std::vector<std::string>& source_names);

std::string single_instruction(const TaskDefinition& task, const std::string& keyword, const std::string& level_name,
                               const std::string& level_description);
std::string paired_instruction(const TaskDefinition& task, const std::string& keyword_a, const std::string& keyword_b,
                               const std::string& level_name, const std::string& level_description);
/// Level-free variants used when cognitive levels are switched off.
std::string generic_single_instruction(const TaskDefinition& task, const std::string& keyword);
std::string generic_paired_instruction(const TaskDefinition& task, const std::string& keyword_a,
                                       const std::string& keyword_b);

/// Instruction followed by the task's response-format suffix.
std::string response(const std::string& instruction, const TaskDefinition& task);

} // namespace instructgen::prompts
