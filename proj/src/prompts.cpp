// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/prompts.hpp"

#include "instructgen/text_util.hpp"

namespace instructgen::prompts {

namespace {

constexpr const char* kInstructionTail =
    "The question should be clear, unambiguous, and suitable for instruction tuning.\n\n"
    "Directly output the question. Do not include the answer or any other text.\n\n"
    "Generated Question:";

} // namespace

std::string initial_keywords(const TaskDefinition& task, std::uint64_t n)
{
    const auto count = std::to_string(n);
    std::string p;
    p += "Task Context: You are an expert in " + task.domain_label + ".\n\n";
    p += "Task Description: " + task.description + "\n\n";
    p += "Instructions: Generate " + count + " core keywords that represent the most essential concepts for this task.\n\n";
    p += "Requirements:\n";
    p += "- List exactly " + count + " core concepts separated by commas\n";
    p += "- Use underscores for multi-word concepts";
    if (!task.keyword_example_compound.empty()) p += " (e.g., " + task.keyword_example_compound + ")";
    p += "\n- Single words are acceptable";
    if (!task.keyword_example_single.empty()) p += " (e.g., " + task.keyword_example_single + ")";
    p += "\n- Provide only the comma-separated list without any other text\n\n";
    p += "Core Keywords:";
    return p;
}

std::string seed_shortfall(const std::vector<std::string>& have, std::uint64_t missing)
{
    std::string p = "\n\nYour previous answer contained only " + std::to_string(have.size()) + " usable keywords";
    if (!have.empty()) p += ": " + join(have, ", ");
    p += ".\nProvide " + std::to_string(missing) +
         " additional distinct core keywords, separated by commas, that do not repeat any keyword listed above.\n\n"
         "Core Keywords:";
    return p;
}

std::string bidirectional_expansion(const TaskDefinition& task, const std::vector<std::string>& sample_keywords,
                                    std::uint64_t per_direction)
{
    std::string p;
    p += "Task Context: You are an expert in the domain related to: " + task.description + ".\n\n";
    p += "Sample Keywords: " + join(sample_keywords, ", ") + ".\n\n";
    p += "Instructions: Based on the sample keywords, generate new concepts in two directions:\n\n";
    p += "1. Prerequisite Concepts: What fundamental concepts, basic terminology, or foundational principles "
         "should learners understand BEFORE studying the sample keywords?\n\n";
    p += "2. Advanced Concepts: What specialized subfields, cutting-edge developments, or expert-level topics "
         "BUILD UPON the sample keywords?\n\n";
    p += "Requirements:\n";
    p += "- Generate " + std::to_string(per_direction) + " concepts for each direction\n";
    p += "- Use underscores for multi-word concepts\n";
    p += "- Ensure concepts are different from existing keywords\n";
    p += "- Provide comma-separated lists\n\n";
    p += "Answer in exactly two lines:\n";
    p += "Prerequisite Concepts: <comma-separated list>\n";
    p += "Advanced Concepts: <comma-separated list>";
    return p;
}

std::string retrieval_extraction(const TaskDefinition& task, const std::vector<std::string>& current_keywords,
                                 const std::vector<Passage>& passages, const std::vector<std::string>& source_names)
{
    std::string p;
    p += "Task Context: You are an expert in the domain related to: " + task.description + ".\n\n";
    p += "Current Keywords: " + join(current_keywords, ", ") + ".\n\n";
    p += "Retrieved Passages: The following passages";
    if (!source_names.empty()) p += " from authoritative sources (" + join(source_names, ", ") + ")";
    p += " contain comprehensive domain knowledge:\n";
    for (std::size_t i = 0; i < passages.size(); ++i) {
        p += "[" + std::to_string(i + 1) + "] " + std::string(trim(passages[i].text)) + "\n";
    }
    p += "\nInstructions: Extract additional domain-specific keywords directly from the retrieved passages "
         "that are missing from the current list.\n\n";
    p += "Extracted Keywords:";
    return p;
}

std::string single_instruction(const TaskDefinition& task, const std::string& keyword, const std::string& level_name,
                               const std::string& level_description)
{
    std::string p;
    p += "Task Description: " + task.description + "\n\n";
    p += "Keyword: " + keyword + "\n\n";
    p += "Question Type: " + level_name + " - " + level_description + "\n\n";
    p += "Generate a high-quality question that precisely targets the keyword and question type described above. ";
    p += "Ensure the keyword is the central focus and use appropriate domain terminology. ";
    p += kInstructionTail;
    return p;
}

std::string paired_instruction(const TaskDefinition& task, const std::string& keyword_a, const std::string& keyword_b,
                               const std::string& level_name, const std::string& level_description)
{
    std::string p;
    p += "Task Description: " + task.description + "\n\n";
    p += "Keywords: " + keyword_a + ", " + keyword_b + "\n\n";
    p += "Question Type: " + level_name + " - " + level_description + "\n\n";
    p += "Generate a high-quality question that explores relationships between both keywords while targeting "
         "the question type described above. ";
    p += "Focus on multi-concept integration and comparative reasoning. ";
    p += kInstructionTail;
    return p;
}

std::string generic_single_instruction(const TaskDefinition& task, const std::string& keyword)
{
    std::string p;
    p += "Task Description: " + task.description + "\n\n";
    p += "Keyword: " + keyword + "\n\n";
    p += "Generate a question about the keyword. ";
    p += kInstructionTail;
    return p;
}

std::string generic_paired_instruction(const TaskDefinition& task, const std::string& keyword_a,
                                       const std::string& keyword_b)
{
    std::string p;
    p += "Task Description: " + task.description + "\n\n";
    p += "Keywords: " + keyword_a + ", " + keyword_b + "\n\n";
    p += "Generate a question about both keywords. ";
    p += kInstructionTail;
    return p;
}

std::string response(const std::string& instruction, const TaskDefinition& task)
{
    return instruction + "\n\n" + task.answer_format.suffix_text;
}

} // namespace instructgen::prompts
