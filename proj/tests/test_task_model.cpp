// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/errors.hpp"
#include "instructgen/task_model.hpp"
#include "instructgen/text_util.hpp"
#include "support/test_util.hpp"

#include <gtest/gtest.h>

using namespace instructgen;

TEST(Fraction, ParsesAndReduces)
{
    EXPECT_EQ(Fraction::parse("3/5"), (Fraction{3, 5}));
    EXPECT_EQ(Fraction::parse("0.6"), (Fraction{3, 5}));
    EXPECT_EQ(Fraction::parse(" 6 / 10 "), (Fraction{3, 5}));
    EXPECT_EQ(Fraction::parse("1"), (Fraction{1, 1}));
    EXPECT_EQ(Fraction::parse("0"), (Fraction{0, 1}));
    EXPECT_EQ(Fraction::parse("3/5").to_string(), "3/5");
    EXPECT_THROW(Fraction::parse("1/0"), ValidationError);
    EXPECT_THROW(Fraction::parse("-1/2"), ValidationError);
    EXPECT_THROW(Fraction::parse("abc"), ValidationError);
    EXPECT_THROW(Fraction::parse("0."), ValidationError);
}

TEST(Fraction, AdmitsIsExactAtTheBoundary)
{
    const auto tau = Fraction::parse("3/5");
    EXPECT_TRUE(tau.admits(3, 5));
    EXPECT_FALSE(tau.admits(2, 5));
    EXPECT_TRUE(tau.admits(6, 10));
    EXPECT_FALSE(tau.admits(599999, 1000000));
    // 0.6 as a double is slightly below 3/5; the rational must not inherit that.
    EXPECT_TRUE(Fraction::parse("0.6").admits(3, 5));
}

TEST(AnswerFormat, BundledSuffixes)
{
    EXPECT_EQ(default_suffix(AnswerKind::MultipleChoice),
              "Return exactly two lines and nothing else:\n"
              "Reason: <1\xE2\x80\x93" "3 sentence explanation>\n"
              "Answer: <A|B|C|D>");
    const auto last_line = [](const std::string& s) { return s.substr(s.rfind('\n') + 1); };
    EXPECT_EQ(last_line(default_suffix(AnswerKind::MultipleChoice, {"A", "B", "C", "D", "E"})), "Answer: <A|B|C|D|E>");
    EXPECT_EQ(last_line(default_suffix(AnswerKind::YesNoMaybe)), "Answer: <yes|no|maybe>");
    EXPECT_EQ(default_suffix(AnswerKind::FinalAnswerLine),
              "Provide a step-by-step reasoning process and then write the final numerical answer on a new line in "
              "the format: final answer: <answer>");
    EXPECT_EQ(default_suffix(AnswerKind::BoxedLatex),
              "Provide a step-by-step reasoning process and then write the final answer in the LaTeX boxed tag: "
              "$\\boxed{<answer>}$");
}

TEST(AnswerFormat, KindNames)
{
    for (auto k : {AnswerKind::MultipleChoice, AnswerKind::YesNoMaybe, AnswerKind::FinalAnswerLine,
                   AnswerKind::BoxedLatex}) {
        EXPECT_EQ(parse_answer_kind(to_string(k)), k);
    }
    EXPECT_EQ(parse_answer_kind("FinalAnswerLine"), AnswerKind::FinalAnswerLine);
    EXPECT_EQ(parse_answer_kind("Multiple-Choice"), AnswerKind::MultipleChoice);
    EXPECT_THROW(parse_answer_kind("essay"), ValidationError);
}

TEST(TaskDefinition, ParsesAndRoundTrips)
{
    const auto task = parse_task("name = cfa\n"
                                 "description = \"Chartered financial analyst exam questions.\"\n"
                                 "answer_format = multiple_choice\n"
                                 "options = A, B, C\n"
                                 "keyword_example_single = duration\n");
    EXPECT_EQ(task.name, "cfa");
    EXPECT_EQ(task.domain_label, "cfa");
    EXPECT_EQ(task.answer_format.options, (std::vector<std::string>{"A", "B", "C"}));
    EXPECT_NE(task.answer_format.suffix_text.find("Answer: <A|B|C>"), std::string::npos);
    EXPECT_EQ(parse_task(serialize_task(task)), task);
}

TEST(TaskDefinition, CustomSuffixSurvivesRoundTrip)
{
    auto task = parse_task("description = d\nanswer_format = boxed_latex\nresponse_suffix = \"Box it.\"\n");
    EXPECT_EQ(task.answer_format.suffix_text, "Box it.");
    EXPECT_EQ(parse_task(serialize_task(task)), task);
}

TEST(TaskDefinition, Rejections)
{
    EXPECT_THROW(parse_task("description = d\n"), ValidationError);                          // no format
    EXPECT_THROW(parse_task("answer_format = yes_no_maybe\n"), ValidationError);               // no description
    EXPECT_THROW(parse_task("description = d\nanswer_format = final_answer_line\ncolour = red\n"), ValidationError);
    EXPECT_THROW(parse_task("description = d\nanswer_format = yes_no_maybe\noptions = A,B\n"), ValidationError);
    EXPECT_THROW(parse_task("description = d\nanswer_format = multiple_choice\noptions = A\n"), ValidationError);
    EXPECT_THROW(parse_task("description = d\nanswer_format = multiple_choice\noptions = A,a\n"), ValidationError);
    EXPECT_THROW(parse_task("description = d\nanswer_format = multiple_choice\noptions = A,A\n"), ValidationError);
}

TEST(PipelineConfig, DefaultsMatchThePublishedSetup)
{
    const PipelineConfig c;
    EXPECT_EQ(c.n_seed_keywords, 50u);
    EXPECT_EQ(c.expansion_iterations, 100u);
    EXPECT_EQ(c.keywords_per_direction, 5u);
    EXPECT_EQ(c.retrieval_top_k, 5u);
    EXPECT_EQ(c.consistency_samples, 5u);
    EXPECT_EQ(c.consistency_threshold, (Fraction{3, 5}));
    EXPECT_DOUBLE_EQ(c.generation_temperature, 0.7);
    EXPECT_EQ(c.max_generation_tokens, 2048u);
    EXPECT_EQ(c.target_dataset_size, 6000u);
    EXPECT_NO_THROW(validate(c));
}

TEST(PipelineConfig, SerializeParseIsIdentity)
{
    PipelineConfig c;
    c.bm25_k1 = 0.9;
    c.consistency_threshold = Fraction{4, 5};
    c.corpus_dir = "corpora/my docs";
    c.skip_retrieval = true;
    c.oversample_factor = 1.25;
    EXPECT_EQ(parse_config(serialize_config(c)), c);
    EXPECT_EQ(config_keys().size(), 26u);
}

TEST(PipelineConfig, OverridesApplyLast)
{
    testutil::TempDir dir;
    write_file_atomic(dir / "c.conf", "rng_seed = 1\nconsistency_samples = 7\n");
    const auto c = load_config(dir / "c.conf", {{"rng_seed", "9"}});
    EXPECT_EQ(c.rng_seed, 9u);
    EXPECT_EQ(c.consistency_samples, 7u);
    EXPECT_EQ(load_config(dir / "absent.conf"), PipelineConfig{});
}

TEST(PipelineConfig, ValidationErrors)
{
    EXPECT_THROW(parse_config("mystery = 1\n"), ValidationError);
    EXPECT_THROW(parse_config("consistency_samples = 0\n"), ValidationError);
    EXPECT_THROW(parse_config("consistency_threshold = 0\n"), ValidationError);
    EXPECT_THROW(parse_config("consistency_threshold = 6/5\n"), ValidationError);
    EXPECT_THROW(parse_config("bm25_b = 1.5\n"), ValidationError);
    EXPECT_THROW(parse_config("generation_temperature = -1\n"), ValidationError);
    EXPECT_THROW(parse_config("oversample_factor = 0.5\n"), ValidationError);
    EXPECT_THROW(parse_config("rng_seed = -3\n"), ValidationError);
    EXPECT_THROW(parse_config("skip_retrieval = maybe\n"), ValidationError);
}
