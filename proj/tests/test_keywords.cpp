// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/errors.hpp"
#include "instructgen/keywords.hpp"
#include "instructgen/prompts.hpp"
#include "support/test_util.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <set>

using namespace instructgen;

namespace {

std::vector<std::string> canon(const ParsedKeywords& p)
{
    std::vector<std::string> out;
    for (const auto& k : p.keywords) out.push_back(k.canonical);
    return out;
}

std::string numbered_terms(const std::string& stem, int from, int to)
{
    std::string out;
    for (int i = from; i < to; ++i) out += (i > from ? ", " : "") + stem + std::to_string(i);
    return out;
}

PipelineConfig small_config()
{
    PipelineConfig c;
    c.expansion_iterations = 3;
    c.keywords_per_direction = 5;
    c.expansion_sample_size = 5;
    return c;
}

} // namespace

TEST(Canonicalize, NormalizesAndIsIdempotent)
{
    EXPECT_EQ(canonicalize("Risk Management"), "risk_management");
    EXPECT_EQ(canonicalize("  net-present   value "), "net_present_value");
    EXPECT_EQ(canonicalize("Black–Scholes (model)!"), "blackscholes_model");
    EXPECT_EQ(canonicalize("__a__b__"), "a_b");
    EXPECT_EQ(canonicalize("?!"), "");
    const std::regex shape("[a-z0-9]+(_[a-z0-9]+)*");
    for (const char* s : {"CAPM beta", "x--y", "10-K filing", "ROE/ROA", "  ", "Ünïcode words"}) {
        const auto c = canonicalize(s);
        EXPECT_EQ(canonicalize(c), c) << s;
        if (!c.empty()) EXPECT_TRUE(std::regex_match(c, shape)) << c;
    }
}

TEST(ParseKeywordList, Examples)
{
    EXPECT_EQ(canon(parse_keyword_list("asset_valuation, portfolio, Risk Management")),
              (std::vector<std::string>{"asset_valuation", "portfolio", "risk_management"}));
    EXPECT_EQ(canon(parse_keyword_list("a, a, A")), std::vector<std::string>{"a"});
    EXPECT_TRUE(parse_keyword_list("").keywords.empty());
}

TEST(ParseKeywordList, MarkersLongItemsAndDisplayForm)
{
    const auto p = parse_keyword_list("1. Duration\n2) Convexity\n- yield curve, * spread\n"
                                      "one two three four five six seven, ,  \n\xE2\x80\xA2 beta");
    EXPECT_EQ(canon(p), (std::vector<std::string>{"duration", "convexity", "yield_curve", "spread", "beta"}));
    EXPECT_EQ(p.dropped, 1u);
    EXPECT_EQ(p.keywords[2].display, "yield curve");
}

TEST(ParseExpansionReply, LabeledAndUnlabeled)
{
    auto [pre, adv] = parse_expansion_reply("Prerequisite Concepts: limit, function\n**Advanced Concepts:** gradient");
    EXPECT_EQ(canon(pre), (std::vector<std::string>{"limit", "function"}));
    EXPECT_EQ(canon(adv), std::vector<std::string>{"gradient"});

    auto [pre2, adv2] = parse_expansion_reply("Prerequisite concepts:\n- limit\n- slope\nAdvanced concepts:\n- hessian\n");
    EXPECT_EQ(canon(pre2), (std::vector<std::string>{"limit", "slope"}));
    EXPECT_EQ(canon(adv2), std::vector<std::string>{"hessian"});

    auto [pre3, adv3] = parse_expansion_reply("limit, slope\ngradient, jacobian");
    EXPECT_EQ(canon(pre3), (std::vector<std::string>{"limit", "slope"}));
    EXPECT_EQ(canon(adv3), (std::vector<std::string>{"gradient", "jacobian"}));

    auto [pre4, adv4] = parse_expansion_reply("");
    EXPECT_TRUE(pre4.keywords.empty());
    EXPECT_TRUE(adv4.keywords.empty());
}

TEST(KeywordPool, InsertKeepsFirstAndRejectsBadCanonicals)
{
    KeywordPool pool;
    EXPECT_TRUE(pool.insert({"beta", "Beta"}, Provenance::Seed, 0));
    EXPECT_FALSE(pool.insert({"beta", "BETA"}, Provenance::Advanced, 4));
    EXPECT_EQ(pool.size(), 1u);
    EXPECT_EQ(pool[0].keyword.display, "Beta");
    EXPECT_THROW(pool.insert({"Not Canonical", "x"}, Provenance::Seed, 0), ValidationError);
    EXPECT_THROW(pool.insert({"", "x"}, Provenance::Seed, 0), ValidationError);
}

TEST(KeywordPool, NdjsonRoundTrip)
{
    KeywordPool pool;
    pool.insert({"beta", "Beta"}, Provenance::Seed, 0);
    pool.insert({"yield_curve", "yield \"curve\""}, Provenance::Prerequisite, 3);
    pool.insert({"var", "VaR"}, Provenance::Retrieved, 2);
    const auto text = pool_to_ndjson(pool);
    EXPECT_EQ(pool_from_ndjson(text), pool);
    EXPECT_NE(text.find("\"provenance\":\"prerequisite\""), std::string::npos);
    EXPECT_THROW(pool_from_ndjson("{\"canonical\":\"a\"}\n"), ParseError);
    EXPECT_THROW(pool_from_ndjson(text + text), ParseError); // duplicates
}

TEST(Prompts, InitialKeywordTemplate)
{
    auto task = testutil::mc_task();
    task.keyword_example_compound = "asset_valuation";
    const auto p = prompts::initial_keywords(task, 50);
    EXPECT_NE(p.find("Task Context: You are an expert in finance."), std::string::npos);
    EXPECT_NE(p.find("Generate 50 core keywords"), std::string::npos);
    EXPECT_NE(p.find("Use underscores for multi-word concepts (e.g., asset_valuation)"), std::string::npos);
    EXPECT_EQ(p.substr(p.size() - 14), "Core Keywords:");
}

TEST(SeedKeywords, FiftyWellBehavedTerms)
{
    auto mock = std::make_shared<MockBackend>();
    mock->script("seed/0", {numbered_terms("term", 0, 50)});
    Gateway gw(mock, testutil::fast_options());
    const auto pool = seed_keywords(testutil::mc_task(), 50, gw);
    EXPECT_EQ(pool.size(), 50u);
    EXPECT_EQ(gw.call_count(), 1u);
    for (const auto& e : pool.entries()) {
        EXPECT_EQ(e.provenance, Provenance::Seed);
        EXPECT_EQ(e.iteration, 0u);
    }
}

TEST(SeedKeywords, ShortReplyTriggersReprompt)
{
    auto mock = std::make_shared<MockBackend>();
    mock->script("seed/0", {numbered_terms("term", 0, 30)});
    mock->script("seed/1", {numbered_terms("term", 25, 50)}); // 5 repeats, 20 new
    mock->script("seed/2", {numbered_terms("extra", 0, 10)});
    Gateway gw(mock, testutil::fast_options());
    const auto pool = seed_keywords(testutil::mc_task(), 50, gw);
    EXPECT_EQ(pool.size(), 50u);
    EXPECT_EQ(gw.call_count(), 2u);
    EXPECT_TRUE(pool.contains("term49"));
    EXPECT_FALSE(pool.contains("extra0"));
}

TEST(SeedKeywords, RepromptListsWhatIsAlreadyThere)
{
    std::vector<std::string> prompts_seen;
    auto mock = std::make_shared<MockBackend>();
    mock->set_responder([&](const GenerationRequest& r) {
        prompts_seen.push_back(r.prompt);
        return std::vector<std::string>{prompts_seen.size() == 1 ? "alpha, beta" : "gamma, delta"};
    });
    Gateway gw(mock, testutil::fast_options(1));
    const auto pool = seed_keywords(testutil::mc_task(), 4, gw);
    EXPECT_EQ(pool.size(), 4u);
    ASSERT_EQ(prompts_seen.size(), 2u);
    EXPECT_NE(prompts_seen[1].find("alpha"), std::string::npos);
    EXPECT_NE(prompts_seen[1].find('2'), std::string::npos);
}

TEST(SeedKeywords, EmptyRepliesRaiseShortfall)
{
    auto mock = std::make_shared<MockBackend>();
    mock->set_responder([](const GenerationRequest&) { return std::vector<std::string>{""}; });
    Gateway gw(mock, testutil::fast_options());
    EXPECT_THROW(seed_keywords(testutil::mc_task(), 50, gw), SeedShortfall);
    EXPECT_EQ(gw.call_count(), 4u);
}

TEST(ExpandStep, FivePerDirection)
{
    KeywordPool pool;
    pool.insert({"derivative", "derivative"}, Provenance::Seed, 0);
    auto mock = std::make_shared<MockBackend>();
    mock->script("expand/1", {"Prerequisite Concepts: limit, function, slope, continuity, tangent\n"
                              "Advanced Concepts: partial_derivative, gradient, jacobian, hessian, "
                              "directional_derivative"});
    Gateway gw(mock, testutil::fast_options());
    Rng rng(1);
    const auto step = expand_step(pool, testutil::mc_task(), small_config(), rng, gw, 1);
    EXPECT_EQ(step.sampled_examples.size(), 1u);
    EXPECT_EQ(step.prerequisite_new.size(), 5u);
    EXPECT_EQ(step.advanced_new.size(), 5u);
    EXPECT_EQ(merge_step(pool, step), 10u);
    EXPECT_EQ(pool.size(), 11u);
    EXPECT_EQ(pool.entries().back().provenance, Provenance::Advanced);
    EXPECT_EQ(pool.entries().back().iteration, 1u);
}

TEST(ExpandStep, KnownKeywordsAreNotNew)
{
    KeywordPool pool;
    pool.insert({"limit", "limit"}, Provenance::Seed, 0);
    pool.insert({"slope", "slope"}, Provenance::Seed, 0);
    auto mock = std::make_shared<MockBackend>();
    mock->script("expand/1", {"Prerequisite Concepts: limit, slope\nAdvanced Concepts: Limit"});
    Gateway gw(mock, testutil::fast_options());
    Rng rng(1);
    const auto step = expand_step(pool, testutil::mc_task(), small_config(), rng, gw, 1);
    EXPECT_TRUE(step.prerequisite_new.empty());
    EXPECT_TRUE(step.advanced_new.empty());
}

TEST(ExpandStep, SamplingIsSeededAndWithoutReplacement)
{
    KeywordPool pool;
    for (int i = 0; i < 30; ++i) pool.insert({"k" + std::to_string(i), "k"}, Provenance::Seed, 0);
    auto mock = std::make_shared<MockBackend>();
    mock->set_responder([](const GenerationRequest&) { return std::vector<std::string>{""}; });
    Gateway gw(mock, testutil::fast_options());
    Rng a(99), b(99);
    const auto s1 = expand_step(pool, testutil::mc_task(), small_config(), a, gw, 1);
    const auto s2 = expand_step(pool, testutil::mc_task(), small_config(), b, gw, 1);
    EXPECT_EQ(s1.sampled_examples, s2.sampled_examples);
    std::set<std::string> distinct;
    for (const auto& k : s1.sampled_examples) distinct.insert(k.canonical);
    EXPECT_EQ(distinct.size(), 5u);
}

TEST(RunExpansion, FailedIterationIsSkipped)
{
    KeywordPool pool;
    pool.insert({"seed", "seed"}, Provenance::Seed, 0);
    auto mock = std::make_shared<MockBackend>();
    mock->script("expand/1", {"Prerequisite: a\nAdvanced: b"});
    mock->script("expand/3", {"Prerequisite: c\nAdvanced: d"});
    Gateway gw(mock, testutil::fast_options());
    Rng rng(5);
    const auto r = run_expansion(pool, testutil::mc_task(), small_config(), gw, rng);
    EXPECT_EQ(r.failed_iterations, 1u);
    EXPECT_TRUE(r.steps[1].failed);
    EXPECT_EQ(r.pool.canonicals(), (std::vector<std::string>{"seed", "a", "b", "c", "d"}));
}

TEST(RunExpansion, FixpointAndEmptyPool)
{
    KeywordPool pool;
    pool.insert({"seed", "seed"}, Provenance::Seed, 0);
    auto mock = std::make_shared<MockBackend>();
    mock->set_responder([](const GenerationRequest&) { return std::vector<std::string>{"Prerequisite: seed"}; });
    Gateway gw(mock, testutil::fast_options());
    Rng rng(5);
    EXPECT_EQ(run_expansion(pool, testutil::mc_task(), small_config(), gw, rng).pool, pool);
    EXPECT_THROW(run_expansion(KeywordPool{}, testutil::mc_task(), small_config(), gw, rng), SeedShortfall);
}

// Randomized simulation of the pool laws: monotone growth, unique canonicals,
// and the n + 2 * d * iterations bound.
TEST(RunExpansion, PoolLawsUnderRandomReplies)
{
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        Rng sim(trial);
        PipelineConfig c;
        c.expansion_iterations = 1 + uniform_index(sim, 12);
        c.keywords_per_direction = 1 + uniform_index(sim, 6);
        c.expansion_sample_size = 1 + uniform_index(sim, 6);
        const auto vocab = 5 + uniform_index(sim, 200);

        auto mock = std::make_shared<MockBackend>();
        auto reply_rng = std::make_shared<Rng>(trial * 7 + 1);
        mock->set_responder([reply_rng, vocab](const GenerationRequest&) {
            std::string pre = "Prerequisite Concepts:", adv = "Advanced Concepts:";
            const auto n1 = uniform_index(*reply_rng, 12), n2 = uniform_index(*reply_rng, 12);
            for (std::uint64_t i = 0; i < n1; ++i) pre += " W" + std::to_string(uniform_index(*reply_rng, vocab)) + ",";
            for (std::uint64_t i = 0; i < n2; ++i) adv += " w" + std::to_string(uniform_index(*reply_rng, vocab)) + ",";
            return std::vector<std::string>{pre + "\n" + adv};
        });
        Gateway gw(mock, testutil::fast_options(1));

        KeywordPool pool;
        const auto n_seed = 1 + uniform_index(sim, 10);
        for (std::uint64_t i = 0; i < n_seed; ++i) pool.insert({"w" + std::to_string(i), "w"}, Provenance::Seed, 0);

        Rng rng(trial);
        auto before = pool;
        for (std::uint64_t it = 1; it <= c.expansion_iterations; ++it) {
            const auto step = expand_step(pool, testutil::mc_task(), c, rng, gw, it);
            ASSERT_LE(step.prerequisite_new.size(), c.keywords_per_direction);
            ASSERT_LE(step.advanced_new.size(), c.keywords_per_direction);
            merge_step(pool, step);
            ASSERT_GE(pool.size(), before.size());
            for (std::size_t i = 0; i < before.size(); ++i) ASSERT_EQ(pool[i], before[i]);
            before = pool;
        }
        std::set<std::string> uniq;
        for (const auto& e : pool.entries()) uniq.insert(e.keyword.canonical);
        EXPECT_EQ(uniq.size(), pool.size());
        EXPECT_LE(pool.size(), n_seed + 2 * c.keywords_per_direction * c.expansion_iterations);
    }
}
