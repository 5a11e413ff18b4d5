// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/instructions.hpp"

#include "instructgen/errors.hpp"
#include "instructgen/prompts.hpp"
#include "instructgen/text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace instructgen {

// ------------------------------------------------------------------ levels

bool is_relational(CognitiveLevel level)
{
    return level != CognitiveLevel::Remember && level != CognitiveLevel::Create;
}

std::string_view to_string(CognitiveLevel level)
{
    switch (level) {
    case CognitiveLevel::Remember: return "Remember";
    case CognitiveLevel::Understand: return "Understand";
    case CognitiveLevel::Apply: return "Apply";
    case CognitiveLevel::Analyze: return "Analyze";
    case CognitiveLevel::Evaluate: return "Evaluate";
    case CognitiveLevel::Create: return "Create";
    }
    return "Remember";
}

std::string_view gerund(CognitiveLevel level)
{
    switch (level) {
    case CognitiveLevel::Remember: return "Remembering";
    case CognitiveLevel::Understand: return "Understanding";
    case CognitiveLevel::Apply: return "Applying";
    case CognitiveLevel::Analyze: return "Analyzing";
    case CognitiveLevel::Evaluate: return "Evaluating";
    case CognitiveLevel::Create: return "Creating";
    }
    return "Remembering";
}

std::string_view description(CognitiveLevel level)
{
    switch (level) {
    case CognitiveLevel::Remember:
        return "Create instructions that emphasize recall of factual knowledge, definitions, basic concepts, "
               "recognition tasks, and core terminology related to the keyword.";
    case CognitiveLevel::Understand:
        return "Design instructions that require conceptual understanding, explanation of relationships, "
               "interpretation, illustrative examples, and meaningful comparisons involving the keyword.";
    case CognitiveLevel::Apply:
        return "Formulate instructions that demand practical use of methods, implementation of procedures, "
               "execution of calculations, and real-world application of the keyword.";
    case CognitiveLevel::Analyze:
        return "Develop instructions that involve breaking down complex ideas, identifying patterns, examining "
               "relationships, and conducting comparative or structural analysis of the keyword.";
    case CognitiveLevel::Evaluate:
        return "Construct instructions that involve critical judgment, validation of techniques, assessment of "
               "alternatives, justification of decisions, and critique of methods related to the keyword.";
    case CognitiveLevel::Create:
        return "Design instructions that foster original thinking, synthesis of ideas, problem innovation, "
               "creative design, and novel applications of the keyword.";
    }
    return {};
}

CognitiveLevel parse_level(std::string_view name)
{
    for (auto l : kAllLevels) {
        if (iequals_ascii(name, to_string(l)) || iequals_ascii(name, gerund(l))) return l;
    }
    throw ParseError("unknown cognitive level '" + std::string(name) + "'");
}

std::string_view to_string(Strategy s)
{
    return s == Strategy::Single ? "single" : "pair";
}

Strategy parse_strategy(std::string_view s)
{
    if (s == "single") return Strategy::Single;
    if (s == "pair") return Strategy::Pair;
    throw ParseError("unknown strategy '" + std::string(s) + "'");
}

// -------------------------------------------------------------------- jobs

std::string GenerationJob::key() const
{
    std::string k(to_string(strategy));
    for (const auto& kw : keywords) k += "/" + kw;
    k += "/";
    k += level ? to_string(*level) : std::string_view("none");
    return k;
}

GenerationJob make_single_job(std::string keyword, std::optional<CognitiveLevel> level)
{
    GenerationJob job;
    job.strategy = Strategy::Single;
    job.keywords = {std::move(keyword)};
    job.level = level;
    job.job_id = hex64(fnv1a64(job.key()));
    return job;
}

GenerationJob make_pair_job(std::string a, std::string b, std::optional<CognitiveLevel> level)
{
    if (a == b) throw ValidationError("pair job needs two distinct keywords");
    if (level && !is_relational(*level)) {
        throw ValidationError("pair jobs only take relational levels, not " + std::string(to_string(*level)));
    }
    if (b < a) std::swap(a, b);
    GenerationJob job;
    job.strategy = Strategy::Pair;
    job.keywords = {std::move(a), std::move(b)};
    job.level = level;
    job.job_id = hex64(fnv1a64(job.key()));
    return job;
}

std::uint64_t job_budget(const PipelineConfig& config)
{
    return static_cast<std::uint64_t>(
        std::ceil(static_cast<double>(config.target_dataset_size) * config.oversample_factor));
}

namespace {

/// Lexicographic unranking of m into (i, j), 0 <= i < j < k.
std::pair<std::size_t, std::size_t> unrank_pair(std::uint64_t m, std::size_t k)
{
    std::size_t i = 0;
    for (;;) {
        const std::uint64_t row = k - 1 - i;
        if (m < row) return {i, i + 1 + static_cast<std::size_t>(m)};
        m -= row;
        ++i;
    }
}

} // namespace

std::vector<GenerationJob> enumerate_jobs(const KeywordPool& pool, const EnumerationOptions& options, Rng& rng)
{
    if (pool.empty()) throw ValidationError("cannot enumerate jobs over an empty pool");
    auto keywords = pool.canonicals();
    std::sort(keywords.begin(), keywords.end());
    const std::size_t k = keywords.size();

    std::vector<std::optional<CognitiveLevel>> single_levels;
    std::vector<std::optional<CognitiveLevel>> pair_levels;
    if (options.cognitive_levels) {
        single_levels.assign(kAllLevels.begin(), kAllLevels.end());
        pair_levels.assign(kRelationalLevels.begin(), kRelationalLevels.end());
    } else {
        single_levels = {std::nullopt};
        pair_levels = {std::nullopt};
    }

    const std::uint64_t single_space = static_cast<std::uint64_t>(k) * single_levels.size();
    const std::uint64_t pair_space = static_cast<std::uint64_t>(k) * (k - 1) / 2 * pair_levels.size();
    const std::uint64_t budget = options.budget.value_or(single_space + pair_space);

    std::uint64_t n_single = single_space;
    std::uint64_t n_pair = 0;
    if (single_space <= budget) {
        n_pair = std::min(budget - single_space, pair_space);
    } else {
        const std::uint64_t single_share = budget * 3 / 5;
        n_pair = std::min(budget - single_share, pair_space);
        n_single = budget - n_pair; // unused pair share goes back to singles
    }

    std::vector<GenerationJob> jobs;
    jobs.reserve(static_cast<std::size_t>(n_single + n_pair));
    auto single_at = [&](std::uint64_t m) {
        return make_single_job(keywords[static_cast<std::size_t>(m / single_levels.size())],
                               single_levels[static_cast<std::size_t>(m % single_levels.size())]);
    };
    if (n_single == single_space) {
        for (std::uint64_t m = 0; m < single_space; ++m) jobs.push_back(single_at(m));
    } else {
        for (auto m : sample_sparse(rng, single_space, n_single)) jobs.push_back(single_at(m));
    }
    auto pair_at = [&](std::uint64_t m) {
        auto [i, j] = unrank_pair(m / pair_levels.size(), k);
        return make_pair_job(keywords[i], keywords[j], pair_levels[static_cast<std::size_t>(m % pair_levels.size())]);
    };
    if (n_pair == pair_space) {
        for (std::uint64_t m = 0; m < pair_space; ++m) jobs.push_back(pair_at(m));
    } else if (n_pair > 0) {
        for (auto m : sample_sparse(rng, pair_space, n_pair)) jobs.push_back(pair_at(m));
    }
    shuffle_in_place(jobs, rng);
    return jobs;
}

std::vector<GenerationJob> enumerate_jobs(const KeywordPool& pool, const PipelineConfig& config, Rng& rng)
{
    EnumerationOptions opts;
    opts.budget = job_budget(config);
    opts.cognitive_levels = config.cognitive_levels;
    return enumerate_jobs(pool, opts, rng);
}

std::string render_instruction_prompt(const GenerationJob& job, const TaskDefinition& task)
{
    if (job.strategy == Strategy::Single) {
        if (!job.level) return prompts::generic_single_instruction(task, job.keywords.at(0));
        return prompts::single_instruction(task, job.keywords.at(0), std::string(gerund(*job.level)),
                                           std::string(description(*job.level)));
    }
    if (!job.level) return prompts::generic_paired_instruction(task, job.keywords.at(0), job.keywords.at(1));
    return prompts::paired_instruction(task, job.keywords.at(0), job.keywords.at(1), std::string(gerund(*job.level)),
                                       std::string(description(*job.level)));
}

// ----------------------------------------------------------------- cleanup

namespace {

bool strip_label(std::string_view& s)
{
    static const std::array<std::string_view, 4> labels = {"generated question", "question", "generated instruction",
                                                           "instruction"};
    for (auto label : labels) {
        if (!starts_with_icase(s, label)) continue;
        auto rest = s.substr(label.size());
        while (!rest.empty() && (rest.front() == '*' || rest.front() == ' ')) rest.remove_prefix(1);
        if (rest.empty() || rest.front() != ':') continue;
        rest.remove_prefix(1);
        while (!rest.empty() && rest.front() == '*') rest.remove_prefix(1);
        s = trim(rest);
        return true;
    }
    return false;
}

bool strip_wrapping(std::string_view& s)
{
    static const std::array<std::pair<std::string_view, std::string_view>, 5> pairs = {{
        {"\"", "\""},
        {"'", "'"},
        {"\xE2\x80\x9C", "\xE2\x80\x9D"},
        {"**", "**"},
        {"`", "`"},
    }};
    for (auto [open, close] : pairs) {
        if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
            s.substr(s.size() - close.size()) == close) {
            s = trim(s.substr(open.size(), s.size() - open.size() - close.size()));
            return true;
        }
    }
    return false;
}

} // namespace

std::string clean_completion(std::string_view raw)
{
    auto s = trim(raw);
    for (int guard = 0; guard < 16; ++guard) {
        bool changed = false;
        if (s.substr(0, 2) == "**") {
            auto probe = trim(s.substr(2));
            if (strip_label(probe)) {
                s = probe;
                changed = true;
            }
        }
        changed = strip_label(s) || changed;
        changed = strip_wrapping(s) || changed;
        if (!changed) break;
    }
    return std::string(s);
}

CandidateBatch generate_candidates(const std::vector<GenerationJob>& jobs, const TaskDefinition& task,
                                   const PipelineConfig& config, Gateway& gateway)
{
    std::vector<GenerationRequest> requests;
    requests.reserve(jobs.size());
    for (const auto& job : jobs) {
        GenerationRequest r;
        r.prompt = render_instruction_prompt(job, task);
        r.temperature = config.generation_temperature;
        r.max_tokens = config.max_generation_tokens;
        r.n_samples = 1;
        r.request_tag = "gen/" + job.key();
        requests.push_back(std::move(r));
    }
    auto outcomes = gateway.run_batch(requests);

    CandidateBatch batch;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& o = outcomes[i];
        if (!o.ok()) {
            batch.drops.push_back({jobs[i].job_id, o.error_kind, o.error_message});
            continue;
        }
        auto raw = o.result->samples.front();
        auto text = clean_completion(raw);
        if (text.empty()) {
            batch.drops.push_back({jobs[i].job_id, "empty", ""});
            continue;
        }
        batch.candidates.push_back({std::move(text), jobs[i], std::move(raw)});
    }
    return batch;
}

// --------------------------------------------------------------- checkpoint

namespace {

nlohmann::ordered_json job_json(const GenerationJob& job)
{
    nlohmann::ordered_json j;
    j["job_id"] = job.job_id;
    j["strategy"] = to_string(job.strategy);
    j["keywords"] = job.keywords;
    if (job.level) j["level"] = to_string(*job.level);
    else j["level"] = nullptr;
    return j;
}

GenerationJob job_from_json(const nlohmann::json& j)
{
    const auto strategy = parse_strategy(j.at("strategy").get<std::string>());
    const auto keywords = j.at("keywords").get<std::vector<std::string>>();
    std::optional<CognitiveLevel> level;
    if (!j.at("level").is_null()) level = parse_level(j.at("level").get<std::string>());
    GenerationJob job;
    if (strategy == Strategy::Single) {
        if (keywords.size() != 1) throw ParseError("single job needs one keyword");
        job = make_single_job(keywords[0], level);
    } else {
        if (keywords.size() != 2) throw ParseError("pair job needs two keywords");
        job = make_pair_job(keywords[0], keywords[1], level);
    }
    if (j.contains("job_id") && j.at("job_id").get<std::string>() != job.job_id) {
        throw ParseError("job_id does not match job contents");
    }
    return job;
}

} // namespace

std::string jobs_to_ndjson(const std::vector<GenerationJob>& jobs)
{
    std::string out;
    for (const auto& job : jobs) out += job_json(job).dump() + "\n";
    return out;
}

std::string candidates_to_ndjson(const std::vector<InstructionCandidate>& candidates)
{
    std::string out;
    for (const auto& c : candidates) {
        auto j = job_json(c.job);
        j["instruction"] = c.text;
        out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::vector<InstructionCandidate> candidates_from_ndjson(std::string_view text)
{
    std::vector<InstructionCandidate> out;
    int lineno = 0;
    for (auto line : split_lines(text)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            InstructionCandidate c;
            c.job = job_from_json(j);
            c.text = j.at("instruction").get<std::string>();
            c.raw_completion = c.text;
            out.push_back(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("candidate checkpoint line " + std::to_string(lineno) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ParseError("candidate checkpoint line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace instructgen
