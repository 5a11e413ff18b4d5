// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/keywords.hpp"

#include "instructgen/errors.hpp"
#include "instructgen/prompts.hpp"
#include "instructgen/text_util.hpp"

#include <json.hpp>

#include <unordered_set>

namespace instructgen {

std::string canonicalize(std::string_view surface)
{
    std::string out;
    out.reserve(surface.size());
    bool pending_sep = false;
    for (char ch : surface) {
        const auto c = static_cast<unsigned char>(ch);
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            if (pending_sep && !out.empty()) out += '_';
            pending_sep = false;
            out += static_cast<char>(c);
        } else if (c >= 'A' && c <= 'Z') {
            if (pending_sep && !out.empty()) out += '_';
            pending_sep = false;
            out += static_cast<char>(c - 'A' + 'a');
        } else if (c == ' ' || c == '-' || c == '_' || c == '\t' || c == '\n' || c == '\r') {
            pending_sep = true;
        }
        // anything else (punctuation, non-ASCII bytes) is dropped
    }
    return out;
}

std::string_view to_string(Provenance p)
{
    switch (p) {
    case Provenance::Seed: return "seed";
    case Provenance::Prerequisite: return "prerequisite";
    case Provenance::Advanced: return "advanced";
    case Provenance::Retrieved: return "retrieved";
    }
    return "seed";
}

Provenance parse_provenance(std::string_view s)
{
    if (s == "seed") return Provenance::Seed;
    if (s == "prerequisite") return Provenance::Prerequisite;
    if (s == "advanced") return Provenance::Advanced;
    if (s == "retrieved") return Provenance::Retrieved;
    throw ParseError("unknown provenance '" + std::string(s) + "'");
}

// ------------------------------------------------------------ KeywordPool

bool KeywordPool::insert(const Keyword& keyword, Provenance provenance, std::uint64_t iteration)
{
    if (keyword.canonical.empty() || canonicalize(keyword.canonical) != keyword.canonical) {
        throw ValidationError("not a canonical keyword: '" + keyword.canonical + "'");
    }
    if (index_.count(keyword.canonical)) return false;
    index_.emplace(keyword.canonical, entries_.size());
    entries_.push_back(PoolEntry{keyword, provenance, iteration});
    return true;
}

bool KeywordPool::contains(std::string_view canonical) const
{
    return index_.count(std::string(canonical)) > 0;
}

std::vector<std::string> KeywordPool::canonicals() const
{
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.keyword.canonical);
    return out;
}

std::string pool_to_ndjson(const KeywordPool& pool)
{
    std::string out;
    for (const auto& e : pool.entries()) {
        nlohmann::ordered_json j;
        j["canonical"] = e.keyword.canonical;
        j["display"] = e.keyword.display;
        j["provenance"] = to_string(e.provenance);
        j["iteration"] = e.iteration;
        out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

KeywordPool pool_from_ndjson(std::string_view text)
{
    KeywordPool pool;
    int lineno = 0;
    for (auto line : split_lines(text)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            Keyword k{j.at("canonical").get<std::string>(), j.at("display").get<std::string>()};
            if (!pool.insert(k, parse_provenance(j.at("provenance").get<std::string>()),
                             j.at("iteration").get<std::uint64_t>())) {
                throw ParseError("duplicate keyword '" + k.canonical + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("pool checkpoint line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return pool;
}

// ---------------------------------------------------------------- parsing

namespace {

/// Removes "1.", "2)", "-", "*", "•" style list markers and wrapping quotes.
std::string_view strip_list_marker(std::string_view item)
{
    item = trim(item);
    std::size_t i = 0;
    while (i < item.size() && item[i] >= '0' && item[i] <= '9') ++i;
    if (i > 0 && i < item.size() && (item[i] == '.' || item[i] == ')') &&
        (i + 1 == item.size() || item[i + 1] == ' ' || item[i + 1] == '\t')) {
        item = trim(item.substr(i + 1));
    }
    while (!item.empty() && (item.front() == '-' || item.front() == '*' || item.front() == '#')) {
        item = trim(item.substr(1));
    }
    if (item.substr(0, 3) == "\xE2\x80\xA2") item = trim(item.substr(3));
    return item;
}

std::size_t word_count_canonical(const std::string& canonical)
{
    if (canonical.empty()) return 0;
    std::size_t n = 1;
    for (char c : canonical) n += (c == '_');
    return n;
}

} // namespace

ParsedKeywords parse_keyword_list(std::string_view raw)
{
    ParsedKeywords out;
    std::unordered_set<std::string> seen;
    std::size_t start = 0;
    while (start <= raw.size()) {
        auto end = raw.find_first_of(",\n", start);
        if (end == std::string_view::npos) end = raw.size();
        auto item = strip_list_marker(raw.substr(start, end - start));
        start = end + 1;
        if (trim(item).empty()) continue;
        auto canonical = canonicalize(item);
        if (canonical.empty() || word_count_canonical(canonical) > kMaxKeywordWords) {
            ++out.dropped;
            continue;
        }
        if (!seen.insert(canonical).second) continue;
        out.keywords.push_back(Keyword{std::move(canonical), std::string(item)});
    }
    return out;
}

std::pair<ParsedKeywords, ParsedKeywords> parse_expansion_reply(std::string_view raw)
{
    enum Section { None, Pre, Adv };
    std::string pre, adv, unlabeled_first, unlabeled_rest;
    Section current = None;
    bool labeled = false;
    std::size_t unlabeled_lines = 0;

    for (auto line : split_lines(raw)) {
        auto t = trim(line);
        if (t.empty()) continue;
        // strip numbering / markdown around a possible label
        std::size_t i = 0;
        while (i < t.size() && (t[i] == '*' || t[i] == '#' || t[i] == '-' || t[i] == ' ' || t[i] == '.' ||
                                (t[i] >= '0' && t[i] <= '9'))) {
            ++i;
        }
        auto body = t.substr(i);
        Section label = None;
        if (starts_with_icase(body, "prerequisite")) label = Pre;
        else if (starts_with_icase(body, "advanced")) label = Adv;
        if (label != None) {
            auto colon = body.find(':');
            // a label has a colon after the label word, or is the whole line
            const bool header = colon != std::string_view::npos || body.find(',') == std::string_view::npos;
            if (header) {
                labeled = true;
                current = label;
                auto rest = colon == std::string_view::npos ? std::string_view{} : body.substr(colon + 1);
                while (!rest.empty() && rest.front() == '*') rest.remove_prefix(1);
                (label == Pre ? pre : adv) += std::string(rest) + "\n";
                continue;
            }
        }
        if (current == Pre) pre += std::string(t) + "\n";
        else if (current == Adv) adv += std::string(t) + "\n";
        else {
            (unlabeled_lines == 0 ? unlabeled_first : unlabeled_rest) += std::string(t) + "\n";
            ++unlabeled_lines;
        }
    }
    if (!labeled) {
        pre = unlabeled_first;
        adv = unlabeled_rest;
    }
    return {parse_keyword_list(pre), parse_keyword_list(adv)};
}

// ---------------------------------------------------------------- seeding

KeywordPool seed_keywords(const TaskDefinition& task, std::uint64_t n, Gateway& gateway, const SeedOptions& options)
{
    if (n < 1) throw ValidationError("seed count must be >= 1");
    const auto base_prompt = prompts::initial_keywords(task, n);
    KeywordPool pool;
    for (std::uint64_t attempt = 0; attempt <= options.reprompts && pool.size() < n; ++attempt) {
        GenerationRequest req;
        req.prompt = base_prompt;
        if (attempt > 0) req.prompt += prompts::seed_shortfall(pool.canonicals(), n - pool.size());
        req.temperature = options.temperature;
        req.max_tokens = options.max_tokens;
        req.n_samples = 1;
        req.request_tag = "seed/" + std::to_string(attempt);
        auto result = gateway.request(req);
        for (const auto& k : parse_keyword_list(result.samples.front()).keywords) {
            if (pool.size() >= n) break;
            pool.insert(k, Provenance::Seed, 0);
        }
    }
    const auto minimum = (n + 1) / 2;
    if (pool.size() < minimum) {
        throw SeedShortfall("only " + std::to_string(pool.size()) + " seed keywords parsed, need at least " +
                            std::to_string(minimum));
    }
    return pool;
}

// -------------------------------------------------------------- expansion

ExpansionStep expand_step(const KeywordPool& pool, const TaskDefinition& task, const PipelineConfig& config,
                          Rng& rng, Gateway& gateway, std::uint64_t iteration)
{
    if (pool.empty()) throw ValidationError("cannot expand an empty keyword pool");
    ExpansionStep step;
    step.iteration = iteration;
    const auto picks = sample_indices(rng, pool.size(), static_cast<std::size_t>(config.expansion_sample_size));
    std::vector<std::string> names;
    for (auto i : picks) {
        step.sampled_examples.push_back(pool[i].keyword);
        names.push_back(pool[i].keyword.canonical);
    }

    GenerationRequest req;
    req.prompt = prompts::bidirectional_expansion(task, names, config.keywords_per_direction);
    req.temperature = config.generation_temperature;
    req.max_tokens = config.max_generation_tokens;
    req.request_tag = "expand/" + std::to_string(iteration);
    auto result = gateway.request(req);

    auto [pre, adv] = parse_expansion_reply(result.samples.front());
    std::unordered_set<std::string> taken;
    auto pick_new = [&](const ParsedKeywords& parsed, std::vector<Keyword>& dest) {
        for (const auto& k : parsed.keywords) {
            if (dest.size() >= config.keywords_per_direction) break;
            if (pool.contains(k.canonical) || taken.count(k.canonical)) continue;
            taken.insert(k.canonical);
            dest.push_back(k);
        }
    };
    pick_new(pre, step.prerequisite_new);
    pick_new(adv, step.advanced_new);
    return step;
}

std::size_t merge_step(KeywordPool& pool, const ExpansionStep& step)
{
    std::size_t added = 0;
    for (const auto& k : step.prerequisite_new) added += pool.insert(k, Provenance::Prerequisite, step.iteration);
    for (const auto& k : step.advanced_new) added += pool.insert(k, Provenance::Advanced, step.iteration);
    return added;
}

ExpansionResult run_expansion(KeywordPool pool, const TaskDefinition& task, const PipelineConfig& config,
                              Gateway& gateway, Rng& rng)
{
    if (pool.empty()) throw SeedShortfall("keyword pool is empty; nothing to expand");
    ExpansionResult out;
    for (std::uint64_t it = 1; it <= config.expansion_iterations; ++it) {
        ExpansionStep step;
        try {
            step = expand_step(pool, task, config, rng, gateway, it);
        } catch (const Error& e) {
            step = ExpansionStep{};
            step.iteration = it;
            step.failed = true;
            step.error = e.what();
            ++out.failed_iterations;
        }
        merge_step(pool, step);
        out.steps.push_back(std::move(step));
    }
    out.pool = std::move(pool);
    return out;
}

} // namespace instructgen
