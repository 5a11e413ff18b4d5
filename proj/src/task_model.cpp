// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/task_model.hpp"

#include "instructgen/errors.hpp"
#include "instructgen/kv_format.hpp"
#include "instructgen/text_util.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

namespace instructgen {

// ---------------------------------------------------------------- Fraction

Fraction Fraction::parse(std::string_view text)
{
    auto t = trim(text);
    auto bad = [&] { return ValidationError("not a fraction: '" + std::string(text) + "'"); };
    auto parse_uint = [&](std::string_view s) {
        std::uint64_t v = 0;
        if (s.empty() || s.size() > 18) throw bad();
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) throw bad();
        return v;
    };
    Fraction f;
    if (auto slash = t.find('/'); slash != std::string_view::npos) {
        f.num = parse_uint(trim(t.substr(0, slash)));
        f.den = parse_uint(trim(t.substr(slash + 1)));
    } else if (auto dot = t.find('.'); dot != std::string_view::npos) {
        auto whole = t.substr(0, dot);
        auto frac = t.substr(dot + 1);
        if (frac.empty() || whole.size() + frac.size() > 18) throw bad();
        std::uint64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        f.num = (whole.empty() ? 0 : parse_uint(whole)) * den + parse_uint(frac);
        f.den = den;
    } else {
        f.num = parse_uint(t);
        f.den = 1;
    }
    if (f.den == 0) throw bad();
    const auto g = std::gcd(f.num, f.den);
    if (g > 1) {
        f.num /= g;
        f.den /= g;
    }
    if (f.num == 0) f.den = 1;
    return f;
}

std::string Fraction::to_string() const
{
    return std::to_string(num) + "/" + std::to_string(den);
}

bool Fraction::admits(std::uint64_t count, std::uint64_t total) const
{
    // count/total >= num/den  <=>  count*den >= num*total
    __extension__ using wide = unsigned __int128;
    return static_cast<wide>(count) * den >= static_cast<wide>(num) * total;
}

// ----------------------------------------------------------- AnswerFormat

std::string_view to_string(AnswerKind kind)
{
    switch (kind) {
    case AnswerKind::MultipleChoice: return "multiple_choice";
    case AnswerKind::YesNoMaybe: return "yes_no_maybe";
    case AnswerKind::FinalAnswerLine: return "final_answer_line";
    case AnswerKind::BoxedLatex: return "boxed_latex";
    }
    return "final_answer_line";
}

AnswerKind parse_answer_kind(std::string_view text)
{
    std::string key;
    for (char c : to_lower_ascii(trim(text))) {
        if (c != '_' && c != '-' && c != ' ') key += c;
    }
    if (key == "multiplechoice") return AnswerKind::MultipleChoice;
    if (key == "yesnomaybe") return AnswerKind::YesNoMaybe;
    if (key == "finalanswerline") return AnswerKind::FinalAnswerLine;
    if (key == "boxedlatex") return AnswerKind::BoxedLatex;
    throw ValidationError("unknown answer_format '" + std::string(text) + "'");
}

std::string default_suffix(AnswerKind kind, const std::vector<std::string>& options)
{
    switch (kind) {
    case AnswerKind::MultipleChoice:
        return "Return exactly two lines and nothing else:\n"
               "Reason: <1\xE2\x80\x93" "3 sentence explanation>\n"
               "Answer: <" + join(options, "|") + ">";
    case AnswerKind::YesNoMaybe:
        return "Return exactly two lines and nothing else:\n"
               "Reason: <1\xE2\x80\x93" "3 sentence explanation>\n"
               "Answer: <yes|no|maybe>";
    case AnswerKind::FinalAnswerLine:
        return "Provide a step-by-step reasoning process and then write the final numerical answer "
               "on a new line in the format: final answer: <answer>";
    case AnswerKind::BoxedLatex:
        return "Provide a step-by-step reasoning process and then write the final answer in the "
               "LaTeX boxed tag: $\\boxed{<answer>}$";
    }
    return {};
}

AnswerFormat make_answer_format(AnswerKind kind, std::vector<std::string> options)
{
    AnswerFormat f;
    f.kind = kind;
    if (kind == AnswerKind::MultipleChoice) {
        f.options = options.empty() ? std::vector<std::string>{"A", "B", "C", "D"} : std::move(options);
    }
    f.suffix_text = default_suffix(kind, f.options);
    return f;
}

// --------------------------------------------------------- TaskDefinition

namespace {

std::vector<std::string> parse_options(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        out.emplace_back(trim(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

} // namespace

void validate(const TaskDefinition& task)
{
    if (trim(task.description).empty()) throw ValidationError("task description is empty");
    if (trim(task.name).empty()) throw ValidationError("task name is empty");
    const auto& fmt = task.answer_format;
    if (fmt.kind == AnswerKind::MultipleChoice) {
        if (fmt.options.size() < 2) throw ValidationError("multiple_choice needs at least two options");
        std::set<std::string> seen;
        for (const auto& o : fmt.options) {
            bool ok = !o.empty() && o.front() >= 'A' && o.front() <= 'Z';
            for (char c : o) ok = ok && ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'));
            if (!ok) throw ValidationError("option label '" + o + "' must be a single uppercase token");
            if (!seen.insert(o).second) throw ValidationError("duplicate option label '" + o + "'");
        }
    } else if (!fmt.options.empty()) {
        throw ValidationError("options are only valid for multiple_choice");
    }
    if (trim(fmt.suffix_text).empty()) throw ValidationError("response suffix is empty");
}

TaskDefinition parse_task(std::string_view text)
{
    TaskDefinition task;
    task.name = "task";
    bool have_format = false;
    bool have_domain = false;
    std::vector<std::string> options;
    std::string suffix;
    for (const auto& e : parse_kv(text)) {
        if (e.key == "name") {
            task.name = e.value;
        } else if (e.key == "description") {
            task.description = e.value;
        } else if (e.key == "domain_label") {
            task.domain_label = e.value;
            have_domain = true;
        } else if (e.key == "answer_format") {
            task.answer_format.kind = parse_answer_kind(e.value);
            have_format = true;
        } else if (e.key == "options") {
            options = parse_options(e.value);
        } else if (e.key == "response_suffix") {
            suffix = e.value;
        } else if (e.key == "keyword_example_compound") {
            task.keyword_example_compound = e.value;
        } else if (e.key == "keyword_example_single") {
            task.keyword_example_single = e.value;
        } else {
            throw ValidationError("line " + std::to_string(e.line) + ": unknown task field '" + e.key + "'");
        }
    }
    if (!have_format) throw ValidationError("task is missing answer_format");
    if (!options.empty() && task.answer_format.kind != AnswerKind::MultipleChoice) {
        throw ValidationError("options are only valid for multiple_choice");
    }
    task.answer_format = make_answer_format(task.answer_format.kind, options);
    if (!suffix.empty()) task.answer_format.suffix_text = suffix;
    if (!have_domain) task.domain_label = task.name;
    validate(task);
    return task;
}

TaskDefinition load_task(const std::filesystem::path& path)
{
    return parse_task(read_file(path));
}

std::string serialize_task(const TaskDefinition& task)
{
    std::string out;
    out += format_kv("name", task.name);
    out += format_kv("domain_label", task.domain_label);
    out += format_kv("description", task.description);
    out += format_kv("answer_format", to_string(task.answer_format.kind));
    if (task.answer_format.kind == AnswerKind::MultipleChoice) {
        out += format_kv("options", join(task.answer_format.options, ","));
    }
    if (task.answer_format.suffix_text != default_suffix(task.answer_format.kind, task.answer_format.options)) {
        out += format_kv("response_suffix", task.answer_format.suffix_text);
    }
    if (!task.keyword_example_compound.empty()) {
        out += format_kv("keyword_example_compound", task.keyword_example_compound);
    }
    if (!task.keyword_example_single.empty()) {
        out += format_kv("keyword_example_single", task.keyword_example_single);
    }
    return out;
}

// --------------------------------------------------------- PipelineConfig

namespace {

std::uint64_t parse_count(std::string_view key, std::string_view v)
{
    v = trim(v);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ValidationError(std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

double parse_real(std::string_view key, std::string_view v)
{
    v = trim(v);
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ValidationError(std::string(key) + ": expected a real number, got '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v)
{
    auto s = to_lower_ascii(trim(v));
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ValidationError(std::string(key) + ": expected true/false, got '" + std::string(v) + "'");
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "n_seed_keywords", "expansion_iterations", "keywords_per_direction", "expansion_sample_size",
        "retrieval_rounds", "retrieval_query_keywords", "retrieval_top_k", "bm25_k1", "bm25_b",
        "consistency_samples", "consistency_threshold", "generation_temperature", "max_generation_tokens",
        "target_dataset_size", "rng_seed", "oversample_factor", "chunk_tokens", "keyword_digest_size",
        "parallelism", "retry_attempts", "retry_backoff_ms", "corpus_dir", "skip_expansion",
        "skip_retrieval", "cognitive_levels", "filter_enabled",
    };
    return keys;
}

void apply_setting(PipelineConfig& c, std::string_view key, std::string_view value)
{
    if (key == "n_seed_keywords") c.n_seed_keywords = parse_count(key, value);
    else if (key == "expansion_iterations") c.expansion_iterations = parse_count(key, value);
    else if (key == "keywords_per_direction") c.keywords_per_direction = parse_count(key, value);
    else if (key == "expansion_sample_size") c.expansion_sample_size = parse_count(key, value);
    else if (key == "retrieval_rounds") c.retrieval_rounds = parse_count(key, value);
    else if (key == "retrieval_query_keywords") c.retrieval_query_keywords = parse_count(key, value);
    else if (key == "retrieval_top_k") c.retrieval_top_k = parse_count(key, value);
    else if (key == "bm25_k1") c.bm25_k1 = parse_real(key, value);
    else if (key == "bm25_b") c.bm25_b = parse_real(key, value);
    else if (key == "consistency_samples") c.consistency_samples = parse_count(key, value);
    else if (key == "consistency_threshold") c.consistency_threshold = Fraction::parse(value);
    else if (key == "generation_temperature") c.generation_temperature = parse_real(key, value);
    else if (key == "max_generation_tokens") c.max_generation_tokens = parse_count(key, value);
    else if (key == "target_dataset_size") c.target_dataset_size = parse_count(key, value);
    else if (key == "rng_seed") c.rng_seed = parse_count(key, value);
    else if (key == "oversample_factor") c.oversample_factor = parse_real(key, value);
    else if (key == "chunk_tokens") c.chunk_tokens = parse_count(key, value);
    else if (key == "keyword_digest_size") c.keyword_digest_size = parse_count(key, value);
    else if (key == "parallelism") c.parallelism = parse_count(key, value);
    else if (key == "retry_attempts") c.retry_attempts = parse_count(key, value);
    else if (key == "retry_backoff_ms") c.retry_backoff_ms = parse_count(key, value);
    else if (key == "corpus_dir") c.corpus_dir = std::string(value);
    else if (key == "skip_expansion") c.skip_expansion = parse_bool(key, value);
    else if (key == "skip_retrieval") c.skip_retrieval = parse_bool(key, value);
    else if (key == "cognitive_levels") c.cognitive_levels = parse_bool(key, value);
    else if (key == "filter_enabled") c.filter_enabled = parse_bool(key, value);
    else throw ValidationError("unknown config key '" + std::string(key) + "'");
}

void validate(const PipelineConfig& c)
{
    auto positive = [](const char* name, std::uint64_t v) {
        if (v < 1) throw ValidationError(std::string(name) + " must be >= 1");
    };
    positive("n_seed_keywords", c.n_seed_keywords);
    positive("expansion_iterations", c.expansion_iterations);
    positive("keywords_per_direction", c.keywords_per_direction);
    positive("expansion_sample_size", c.expansion_sample_size);
    positive("retrieval_rounds", c.retrieval_rounds);
    positive("retrieval_query_keywords", c.retrieval_query_keywords);
    positive("retrieval_top_k", c.retrieval_top_k);
    positive("consistency_samples", c.consistency_samples);
    positive("max_generation_tokens", c.max_generation_tokens);
    positive("target_dataset_size", c.target_dataset_size);
    positive("chunk_tokens", c.chunk_tokens);
    positive("keyword_digest_size", c.keyword_digest_size);
    positive("parallelism", c.parallelism);
    positive("retry_attempts", c.retry_attempts);
    if (!(c.bm25_k1 >= 0)) throw ValidationError("bm25_k1 must be >= 0");
    if (!(c.bm25_b >= 0 && c.bm25_b <= 1)) throw ValidationError("bm25_b must lie in [0, 1]");
    const auto& tau = c.consistency_threshold;
    if (tau.num == 0 || tau.num > tau.den) throw ValidationError("consistency_threshold must lie in (0, 1]");
    if (!(c.generation_temperature >= 0)) throw ValidationError("generation_temperature must be >= 0");
    if (!(c.oversample_factor >= 1.0)) throw ValidationError("oversample_factor must be >= 1");
}

PipelineConfig parse_config(std::string_view text, const ConfigOverrides& overrides)
{
    PipelineConfig c;
    for (const auto& e : parse_kv(text)) {
        apply_setting(c, e.key, e.value);
    }
    for (const auto& [k, v] : overrides) {
        apply_setting(c, k, v);
    }
    validate(c);
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides)
{
    std::string text;
    if (!path.empty() && std::filesystem::exists(path)) text = read_file(path);
    return parse_config(text, overrides);
}

std::string serialize_config(const PipelineConfig& c)
{
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    auto n = [](std::uint64_t v) { return std::to_string(v); };
    std::string out;
    out += format_kv("n_seed_keywords", n(c.n_seed_keywords));
    out += format_kv("expansion_iterations", n(c.expansion_iterations));
    out += format_kv("keywords_per_direction", n(c.keywords_per_direction));
    out += format_kv("expansion_sample_size", n(c.expansion_sample_size));
    out += format_kv("retrieval_rounds", n(c.retrieval_rounds));
    out += format_kv("retrieval_query_keywords", n(c.retrieval_query_keywords));
    out += format_kv("retrieval_top_k", n(c.retrieval_top_k));
    out += format_kv("bm25_k1", format_double(c.bm25_k1));
    out += format_kv("bm25_b", format_double(c.bm25_b));
    out += format_kv("consistency_samples", n(c.consistency_samples));
    out += format_kv("consistency_threshold", c.consistency_threshold.to_string());
    out += format_kv("generation_temperature", format_double(c.generation_temperature));
    out += format_kv("max_generation_tokens", n(c.max_generation_tokens));
    out += format_kv("target_dataset_size", n(c.target_dataset_size));
    out += format_kv("rng_seed", n(c.rng_seed));
    out += format_kv("oversample_factor", format_double(c.oversample_factor));
    out += format_kv("chunk_tokens", n(c.chunk_tokens));
    out += format_kv("keyword_digest_size", n(c.keyword_digest_size));
    out += format_kv("parallelism", n(c.parallelism));
    out += format_kv("retry_attempts", n(c.retry_attempts));
    out += format_kv("retry_backoff_ms", n(c.retry_backoff_ms));
    out += format_kv("corpus_dir", c.corpus_dir);
    out += format_kv("skip_expansion", b(c.skip_expansion));
    out += format_kv("skip_retrieval", b(c.skip_retrieval));
    out += format_kv("cognitive_levels", b(c.cognitive_levels));
    out += format_kv("filter_enabled", b(c.filter_enabled));
    return out;
}

} // namespace instructgen
