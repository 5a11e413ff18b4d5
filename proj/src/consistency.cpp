// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/consistency.hpp"

#include "instructgen/errors.hpp"
#include "instructgen/prompts.hpp"
#include "instructgen/text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>

namespace instructgen {

std::string ExtractedAnswer::canonical() const
{
    switch (variant) {
    case AnswerVariant::Option: return "option:" + value;
    case AnswerVariant::Decision: return "decision:" + value;
    case AnswerVariant::Numeric: return "numeric:" + value;
    case AnswerVariant::Expression: return "expression:" + value;
    case AnswerVariant::Unparseable: return "unparseable";
    }
    return "unparseable";
}

// ----------------------------------------------------------- extraction

namespace {

bool is_alnum(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_ws(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string collapse_whitespace(std::string_view s)
{
    std::string out;
    bool pending = false;
    for (char c : trim(s)) {
        if (is_ws(c)) {
            pending = true;
            continue;
        }
        if (pending && !out.empty()) out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

/// Parses the label after an "answer" keyword found at `pos` in `line`.
/// Shape: answer \s* : \s* [*<([]* LABEL [*>)\]]* then end-of-line, a
/// punctuation mark, or anything after an explicit closer.
std::optional<std::string> label_after(std::string_view line, std::size_t pos)
{
    std::size_t i = pos + 6; // "answer"
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '*')) ++i;
    if (i >= line.size() || line[i] != ':') return std::nullopt;
    ++i;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '*')) ++i;
    while (i < line.size() && (line[i] == '<' || line[i] == '(' || line[i] == '[')) ++i;
    const auto start = i;
    while (i < line.size() && is_alnum(line[i])) ++i;
    if (i == start) return std::nullopt;
    std::string label(line.substr(start, i - start));
    while (i < line.size() && line[i] == '*') ++i;
    bool closed = false;
    while (i < line.size() && (line[i] == '>' || line[i] == ')' || line[i] == ']')) {
        ++i;
        closed = true;
    }
    auto rest = trim(line.substr(i));
    if (rest.empty() || closed) return label;
    static constexpr std::string_view ok_follow = ".,:;-";
    if (ok_follow.find(rest.front()) != std::string_view::npos) return label;
    if (rest.substr(0, 3) == "\xE2\x80\x93" || rest.substr(0, 3) == "\xE2\x80\x94") return label;
    return std::nullopt;
}

/// Last "Answer: X" on the last line where X satisfies `accept`.
template <typename Accept>
std::optional<std::string> last_answer_label(std::string_view raw, Accept accept)
{
    auto lines = split_lines(raw);
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        const auto line = *it;
        const auto lower = to_lower_ascii(line);
        std::optional<std::string> found;
        for (std::size_t pos = lower.find("answer"); pos != std::string::npos; pos = lower.find("answer", pos + 1)) {
            if (pos > 0 && is_alnum(lower[pos - 1])) continue;
            if (auto label = label_after(line, pos); label && accept(*label)) found = label;
        }
        if (found) return found;
    }
    return std::nullopt;
}

ExtractedAnswer extract_final_answer(std::string_view raw)
{
    const auto lower = to_lower_ascii(raw);
    constexpr std::string_view key = "final answer";
    for (auto pos = lower.rfind(key); pos != std::string::npos; pos = pos == 0 ? std::string::npos : lower.rfind(key, pos - 1)) {
        std::size_t i = pos + key.size();
        while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '*')) ++i;
        if (i >= raw.size() || raw[i] != ':') continue;
        ++i;
        while (i < raw.size() && (is_ws(raw[i]) || raw[i] == '*')) ++i;
        auto end = raw.find('\n', i);
        auto value = trim(raw.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i));
        std::string cleaned;
        for (char c : value) {
            if (c != '*' && c != '`') cleaned += c;
        }
        auto text = trim(cleaned);
        if (text.empty() || text == "<answer>") return ExtractedAnswer::unparseable();
        if (auto num = canonical_number(text)) return {AnswerVariant::Numeric, *num};
        std::string expr(text);
        while (!expr.empty() && expr.back() == '.') expr.pop_back();
        expr = collapse_whitespace(expr);
        if (expr.empty()) return ExtractedAnswer::unparseable();
        return {AnswerVariant::Expression, expr};
    }
    return ExtractedAnswer::unparseable();
}

ExtractedAnswer extract_boxed(std::string_view raw)
{
    constexpr std::string_view key = "\\boxed";
    auto pos = raw.rfind(key);
    while (pos != std::string_view::npos) {
        std::size_t i = pos + key.size();
        while (i < raw.size() && is_ws(raw[i])) ++i;
        if (i < raw.size() && raw[i] == '{') break;
        pos = pos == 0 ? std::string_view::npos : raw.rfind(key, pos - 1);
    }
    if (pos == std::string_view::npos) return ExtractedAnswer::unparseable();
    std::size_t i = raw.find('{', pos + key.size());
    const auto open = i;
    int depth = 0;
    for (; i < raw.size(); ++i) {
        const char c = raw[i];
        if (c == '\\' && i + 1 < raw.size() && (raw[i + 1] == '{' || raw[i + 1] == '}')) {
            ++i; // escaped brace is content
            continue;
        }
        if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) break;
    }
    if (i >= raw.size()) return ExtractedAnswer::unparseable();
    auto content = collapse_whitespace(raw.substr(open + 1, i - open - 1));
    if (content.empty() || content == "<answer>") return ExtractedAnswer::unparseable();
    if (auto num = canonical_number(content)) return {AnswerVariant::Numeric, *num};
    return {AnswerVariant::Expression, content};
}

} // namespace

std::optional<std::string> canonical_number(std::string_view text)
{
    std::string s;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == ',' || c == '$') continue;
        const auto rest = text.substr(i);
        if (rest.substr(0, 3) == "\xE2\x88\x92") { // U+2212 minus
            s += '-';
            i += 2;
            continue;
        }
        if (rest.substr(0, 3) == "\xE2\x82\xAC") { // euro
            i += 2;
            continue;
        }
        if (rest.substr(0, 2) == "\xC2\xA3" || rest.substr(0, 2) == "\xC2\xA5") { // pound, yen
            i += 1;
            continue;
        }
        s += c;
    }
    const auto strip = [&] {
        s = std::string(trim(s));
        while (!s.empty() && s.back() == '.') s.pop_back();
        s = std::string(trim(s));
    };
    strip();
    if (!s.empty() && s.back() == '%') {
        s.pop_back();
        strip();
    } else if (const auto sp = s.find_last_of(" \t"); sp != std::string::npos) {
        // "7 apples" -> "7"; magnitude words change the value so they stay.
        const auto unit = to_lower_ascii(std::string_view(s).substr(sp + 1));
        const bool alpha = std::all_of(unit.begin(), unit.end(), [](char c) { return c >= 'a' && c <= 'z'; });
        static const char* const magnitudes[] = {"hundred", "thousand", "million", "billion", "trillion", "k", "m", "b"};
        const bool magnitude = std::find(std::begin(magnitudes), std::end(magnitudes), unit) != std::end(magnitudes);
        if (alpha && !magnitude) {
            s.resize(sp);
            strip();
        }
    }
    s.erase(std::remove_if(s.begin(), s.end(), is_ws), s.end());

    std::size_t i = 0;
    bool negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        negative = s[i] == '-';
        ++i;
    }
    std::string whole, frac;
    bool dot = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c >= '0' && c <= '9') {
            (dot ? frac : whole) += c;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            return std::nullopt;
        }
    }
    if (whole.empty() && frac.empty()) return std::nullopt;
    whole.erase(0, std::min(whole.find_first_not_of('0'), whole.size()));
    if (whole.empty()) whole = "0";
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::string out;
    if (negative && !(whole == "0" && frac.empty())) out += '-';
    out += whole;
    if (!frac.empty()) out += "." + frac;
    return out;
}

ExtractedAnswer extract_answer(std::string_view raw, const AnswerFormat& format)
{
    switch (format.kind) {
    case AnswerKind::MultipleChoice: {
        const auto& opts = format.options;
        auto label = last_answer_label(raw, [&](const std::string& l) {
            return std::find(opts.begin(), opts.end(), l) != opts.end();
        });
        if (!label) return ExtractedAnswer::unparseable();
        return {AnswerVariant::Option, *label};
    }
    case AnswerKind::YesNoMaybe: {
        auto label = last_answer_label(raw, [](const std::string& l) {
            const auto v = to_lower_ascii(l);
            return v == "yes" || v == "no" || v == "maybe";
        });
        if (!label) return ExtractedAnswer::unparseable();
        return {AnswerVariant::Decision, to_lower_ascii(*label)};
    }
    case AnswerKind::FinalAnswerLine: return extract_final_answer(raw);
    case AnswerKind::BoxedLatex: return extract_boxed(raw);
    }
    return ExtractedAnswer::unparseable();
}

// ---------------------------------------------------------------- voting

double VoteResult::vote(const ExtractedAnswer& answer) const
{
    for (const auto& [a, c] : histogram) {
        if (a == answer) return static_cast<double>(c) / static_cast<double>(total);
    }
    return 0.0;
}

VoteResult compute_votes(const std::vector<ExtractedAnswer>& answers)
{
    if (answers.empty()) throw ValidationError("compute_votes needs at least one sample");
    std::map<std::string, std::pair<ExtractedAnswer, std::uint64_t>> buckets;
    for (const auto& a : answers) {
        auto& slot = buckets[a.canonical()];
        slot.first = a;
        ++slot.second;
    }
    VoteResult v;
    v.total = answers.size();
    const std::pair<ExtractedAnswer, std::uint64_t>* best = nullptr;
    for (const auto& [key, slot] : buckets) {
        v.histogram.push_back(slot);
        if (!slot.first.parseable()) continue;
        if (!best || slot.second > best->second) best = &slot;
    }
    if (best) {
        v.consensus = best->first;
        v.consensus_count = best->second;
    } else {
        v.consensus = ExtractedAnswer::unparseable();
        v.consensus_count = v.total;
    }
    v.consensus_fraction = static_cast<double>(v.consensus_count) / static_cast<double>(v.total);
    return v;
}

VoteResult compute_votes(const std::vector<ResponseSample>& samples)
{
    std::vector<ExtractedAnswer> answers;
    answers.reserve(samples.size());
    for (const auto& s : samples) answers.push_back(s.extracted);
    return compute_votes(answers);
}

std::string_view to_string(DropReason reason)
{
    switch (reason) {
    case DropReason::None: return "kept";
    case DropReason::BelowThreshold: return "below_threshold";
    case DropReason::UnparseableConsensus: return "unparseable_consensus";
    case DropReason::Backend: return "backend";
    case DropReason::Truncated: return "truncated";
    }
    return "kept";
}

Verdict judge(const std::vector<ExtractedAnswer>& answers, const Fraction& tau, bool filter_enabled)
{
    Verdict v;
    v.votes = compute_votes(answers);
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (answers[i] == v.votes.consensus) {
            v.selected = i;
            break;
        }
    }
    if (!filter_enabled) return v;
    if (!v.votes.consensus.parseable()) v.reason = DropReason::UnparseableConsensus;
    else if (!tau.admits(v.votes.consensus_count, v.votes.total)) v.reason = DropReason::BelowThreshold;
    return v;
}

std::string render_response_prompt(const std::string& instruction, const TaskDefinition& task)
{
    return prompts::response(instruction, task);
}

std::string drop_report_json(const DropCounts& d)
{
    nlohmann::ordered_json j;
    j["below_threshold"] = d.below_threshold;
    j["unparseable_consensus"] = d.unparseable_consensus;
    j["backend"] = d.backend;
    j["truncated"] = d.truncated;
    return j.dump(2) + "\n";
}

FilterOutcome filter_and_select(const std::vector<InstructionCandidate>& candidates, const TaskDefinition& task,
                                const PipelineConfig& config, Gateway& gateway)
{
    std::vector<GenerationRequest> requests;
    requests.reserve(candidates.size());
    for (const auto& c : candidates) {
        GenerationRequest r;
        r.prompt = render_response_prompt(c.text, task);
        r.temperature = config.generation_temperature;
        r.max_tokens = config.max_generation_tokens;
        r.n_samples = config.consistency_samples;
        r.request_tag = "filter/" + c.job.key();
        requests.push_back(std::move(r));
    }
    auto outcomes = gateway.run_batch(requests);

    FilterOutcome out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& o = outcomes[i];
        if (!o.ok()) {
            ++out.drops.backend;
            continue;
        }
        const auto& samples = o.result->samples;
        std::vector<ExtractedAnswer> answers;
        answers.reserve(samples.size());
        for (const auto& s : samples) answers.push_back(extract_answer(s, task.answer_format));
        auto verdict = judge(answers, config.consistency_threshold, config.filter_enabled);
        switch (verdict.reason) {
        case DropReason::UnparseableConsensus: ++out.drops.unparseable_consensus; continue;
        case DropReason::BelowThreshold: ++out.drops.below_threshold; continue;
        default: break;
        }
        if (out.records.size() >= config.target_dataset_size) {
            ++out.drops.truncated;
            continue;
        }
        InstructionRecord rec;
        rec.instruction = candidates[i].text;
        rec.response = samples[verdict.selected];
        rec.consensus_answer = verdict.votes.consensus;
        rec.consensus_fraction = verdict.votes.consensus_fraction;
        rec.job = candidates[i].job;
        out.records.push_back(std::move(rec));
    }
    return out;
}

// ------------------------------------------------------------------ export

std::string dataset_to_ndjson(const std::vector<InstructionRecord>& records)
{
    std::string out;
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["instruction"] = r.instruction;
        j["response"] = r.response;
        if (r.consensus_answer.parseable()) j["answer"] = r.consensus_answer.value;
        else j["answer"] = nullptr;
        if (r.job.level) j["level"] = to_string(*r.job.level);
        else j["level"] = nullptr;
        j["keywords"] = r.job.keywords;
        j["strategy"] = to_string(r.job.strategy);
        j["consensus_fraction"] = r.consensus_fraction;
        out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::size_t export_dataset(const std::vector<InstructionRecord>& records, const std::filesystem::path& path)
{
    write_file_atomic(path, dataset_to_ndjson(records));
    return records.size();
}

std::vector<InstructionRecord> dataset_from_ndjson(std::string_view text, const AnswerFormat& format)
{
    std::vector<InstructionRecord> out;
    int lineno = 0;
    for (auto line : split_lines(text)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            InstructionRecord r;
            r.instruction = j.at("instruction").get<std::string>();
            r.response = j.at("response").get<std::string>();
            if (!j.at("answer").is_null()) {
                const auto value = j.at("answer").get<std::string>();
                switch (format.kind) {
                case AnswerKind::MultipleChoice: r.consensus_answer = {AnswerVariant::Option, value}; break;
                case AnswerKind::YesNoMaybe: r.consensus_answer = {AnswerVariant::Decision, value}; break;
                case AnswerKind::FinalAnswerLine:
                case AnswerKind::BoxedLatex: {
                    const auto num = canonical_number(value);
                    r.consensus_answer = {num && *num == value ? AnswerVariant::Numeric : AnswerVariant::Expression,
                                          value};
                    break;
                }
                }
            }
            std::optional<CognitiveLevel> level;
            if (!j.at("level").is_null()) level = parse_level(j.at("level").get<std::string>());
            const auto kws = j.at("keywords").get<std::vector<std::string>>();
            if (parse_strategy(j.at("strategy").get<std::string>()) == Strategy::Single) {
                if (kws.size() != 1) throw ParseError("single record needs one keyword");
                r.job = make_single_job(kws[0], level);
            } else {
                if (kws.size() != 2) throw ParseError("pair record needs two keywords");
                r.job = make_pair_job(kws[0], kws[1], level);
            }
            r.consensus_fraction = j.at("consensus_fraction").get<double>();
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("dataset line " + std::to_string(lineno) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ParseError("dataset line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<InstructionRecord> read_dataset(const std::filesystem::path& path, const AnswerFormat& format)
{
    return dataset_from_ndjson(read_file(path), format);
}

} // namespace instructgen
