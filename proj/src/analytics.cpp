// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/analytics.hpp"

#include "instructgen/text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>

namespace instructgen {

Lexicon::Lexicon(std::vector<std::string> verbs, std::vector<std::string> stopwords, std::string version)
    : verbs_(verbs.begin(), verbs.end()), stopwords_(stopwords.begin(), stopwords.end()), version_(std::move(version))
{
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string undouble(std::string_view stem)
{
    if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) return std::string(stem.substr(0, stem.size() - 1));
    return {};
}

bool is_alpha(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_digit(char c)
{
    return c >= '0' && c <= '9';
}

} // namespace

std::optional<std::string> Lexicon::lemmatize(std::string_view word) const
{
    if (word.empty() || is_stopword(word)) return std::nullopt;
    if (is_verb(word)) return std::string(word);
    std::vector<std::string> candidates;
    const auto cut = [&](std::size_t n) { return std::string(word.substr(0, word.size() - n)); };
    if ((ends_with(word, "ies") || ends_with(word, "ied")) && word.size() > 4) {
        candidates.push_back(cut(3) + "y");
    }
    if (ends_with(word, "ing") && word.size() > 5) {
        const auto base = cut(3);
        candidates.push_back(base);
        candidates.push_back(base + "e");
        candidates.push_back(undouble(base));
    } else if (ends_with(word, "ed") && word.size() > 4) {
        const auto base = cut(2);
        candidates.push_back(base);
        candidates.push_back(cut(1));
        candidates.push_back(undouble(base));
    } else if (ends_with(word, "es") && word.size() > 3) {
        candidates.push_back(cut(2));
        candidates.push_back(cut(1));
    } else if (ends_with(word, "s") && !ends_with(word, "ss") && word.size() > 2) {
        candidates.push_back(cut(1));
    }
    for (const auto& c : candidates) {
        if (!c.empty() && is_verb(c)) return c;
    }
    return std::nullopt;
}

std::uint64_t word_count(std::string_view text)
{
    std::uint64_t n = 0;
    bool in_word = false;
    for (char c : text) {
        const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!ws && !in_word) ++n;
        in_word = !ws;
    }
    return n;
}

namespace {

enum class TokKind { Word, Number, Comma, ClauseEnd, Other };

struct Tok {
    TokKind kind;
    std::string text;
};

std::vector<Tok> tokenize_instruction(std::string_view text)
{
    std::vector<Tok> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (is_alpha(c)) {
            std::string w;
            while (i < text.size() && (is_alpha(text[i]) || text[i] == '\'')) {
                w += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
                ++i;
            }
            if (ends_with(w, "'s")) w.resize(w.size() - 2);
            w.erase(std::remove(w.begin(), w.end(), '\''), w.end());
            if (!w.empty()) out.push_back({TokKind::Word, w});
        } else if (is_digit(c)) {
            std::string n;
            while (i < text.size() &&
                   (is_digit(text[i]) || ((text[i] == '.' || text[i] == ',') && i + 1 < text.size() && is_digit(text[i + 1])))) {
                n += text[i++];
            }
            out.push_back({TokKind::Number, n});
        } else if (c == '-' && i > 0 && i + 1 < text.size() && is_alpha(text[i - 1]) && is_alpha(text[i + 1])) {
            ++i; // intra-word hyphen separates tokens without ending the phrase
        } else if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
        } else if (c == '.' || c == '!' || c == '?' || c == ';' || c == ':' || c == '\n') {
            out.push_back({TokKind::ClauseEnd, std::string(1, c)});
            ++i;
        } else if (c == ',') {
            out.push_back({TokKind::Comma, ","});
            ++i;
        } else {
            out.push_back({TokKind::Other, std::string(1, c)});
            ++i;
        }
    }
    return out;
}

bool is_coordinator(const Tok& t)
{
    return t.kind == TokKind::Word && (t.text == "and" || t.text == "or");
}

enum class Opening { None, Clause, Comma, Coordination };

} // namespace

std::vector<VerbNounPair> extract_verb_noun_pairs(std::string_view instruction, const Lexicon& lexicon)
{
    const auto toks = tokenize_instruction(instruction);
    const auto exact_verb = [&](const Tok& t) {
        return t.kind == TokKind::Word && !lexicon.is_stopword(t.text) && lexicon.is_verb(t.text);
    };

    std::vector<VerbNounPair> pairs;
    Opening opening = Opening::Clause;
    std::size_t i = 0;
    while (i < toks.size()) {
        const auto& t = toks[i];
        switch (t.kind) {
        case TokKind::ClauseEnd: opening = Opening::Clause; ++i; continue;
        case TokKind::Comma: opening = Opening::Comma; ++i; continue;
        case TokKind::Other: ++i; continue; // quotes and brackets keep the opening
        case TokKind::Number: opening = Opening::None; ++i; continue;
        case TokKind::Word: break;
        }

        std::optional<std::string> verb;
        if (opening == Opening::Clause) verb = lexicon.lemmatize(t.text);
        else if (opening != Opening::None && exact_verb(t)) verb = t.text;
        if (!verb) {
            opening = is_coordinator(t) ? Opening::Coordination : Opening::None;
            ++i;
            continue;
        }

        std::vector<std::string> verbs{*verb};
        std::size_t j = i + 1;
        for (;;) {
            std::size_t k = j;
            if (k < toks.size() && toks[k].kind == TokKind::Comma) ++k;
            if (k < toks.size() && is_coordinator(toks[k])) ++k;
            if (k == j || k >= toks.size() || !exact_verb(toks[k])) break;
            verbs.push_back(toks[k].text);
            j = k + 1;
        }

        while (j < toks.size() && toks[j].kind == TokKind::Word && lexicon.is_stopword(toks[j].text)) ++j;
        std::string head;
        while (j < toks.size() && (toks[j].kind == TokKind::Number ||
                                   (toks[j].kind == TokKind::Word && !lexicon.is_stopword(toks[j].text)))) {
            if (toks[j].kind == TokKind::Word) head = toks[j].text;
            ++j;
        }
        if (!head.empty()) {
            for (const auto& v : verbs) pairs.push_back({v, head});
        }
        opening = Opening::None;
        i = j;
    }
    return pairs;
}

DatasetStats compute_stats(const std::vector<std::string>& instructions, std::uint64_t min_pair_frequency,
                           const Lexicon& lexicon)
{
    DatasetStats s;
    s.min_pair_frequency = min_pair_frequency;
    s.instruction_count = instructions.size();
    if (instructions.empty()) return s;

    std::uint64_t words = 0;
    for (const auto& ins : instructions) {
        words += word_count(ins);
        for (auto& p : extract_verb_noun_pairs(ins, lexicon)) {
            ++s.pair_histogram[std::move(p)];
            ++s.total_pairs;
        }
    }
    s.avg_instruction_length_words = static_cast<double>(words) / static_cast<double>(instructions.size());

    // Welford's running mean and variance over the filtered counts.
    double mean = 0, m2 = 0;
    for (const auto& [pair, count] : s.pair_histogram) {
        if (count < min_pair_frequency) continue;
        ++s.unique_pairs;
        const double x = static_cast<double>(count);
        const double delta = x - mean;
        mean += delta / static_cast<double>(s.unique_pairs);
        m2 += delta * (x - mean);
    }
    if (s.unique_pairs > 0) {
        s.avg_pair_occurrences = mean;
        s.stddev_pair_occurrences = std::sqrt(m2 / static_cast<double>(s.unique_pairs));
    }
    return s;
}

DatasetStats compute_stats(const std::vector<InstructionRecord>& dataset, std::uint64_t min_pair_frequency,
                           const Lexicon& lexicon)
{
    std::vector<std::string> instructions;
    instructions.reserve(dataset.size());
    for (const auto& r : dataset) instructions.push_back(r.instruction);
    return compute_stats(instructions, min_pair_frequency, lexicon);
}

std::vector<SunburstRow> sunburst_rows(const DatasetStats& stats, std::uint64_t top_pairs_per_verb)
{
    std::vector<SunburstRow> out;
    std::vector<SunburstRow> group;
    const auto flush = [&] {
        std::sort(group.begin(), group.end(), [](const SunburstRow& a, const SunburstRow& b) {
            return a.count != b.count ? a.count > b.count : a.noun < b.noun;
        });
        if (group.size() > top_pairs_per_verb) group.resize(top_pairs_per_verb);
        out.insert(out.end(), group.begin(), group.end());
        group.clear();
    };
    for (const auto& [pair, count] : stats.pair_histogram) {
        if (count < stats.min_pair_frequency) continue;
        if (!group.empty() && group.front().verb != pair.verb) flush();
        group.push_back({pair.verb, pair.noun, count});
    }
    flush();
    return out;
}

std::string sunburst_csv(const std::vector<SunburstRow>& rows)
{
    std::string out = "verb,noun,count\n";
    for (const auto& r : rows) out += r.verb + "," + r.noun + "," + std::to_string(r.count) + "\n";
    return out;
}

std::size_t export_sunburst(const DatasetStats& stats, std::uint64_t top_pairs_per_verb,
                            const std::filesystem::path& path)
{
    const auto rows = sunburst_rows(stats, top_pairs_per_verb);
    write_file_atomic(path, sunburst_csv(rows));
    return rows.size();
}

std::string stats_to_json(const DatasetStats& s)
{
    nlohmann::ordered_json j;
    j["instruction_count"] = s.instruction_count;
    j["avg_instruction_length_words"] = s.avg_instruction_length_words;
    j["total_pairs"] = s.total_pairs;
    j["min_pair_frequency"] = s.min_pair_frequency;
    j["unique_pairs"] = s.unique_pairs;
    j["avg_pair_occurrences"] = s.avg_pair_occurrences;
    j["stddev_pair_occurrences"] = s.stddev_pair_occurrences;
    j["lexicon_version"] = Lexicon::bundled().version();
    auto hist = nlohmann::ordered_json::array();
    for (const auto& [pair, count] : s.pair_histogram) {
        nlohmann::ordered_json e;
        e["verb"] = pair.verb;
        e["noun"] = pair.noun;
        e["count"] = count;
        hist.push_back(std::move(e));
    }
    j["pair_histogram"] = std::move(hist);
    return j.dump(2) + "\n";
}

std::string stats_table(const DatasetStats& s)
{
    char buf[256];
    std::string out;
    const auto row = [&](const char* label, const std::string& value) {
        std::snprintf(buf, sizeof buf, "%-34s %12s\n", label, value.c_str());
        out += buf;
    };
    const auto fixed = [](double v) {
        char b[64];
        std::snprintf(b, sizeof b, "%.2f", v);
        return std::string(b);
    };
    row("Metric", "Value");
    out += std::string(47, '-') + "\n";
    row("Instructions", std::to_string(s.instruction_count));
    row("Avg. Instruction Length (words)", fixed(s.avg_instruction_length_words));
    row("Unique Verb-Noun Pairs", std::to_string(s.unique_pairs));
    row("Avg. Occurrences per Pair", fixed(s.avg_pair_occurrences));
    row("Std. Dev. of Occurrences", fixed(s.stddev_pair_occurrences));
    return out;
}

} // namespace instructgen
