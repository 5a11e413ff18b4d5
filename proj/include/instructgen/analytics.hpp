// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/consistency.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace instructgen {

struct VerbNounPair {
    std::string verb;
    std::string noun;

    friend auto operator<=>(const VerbNounPair&, const VerbNounPair&) = default;
};

/// Imperative-verb lexicon and stopword list used by the shallow extractor.
class Lexicon {
public:
    /// The bundled word lists.
    static const Lexicon& bundled();

    Lexicon(std::vector<std::string> verbs, std::vector<std::string> stopwords, std::string version);

    bool is_verb(std::string_view lemma) const { return verbs_.count(std::string(lemma)) > 0; }
    bool is_stopword(std::string_view word) const { return stopwords_.count(std::string(word)) > 0; }

    /// Base form of an inflected verb via -ing/-ed/-es/-s stripping, or
    /// nullopt when no candidate is in the lexicon. Stopwords never match.
    std::optional<std::string> lemmatize(std::string_view word) const;

    std::size_t verb_count() const { return verbs_.size(); }
    std::size_t stopword_count() const { return stopwords_.size(); }
    const std::string& version() const { return version_; }

private:
    std::unordered_set<std::string> verbs_;
    std::unordered_set<std::string> stopwords_;
    std::string version_;
};

/// Number of whitespace-delimited tokens.
std::uint64_t word_count(std::string_view text);

/// Clause-initial imperative verbs paired with the head of the following
/// noun phrase. Coordinated verbs ("evaluate and compare") share the phrase.
std::vector<VerbNounPair> extract_verb_noun_pairs(std::string_view instruction,
                                                  const Lexicon& lexicon = Lexicon::bundled());

/// Pairs must strictly exceed 10 occurrences to appear in the sunburst view.
inline constexpr std::uint64_t kSunburstMinFrequency = 11;
inline constexpr std::uint64_t kSunburstPairsPerVerb = 4;

struct DatasetStats {
    std::uint64_t instruction_count = 0;
    double avg_instruction_length_words = 0;
    std::uint64_t total_pairs = 0;
    std::uint64_t min_pair_frequency = 1;
    /// After the frequency filter.
    std::uint64_t unique_pairs = 0;
    double avg_pair_occurrences = 0;
    double stddev_pair_occurrences = 0;
    /// Unfiltered; its counts sum to total_pairs.
    std::map<VerbNounPair, std::uint64_t> pair_histogram;

    friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats compute_stats(const std::vector<std::string>& instructions, std::uint64_t min_pair_frequency = 1,
                           const Lexicon& lexicon = Lexicon::bundled());
DatasetStats compute_stats(const std::vector<InstructionRecord>& dataset, std::uint64_t min_pair_frequency = 1,
                           const Lexicon& lexicon = Lexicon::bundled());

struct SunburstRow {
    std::string verb;
    std::string noun;
    std::uint64_t count = 0;

    friend bool operator==(const SunburstRow&, const SunburstRow&) = default;
};

/// Pairs passing the stats' frequency filter, at most `top_pairs_per_verb`
/// per verb, count-descending then noun-ascending within a verb. Verbs are
/// ordered alphabetically.
std::vector<SunburstRow> sunburst_rows(const DatasetStats& stats, std::uint64_t top_pairs_per_verb = kSunburstPairsPerVerb);
std::string sunburst_csv(const std::vector<SunburstRow>& rows);
/// Writes `verb,noun,count` CSV; returns the number of data rows.
std::size_t export_sunburst(const DatasetStats& stats, std::uint64_t top_pairs_per_verb,
                            const std::filesystem::path& path);

std::string stats_to_json(const DatasetStats& stats);
/// Human-readable summary table.
std::string stats_table(const DatasetStats& stats);

} // namespace instructgen
