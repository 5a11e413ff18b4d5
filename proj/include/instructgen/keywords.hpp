// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/gateway.hpp"
#include "instructgen/random.hpp"
#include "instructgen/task_model.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace instructgen {

/// Lowercase, spaces and hyphens to underscores, other punctuation removed,
/// runs of underscores collapsed. The result matches [a-z0-9]+(_[a-z0-9]+)*
/// or is empty. Idempotent.
std::string canonicalize(std::string_view surface);

struct Keyword {
    std::string canonical;
    std::string display;

    friend bool operator==(const Keyword&, const Keyword&) = default;
};

enum class Provenance { Seed, Prerequisite, Advanced, Retrieved };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);

struct PoolEntry {
    Keyword keyword;
    Provenance provenance = Provenance::Seed;
    std::uint64_t iteration = 0;

    friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

/// Insertion-ordered set of keywords keyed by canonical form. Entries are
/// never modified or removed once inserted.
class KeywordPool {
  public:
    /// False (and no change) when the canonical form is already present.
    bool insert(const Keyword& keyword, Provenance provenance, std::uint64_t iteration);
    bool contains(std::string_view canonical) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<PoolEntry>& entries() const { return entries_; }
    const PoolEntry& operator[](std::size_t i) const { return entries_[i]; }
    std::vector<std::string> canonicals() const;

    friend bool operator==(const KeywordPool& a, const KeywordPool& b) { return a.entries_ == b.entries_; }

  private:
    std::vector<PoolEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Checkpoint format: one `{"canonical","display","provenance","iteration"}`
/// object per line.
std::string pool_to_ndjson(const KeywordPool& pool);
KeywordPool pool_from_ndjson(std::string_view text);

struct ParsedKeywords {
    std::vector<Keyword> keywords;
    std::size_t dropped = 0;
};

/// Tolerant parser for comma / newline separated keyword lists. Strips list
/// markers, canonicalizes, drops empty items and items of more than six
/// words, and removes duplicates keeping the first occurrence.
ParsedKeywords parse_keyword_list(std::string_view raw);

constexpr std::size_t kMaxKeywordWords = 6;

/// Splits an expansion reply into its prerequisite and advanced lists. Looks
/// for "Prerequisite ..." / "Advanced ..." labels; a reply without labels is
/// read as first line = prerequisite, remaining lines = advanced.
std::pair<ParsedKeywords, ParsedKeywords> parse_expansion_reply(std::string_view raw);

struct SeedOptions {
    std::uint64_t reprompts = 3;
    double temperature = 0.7;
    std::uint64_t max_tokens = 2048;
};

/// Builds K_0. Re-prompts when the reply is short; the pool is capped at n.
/// Throws SeedShortfall when fewer than ceil(n/2) keywords survive.
KeywordPool seed_keywords(const TaskDefinition& task, std::uint64_t n, Gateway& gateway,
                          const SeedOptions& options = {});

struct ExpansionStep {
    std::uint64_t iteration = 0;
    std::vector<Keyword> sampled_examples;
    std::vector<Keyword> prerequisite_new;
    std::vector<Keyword> advanced_new;
    bool failed = false;
    std::string error;
};

/// One round of bi-directional expansion against the pool as it stands.
/// Gateway errors propagate; an unparseable reply gives empty lists.
ExpansionStep expand_step(const KeywordPool& pool, const TaskDefinition& task, const PipelineConfig& config,
                          Rng& rng, Gateway& gateway, std::uint64_t iteration);

/// Adds a step's new keywords; returns how many were inserted.
std::size_t merge_step(KeywordPool& pool, const ExpansionStep& step);

struct ExpansionResult {
    KeywordPool pool;
    std::vector<ExpansionStep> steps;
    std::size_t failed_iterations = 0;
};

/// Runs config.expansion_iterations steps, merging after each. A failing
/// iteration is logged and skipped.
ExpansionResult run_expansion(KeywordPool pool, const TaskDefinition& task, const PipelineConfig& config,
                              Gateway& gateway, Rng& rng);

} // namespace instructgen
