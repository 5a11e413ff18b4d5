// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/gateway.hpp"
#include "instructgen/keywords.hpp"
#include "instructgen/random.hpp"
#include "instructgen/task_model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace instructgen {

/// Index analyzer: ASCII-lowercased maximal alphanumeric runs, tokens shorter
/// than two characters dropped. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct Document {
    std::string doc_id;
    std::string source_tag;
    std::string text;
    std::uint64_t token_count = 0;
};

struct IngestReport {
    std::vector<Document> documents;
    std::size_t files_read = 0;
    std::size_t encoding_errors = 0;
    std::size_t untagged_files = 0; ///< files directly under the root
};

/// Reads `root/<source_tag>/**/*.txt`. Files over `max_tokens` are packed
/// paragraph by paragraph into chunks "<id>#0", "<id>#1", ...; an oversized
/// paragraph is split at word boundaries. Invalid UTF-8 files are skipped
/// and counted. Throws IoError when root is not a directory.
IngestReport ingest_corpus(const std::filesystem::path& root, std::uint64_t max_tokens = 512);

/// Splits one text into chunks of at most `max_tokens` analyzer tokens.
std::vector<std::string> chunk_text(std::string_view text, std::uint64_t max_tokens);

/// Okapi BM25 with idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1).
/// Immutable after construction; documents are kept in ascending doc_id
/// order so input order never affects results.
class Bm25Index {
  public:
    struct Posting {
        std::uint32_t doc = 0; ///< position in doc_ids()
        std::uint32_t tf = 0;
        friend bool operator==(const Posting&, const Posting&) = default;
    };

    /// Throws EmptyCorpus for no documents, ValidationError for duplicate ids.
    static Bm25Index build(const std::vector<Document>& docs, double k1 = 1.2, double b = 0.75);

    double score(const std::vector<std::string>& query_terms, std::string_view doc_id) const;
    /// Scores for every document, aligned with doc_ids().
    std::vector<double> score_all(const std::vector<std::string>& query_terms) const;
    /// Descending score, ties by ascending doc_id; length min(k, doc_count).
    std::vector<std::pair<std::string, double>> top_k(const std::vector<std::string>& query_terms,
                                                      std::size_t k) const;

    double idf(std::string_view term) const;
    const std::vector<Posting>* postings(std::string_view term) const;

    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    double k1() const { return k1_; }
    double b() const { return b_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const std::vector<std::uint64_t>& doc_lengths() const { return doc_lengths_; }
    const std::vector<std::string>& source_tags() const { return source_tags_; }
    std::size_t vocabulary_size() const { return postings_.size(); }

    /// Self-describing JSON checkpoint (`format`, `version` header).
    std::string to_json() const;
    static Bm25Index from_json(std::string_view text);

  private:
    double term_weight(double idf, std::uint32_t tf, std::uint64_t len) const;
    std::size_t doc_position(std::string_view doc_id) const;

    double k1_ = 1.2;
    double b_ = 0.75;
    double avg_doc_length_ = 0;
    std::vector<std::string> doc_ids_;
    std::vector<std::string> source_tags_;
    std::vector<std::uint64_t> doc_lengths_;
    std::map<std::string, std::vector<Posting>, std::less<>> postings_;
    std::map<std::string, double, std::less<>> idf_;
};

struct RetrievalQuery {
    std::string text;
    std::vector<std::string> sampled_keywords;
};

RetrievalQuery make_query(const TaskDefinition& task, std::vector<std::string> sampled_keywords);

/// Throws ValidationError when k == 0.
std::vector<std::pair<std::string, double>> retrieve_top_k(const Bm25Index& index, const RetrievalQuery& query,
                                                           std::size_t k);

struct RetrievalRound {
    std::uint64_t round = 0;
    RetrievalQuery query;
    std::vector<std::pair<std::string, double>> hits;
    std::vector<Keyword> added;
    bool failed = false;
    std::string error;
};

struct RetrievalResult {
    KeywordPool pool;
    std::vector<RetrievalRound> rounds;
    std::size_t failed_rounds = 0;
};

/// Retrieval-augmented keyword extraction over `docs` (the documents the
/// index was built from). A failing round is recorded and skipped.
RetrievalResult retrieval_augment(KeywordPool pool, const TaskDefinition& task, const Bm25Index& index,
                                  const std::vector<Document>& docs, const PipelineConfig& config, Gateway& gateway,
                                  Rng& rng);

} // namespace instructgen
