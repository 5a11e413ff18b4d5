// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/retrieval.hpp"

#include "instructgen/errors.hpp"
#include "instructgen/prompts.hpp"
#include "instructgen/text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace instructgen {

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2) out.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) {
            cur += ch;
        } else if (ch >= 'A' && ch <= 'Z') {
            cur += static_cast<char>(ch - 'A' + 'a');
        } else {
            flush();
        }
    }
    flush();
    return out;
}

// ---------------------------------------------------------------- ingest

namespace {

std::vector<std::string_view> split_words(std::string_view s)
{
    std::vector<std::string_view> words;
    std::size_t i = 0;
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < s.size()) {
        while (i < s.size() && space(s[i])) ++i;
        auto start = i;
        while (i < s.size() && !space(s[i])) ++i;
        if (i > start) words.push_back(s.substr(start, i - start));
    }
    return words;
}

std::vector<std::string> split_paragraphs(std::string_view text)
{
    std::vector<std::string> paras;
    std::string cur;
    for (auto line : split_lines(text)) {
        if (trim(line).empty()) {
            if (!cur.empty()) paras.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        if (!cur.empty()) cur += '\n';
        cur += line;
    }
    if (!cur.empty()) paras.push_back(std::move(cur));
    return paras;
}

} // namespace

std::vector<std::string> chunk_text(std::string_view text, std::uint64_t max_tokens)
{
    if (max_tokens < 1) throw ValidationError("chunk limit must be >= 1");
    if (tokenize(text).size() <= max_tokens) return {std::string(text)};

    std::vector<std::string> chunks;
    std::string cur;
    std::uint64_t cur_tokens = 0;
    auto flush = [&] {
        if (!cur.empty()) chunks.push_back(std::move(cur));
        cur.clear();
        cur_tokens = 0;
    };
    for (const auto& para : split_paragraphs(text)) {
        const auto t = tokenize(para).size();
        if (t > max_tokens) {
            flush();
            for (auto w : split_words(para)) {
                const auto wt = tokenize(w).size();
                if (cur_tokens + wt > max_tokens && cur_tokens > 0) flush();
                if (!cur.empty()) cur += ' ';
                cur += w;
                cur_tokens += wt;
            }
            continue;
        }
        if (cur_tokens + t > max_tokens) flush();
        if (!cur.empty()) cur += "\n\n";
        cur += para;
        cur_tokens += t;
    }
    flush();
    return chunks;
}

IngestReport ingest_corpus(const std::filesystem::path& root, std::uint64_t max_tokens)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IoError("corpus root is not a directory: " + root.string());

    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (it->is_regular_file() && it->path().extension() == ".txt") files.push_back(it->path());
    }
    if (ec) throw IoError("cannot walk " + root.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());

    IngestReport report;
    for (const auto& path : files) {
        auto rel = path.lexically_relative(root);
        auto first = rel.begin();
        if (std::distance(rel.begin(), rel.end()) < 2) {
            ++report.untagged_files;
            continue;
        }
        const auto source = first->string();
        auto id_path = rel;
        id_path.replace_extension();
        const auto base_id = id_path.generic_string();

        const auto text = read_file(path);
        ++report.files_read;
        if (!is_valid_utf8(text)) {
            ++report.encoding_errors;
            continue;
        }
        auto chunks = chunk_text(text, max_tokens);
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            Document d;
            d.doc_id = chunks.size() == 1 ? base_id : base_id + "#" + std::to_string(i);
            d.source_tag = source;
            d.token_count = tokenize(chunks[i]).size();
            d.text = std::move(chunks[i]);
            report.documents.push_back(std::move(d));
        }
    }
    return report;
}

// ------------------------------------------------------------------ index

Bm25Index Bm25Index::build(const std::vector<Document>& docs, double k1, double b)
{
    if (docs.empty()) throw EmptyCorpus("cannot build an index over zero documents");
    if (!(k1 >= 0) || !(b >= 0 && b <= 1)) throw ValidationError("bm25 parameters out of range");

    std::vector<std::size_t> order(docs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto c) { return docs[a].doc_id < docs[c].doc_id; });

    Bm25Index idx;
    idx.k1_ = k1;
    idx.b_ = b;
    std::set<std::string> sources;
    std::uint64_t total = 0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto& d = docs[order[pos]];
        if (pos > 0 && d.doc_id == idx.doc_ids_.back()) {
            throw ValidationError("duplicate doc_id '" + d.doc_id + "'");
        }
        idx.doc_ids_.push_back(d.doc_id);
        sources.insert(d.source_tag);
        const auto terms = tokenize(d.text);
        idx.doc_lengths_.push_back(terms.size());
        total += terms.size();
        std::map<std::string, std::uint32_t> tf;
        for (const auto& t : terms) ++tf[t];
        for (const auto& [term, count] : tf) {
            idx.postings_[term].push_back(Posting{static_cast<std::uint32_t>(pos), count});
        }
    }
    idx.source_tags_.assign(sources.begin(), sources.end());
    idx.avg_doc_length_ = static_cast<double>(total) / static_cast<double>(idx.doc_ids_.size());
    const auto n = static_cast<double>(idx.doc_ids_.size());
    for (const auto& [term, plist] : idx.postings_) {
        const auto df = static_cast<double>(plist.size());
        idx.idf_[term] = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    }
    return idx;
}

double Bm25Index::term_weight(double idf, std::uint32_t tf, std::uint64_t len) const
{
    const double f = static_cast<double>(tf);
    const double norm = avg_doc_length_ > 0 ? static_cast<double>(len) / avg_doc_length_ : 1.0;
    return idf * (f * (k1_ + 1.0)) / (f + k1_ * (1.0 - b_ + b_ * norm));
}

std::size_t Bm25Index::doc_position(std::string_view doc_id) const
{
    auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id);
    if (it == doc_ids_.end() || *it != doc_id) throw UnknownDocument("unknown document '" + std::string(doc_id) + "'");
    return static_cast<std::size_t>(it - doc_ids_.begin());
}

double Bm25Index::idf(std::string_view term) const
{
    auto it = idf_.find(term);
    return it == idf_.end() ? 0.0 : it->second;
}

const std::vector<Bm25Index::Posting>* Bm25Index::postings(std::string_view term) const
{
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

std::vector<double> Bm25Index::score_all(const std::vector<std::string>& query_terms) const
{
    std::vector<double> scores(doc_ids_.size(), 0.0);
    for (const auto& term : query_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double w = idf_.find(term)->second;
        for (const auto& p : it->second) scores[p.doc] += term_weight(w, p.tf, doc_lengths_[p.doc]);
    }
    return scores;
}

double Bm25Index::score(const std::vector<std::string>& query_terms, std::string_view doc_id) const
{
    const auto pos = doc_position(doc_id);
    double s = 0.0;
    for (const auto& term : query_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        auto p = std::lower_bound(plist.begin(), plist.end(), pos,
                                  [](const Posting& a, std::size_t d) { return a.doc < d; });
        if (p == plist.end() || p->doc != pos) continue;
        s += term_weight(idf_.find(term)->second, p->tf, doc_lengths_[pos]);
    }
    return s;
}

std::vector<std::pair<std::string, double>> Bm25Index::top_k(const std::vector<std::string>& query_terms,
                                                             std::size_t k) const
{
    const auto scores = score_all(query_terms);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    k = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t c) {
                          if (scores[a] != scores[c]) return scores[a] > scores[c];
                          return a < c; // doc_ids_ are sorted
                      });
    std::vector<std::pair<std::string, double>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.emplace_back(doc_ids_[order[i]], scores[order[i]]);
    return out;
}

std::string Bm25Index::to_json() const
{
    nlohmann::ordered_json j;
    j["format"] = "instructgen-bm25";
    j["version"] = 1;
    j["k1"] = k1_;
    j["b"] = b_;
    j["doc_count"] = doc_ids_.size();
    j["avg_doc_length"] = avg_doc_length_;
    j["sources"] = source_tags_;
    auto docs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        docs.push_back({{"id", doc_ids_[i]}, {"length", doc_lengths_[i]}});
    }
    j["docs"] = std::move(docs);
    auto post = nlohmann::ordered_json::object();
    for (const auto& [term, plist] : postings_) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : plist) arr.push_back({p.doc, p.tf});
        post[term] = std::move(arr);
    }
    j["postings"] = std::move(post);
    return j.dump();
}

Bm25Index Bm25Index::from_json(std::string_view text)
{
    try {
        auto j = nlohmann::json::parse(text);
        if (j.at("format").get<std::string>() != "instructgen-bm25") throw ParseError("not a bm25 index file");
        if (j.at("version").get<int>() != 1) throw ParseError("unsupported bm25 index version");
        Bm25Index idx;
        idx.k1_ = j.at("k1").get<double>();
        idx.b_ = j.at("b").get<double>();
        idx.source_tags_ = j.at("sources").get<std::vector<std::string>>();
        std::uint64_t total = 0;
        for (const auto& d : j.at("docs")) {
            idx.doc_ids_.push_back(d.at("id").get<std::string>());
            idx.doc_lengths_.push_back(d.at("length").get<std::uint64_t>());
            total += idx.doc_lengths_.back();
        }
        if (idx.doc_ids_.empty()) throw EmptyCorpus("index file holds no documents");
        if (!std::is_sorted(idx.doc_ids_.begin(), idx.doc_ids_.end())) throw ParseError("doc ids out of order");
        idx.avg_doc_length_ = static_cast<double>(total) / static_cast<double>(idx.doc_ids_.size());
        const auto n = static_cast<double>(idx.doc_ids_.size());
        for (const auto& [term, arr] : j.at("postings").items()) {
            auto& plist = idx.postings_[term];
            for (const auto& p : arr) {
                Posting post{p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()};
                if (post.doc >= idx.doc_ids_.size()) throw ParseError("posting refers to unknown document");
                plist.push_back(post);
            }
            const auto df = static_cast<double>(plist.size());
            idx.idf_[term] = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        }
        return idx;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad bm25 index file: ") + e.what());
    }
}

// ------------------------------------------------------ augmentation

RetrievalQuery make_query(const TaskDefinition& task, std::vector<std::string> sampled_keywords)
{
    RetrievalQuery q;
    q.text = task.description;
    for (const auto& k : sampled_keywords) {
        std::string words = k;
        std::replace(words.begin(), words.end(), '_', ' ');
        q.text += ' ';
        q.text += words;
    }
    q.sampled_keywords = std::move(sampled_keywords);
    return q;
}

std::vector<std::pair<std::string, double>> retrieve_top_k(const Bm25Index& index, const RetrievalQuery& query,
                                                           std::size_t k)
{
    if (k < 1) throw ValidationError("k must be >= 1");
    return index.top_k(tokenize(query.text), k);
}

RetrievalResult retrieval_augment(KeywordPool pool, const TaskDefinition& task, const Bm25Index& index,
                                  const std::vector<Document>& docs, const PipelineConfig& config, Gateway& gateway,
                                  Rng& rng)
{
    if (pool.empty()) throw SeedShortfall("keyword pool is empty; nothing to query with");
    std::unordered_map<std::string, const Document*> by_id;
    for (const auto& d : docs) by_id.emplace(d.doc_id, &d);

    RetrievalResult out;
    for (std::uint64_t r = 1; r <= config.retrieval_rounds; ++r) {
        RetrievalRound round;
        round.round = r;
        std::vector<std::string> sampled;
        for (auto i : sample_indices(rng, pool.size(), static_cast<std::size_t>(config.retrieval_query_keywords))) {
            sampled.push_back(pool[i].keyword.canonical);
        }
        round.query = make_query(task, std::move(sampled));
        round.hits = retrieve_top_k(index, round.query, static_cast<std::size_t>(config.retrieval_top_k));

        std::vector<std::string> digest;
        if (pool.size() > config.keyword_digest_size) {
            auto pick = sample_indices(rng, pool.size(), static_cast<std::size_t>(config.keyword_digest_size));
            std::sort(pick.begin(), pick.end());
            for (auto i : pick) digest.push_back(pool[i].keyword.canonical);
        } else {
            digest = pool.canonicals();
        }

        std::vector<prompts::Passage> passages;
        for (const auto& [id, s] : round.hits) {
            if (s <= 0) continue;
            auto it = by_id.find(id);
            if (it == by_id.end()) continue;
            passages.push_back({it->second->source_tag, it->second->text});
        }
        if (passages.empty()) {
            out.rounds.push_back(std::move(round));
            continue;
        }

        GenerationRequest req;
        req.prompt = prompts::retrieval_extraction(task, digest, passages, index.source_tags());
        req.temperature = config.generation_temperature;
        req.max_tokens = config.max_generation_tokens;
        req.request_tag = "retrieve/" + std::to_string(r);
        try {
            auto result = gateway.request(req);
            for (const auto& k : parse_keyword_list(result.samples.front()).keywords) {
                if (pool.insert(k, Provenance::Retrieved, r)) round.added.push_back(k);
            }
        } catch (const Error& e) {
            round.failed = true;
            round.error = e.what();
            ++out.failed_rounds;
        }
        out.rounds.push_back(std::move(round));
    }
    out.pool = std::move(pool);
    return out;
}

} // namespace instructgen
