// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

// Deliberately naive reference implementations. They rescan their inputs on
// every call and share no code with the library beyond plain value types.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// BM25 by rescanning every document for every query term.
inline double bm25(const std::vector<std::vector<std::string>>& docs, std::size_t target,
                   const std::vector<std::string>& query, double k1, double b)
{
    const double n = static_cast<double>(docs.size());
    double total_len = 0;
    for (const auto& d : docs) total_len += static_cast<double>(d.size());
    const double avgdl = total_len / n;

    double score = 0;
    for (const auto& q : query) {
        double df = 0;
        for (const auto& d : docs) {
            for (const auto& t : d) {
                if (t == q) {
                    df += 1;
                    break;
                }
            }
        }
        if (df == 0) continue;
        double tf = 0;
        for (const auto& t : docs[target]) tf += t == q ? 1 : 0;
        if (tf == 0) continue;
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        const double len = static_cast<double>(docs[target].size());
        const double norm = avgdl > 0 ? len / avgdl : 1.0;
        score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * norm));
    }
    return score;
}

/// Ranking by score descending, ties broken by ascending id, truncated to k.
inline std::vector<std::size_t> bm25_ranking(const std::vector<std::vector<std::string>>& docs,
                                             const std::vector<std::string>& ids,
                                             const std::vector<std::string>& query, double k1, double b,
                                             std::size_t k)
{
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < docs.size(); ++i) scored.emplace_back(bm25(docs, i, query, k1, b), i);
    // insertion sort keeps this independent of std::sort comparators
    for (std::size_t i = 1; i < scored.size(); ++i) {
        for (std::size_t j = i; j > 0; --j) {
            const auto& a = scored[j - 1];
            const auto& c = scored[j];
            const bool swap = c.first > a.first || (c.first == a.first && ids[c.second] < ids[a.second]);
            if (!swap) break;
            std::swap(scored[j - 1], scored[j]);
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
    return out;
}

/// Literal vote evaluator over canonical answer keys. `unparseable` marks the
/// key that may never win unless it is the only one present.
struct Vote {
    std::string consensus;
    std::uint64_t count = 0;
    double fraction = 0;
    bool keep = false;
};

inline Vote vote(const std::vector<std::string>& samples, const std::string& unparseable, std::uint64_t tau_num,
                 std::uint64_t tau_den)
{
    const auto n = samples.size();
    auto v_of = [&](const std::string& y) {
        std::uint64_t c = 0;
        for (const auto& s : samples) c += s == y ? 1 : 0;
        return c;
    };
    std::optional<std::string> best;
    std::uint64_t best_count = 0;
    for (const auto& y : samples) {
        if (y == unparseable) continue;
        const auto c = v_of(y);
        if (!best || c > best_count || (c == best_count && y < *best)) {
            best = y;
            best_count = c;
        }
    }
    Vote r;
    if (!best) {
        r.consensus = unparseable;
        r.count = n;
        r.fraction = 1.0;
        r.keep = false;
        return r;
    }
    r.consensus = *best;
    r.count = best_count;
    r.fraction = static_cast<double>(best_count) / static_cast<double>(n);
    // V(y) >= tau  <=>  count * den >= num * n
    r.keep = best_count * tau_den >= tau_num * n;
    return r;
}

/// Probability that the modal symbol of N i.i.d. draws reaches the threshold,
/// by enumerating all 3^N outcomes. Symbol 0 has probability p; symbols 1 and
/// 2 share the rest equally.
inline double retention_probability(double p, int n, std::uint64_t tau_num, std::uint64_t tau_den)
{
    const double q = (1.0 - p) / 2.0;
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    double kept = 0;
    for (int code = 0; code < total; ++code) {
        int c = code;
        int counts[3] = {0, 0, 0};
        double prob = 1;
        for (int i = 0; i < n; ++i) {
            const int s = c % 3;
            c /= 3;
            ++counts[s];
            prob *= s == 0 ? p : q;
        }
        int best = 0;
        for (int s = 1; s < 3; ++s) {
            if (counts[s] > counts[best]) best = s;
        }
        if (static_cast<std::uint64_t>(counts[best]) * tau_den >= tau_num * static_cast<std::uint64_t>(n)) kept += prob;
    }
    return kept;
}

/// Two-pass population mean and standard deviation.
inline std::pair<double, double> mean_stddev(const std::vector<double>& xs)
{
    if (xs.empty()) return {0, 0};
    double sum = 0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

inline std::uint64_t choose2(std::uint64_t k)
{
    return k * (k - (k > 0 ? 1 : 0)) / 2;
}

} // namespace oracle
