// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Portable sampling helpers. The standard distributions are implementation
// defined, so everything here draws raw 64-bit words from mt19937_64 to keep
// runs reproducible across standard libraries.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace instructgen {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

/// Uniform real in [0, 1) with 53 bits of resolution.
inline double uniform_unit(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng)
{
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// k distinct indices from [0, n) in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k)
{
    if (k > n) k = n;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

/// k distinct values from [0, n) without materializing the range (Floyd's
/// algorithm); returned in ascending order. Used for very large spaces.
inline std::vector<std::uint64_t> sample_sparse(Rng& rng, std::uint64_t n, std::uint64_t k)
{
    if (k > n) k = n;
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k) * 2);
    for (std::uint64_t j = n - k; j < n; ++j) {
        const std::uint64_t t = uniform_index(rng, j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream for a named stage, so skipping one stage never shifts
/// the randomness of another.
Rng derive_stream(std::uint64_t root_seed, std::string_view stream_name);

} // namespace instructgen
