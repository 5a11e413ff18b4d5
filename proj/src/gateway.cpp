// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/gateway.hpp"

#include "instructgen/errors.hpp"
#include "instructgen/text_util.hpp"

#include <cmath>
#include <exception>
#include <thread>

namespace instructgen {

void validate(const GenerationRequest& r)
{
    if (r.prompt.empty()) throw ValidationError("generation request has an empty prompt");
    if (!(r.temperature >= 0)) throw ValidationError("temperature must be >= 0");
    if (r.n_samples < 1) throw ValidationError("n_samples must be >= 1");
}

std::string truncate_tokens(const std::string& text, std::uint64_t max_tokens)
{
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    std::uint64_t tokens = 0;
    std::size_t i = 0;
    std::size_t kept_end = 0;
    while (i < text.size()) {
        while (i < text.size() && space(text[i])) ++i;
        if (i >= text.size()) break;
        if (tokens == max_tokens) return text.substr(0, kept_end);
        ++tokens;
        while (i < text.size() && !space(text[i])) ++i;
        kept_end = i;
    }
    return text;
}

// ------------------------------------------------------------ MockBackend

void MockBackend::script(const std::string& tag, std::vector<std::string> samples)
{
    std::lock_guard lock(mu_);
    auto& q = by_tag_[tag];
    for (auto& s : samples) q.push_back(std::move(s));
}

void MockBackend::script_prompt(const std::string& prompt, std::vector<std::string> samples)
{
    std::lock_guard lock(mu_);
    auto& q = by_hash_[prompt_hash(prompt)];
    for (auto& s : samples) q.push_back(std::move(s));
}

void MockBackend::set_responder(Responder responder)
{
    std::lock_guard lock(mu_);
    responder_ = std::move(responder);
}

void MockBackend::load(const std::vector<TranscriptRecord>& records)
{
    std::lock_guard lock(mu_);
    for (const auto& r : records) {
        auto& q = by_tag_[r.tag];
        q.insert(q.end(), r.samples.begin(), r.samples.end());
    }
}

std::vector<std::string> MockBackend::complete(const GenerationRequest& request)
{
    calls_.fetch_add(1);
    const auto n = static_cast<std::size_t>(request.n_samples);
    std::vector<std::string> out;
    Responder responder;
    {
        std::lock_guard lock(mu_);
        auto take = [&](std::map<std::string, std::deque<std::string>>& m, const std::string& key) {
            auto it = m.find(key);
            if (it == m.end() || it->second.empty()) return false;
            if (it->second.size() < n) {
                throw ScriptExhausted("mock script for '" + key + "' holds " + std::to_string(it->second.size()) +
                                      " samples, request wants " + std::to_string(n));
            }
            for (std::size_t i = 0; i < n; ++i) {
                out.push_back(std::move(it->second.front()));
                it->second.pop_front();
            }
            return true;
        };
        if (!take(by_tag_, request.request_tag) && !take(by_hash_, prompt_hash(request.prompt))) {
            responder = responder_;
            if (!responder) {
                throw ScriptExhausted("no scripted response for tag '" + request.request_tag + "'");
            }
        }
    }
    if (responder) {
        out = responder(request);
        if (out.size() != n) throw BackendError("mock responder returned the wrong number of samples");
    }
    for (auto& s : out) s = truncate_tokens(s, request.max_tokens);
    return out;
}

// ---------------------------------------------------------------- Gateway

std::chrono::milliseconds BackoffSchedule::delay_before_attempt(std::uint64_t attempt) const
{
    // attempt is 1-based; the first attempt has no delay.
    if (attempt <= 1) return std::chrono::milliseconds{0};
    const double ms = static_cast<double>(initial.count()) * std::pow(multiplier, static_cast<double>(attempt - 2));
    return std::chrono::milliseconds{static_cast<std::int64_t>(ms)};
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options))
{
    if (!backend_) throw ValidationError("gateway needs a backend");
    if (!options_.sleeper) {
        options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
    if (options_.max_attempts < 1) options_.max_attempts = 1;
    if (options_.parallelism < 1) options_.parallelism = 1;
}

std::vector<std::string> Gateway::attempt(const GenerationRequest& request)
{
    calls_.fetch_add(1);
    const auto now = in_flight_.fetch_add(1) + 1;
    auto peak = peak_in_flight_.load();
    while (now > peak && !peak_in_flight_.compare_exchange_weak(peak, now)) {
    }
    struct Leave {
        std::atomic<std::size_t>& c;
        ~Leave() { c.fetch_sub(1); }
    } leave{in_flight_};

    auto samples = backend_->complete(request);
    if (samples.size() != request.n_samples) {
        throw BackendError("backend returned " + std::to_string(samples.size()) + " samples, expected " +
                           std::to_string(request.n_samples));
    }
    return samples;
}

void Gateway::record(const GenerationRequest& request, const GenerationResult& result)
{
    if (!transcript_) return;
    TranscriptRecord r;
    r.tag = request.request_tag;
    r.prompt = request.prompt;
    r.prompt_hash = prompt_hash(request.prompt);
    r.samples = result.samples;
    r.attempts = result.attempts;
    r.ts = std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
               .count();
    transcript_->append(std::move(r));
}

GenerationResult Gateway::generate(const GenerationRequest& request)
{
    return with_retry(request, 1, options_.backoff);
}

GenerationResult Gateway::with_retry(const GenerationRequest& request, std::uint64_t max_attempts,
                                     const BackoffSchedule& backoff)
{
    validate(request);
    if (max_attempts < 1) throw ValidationError("max_attempts must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t k = 1;; ++k) {
        if (k > 1) options_.sleeper(backoff.delay_before_attempt(k));
        try {
            GenerationResult result;
            result.samples = attempt(request);
            result.backend_id = backend_->id();
            result.attempts = k;
            result.latency = std::chrono::steady_clock::now() - start;
            record(request, result);
            return result;
        } catch (const TransportError& e) {
            if (k >= max_attempts) {
                throw TransportError(std::string(e.what()) + " (after " + std::to_string(k) + " attempts)");
            }
        }
    }
}

GenerationResult Gateway::request(const GenerationRequest& request)
{
    return with_retry(request, options_.max_attempts, options_.backoff);
}

std::vector<BatchOutcome> Gateway::run_batch(const std::vector<GenerationRequest>& requests, std::size_t parallelism)
{
    if (parallelism < 1) throw ValidationError("parallelism must be >= 1");
    std::vector<BatchOutcome> out(requests.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= requests.size()) return;
            try {
                out[i].result = request(requests[i]);
            } catch (const std::exception& e) {
                out[i].error_kind = error_kind(e);
                out[i].error_message = e.what();
            }
        }
    };
    const auto workers = std::min(parallelism, requests.size());
    if (workers <= 1) {
        worker();
        return out;
    }
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return out;
}

} // namespace instructgen
