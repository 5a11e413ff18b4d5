// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/http_backend.hpp"

#include "instructgen/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace instructgen {

namespace {
std::string env_or(const char* name, std::string fallback)
{
    const char* v = std::getenv(name);
    return (v && *v) ? std::string(v) : std::move(fallback);
}
} // namespace

HttpBackendOptions http_options_from_env()
{
    HttpBackendOptions o;
    o.endpoint = env_or("INSTRUCTGEN_ENDPOINT", "");
    o.api_key = env_or("INSTRUCTGEN_API_KEY", "");
    o.model = env_or("INSTRUCTGEN_MODEL", o.model);
    if (o.endpoint.empty()) throw ValidationError("INSTRUCTGEN_ENDPOINT is not set");
    return o;
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options))
{
    const auto& url = options_.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("endpoint must be an http(s) URL: " + url);
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ValidationError("unsupported scheme in " + url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https") throw ValidationError("built without TLS support; cannot reach " + url);
#endif
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
}

std::vector<std::string> HttpBackend::post_once(const GenerationRequest& request, std::uint64_t n)
{
    nlohmann::json body;
    body["model"] = options_.model;
    body["messages"] = nlohmann::json::array({
        {{"role", "system"}, {"content", options_.system_prompt}},
        {{"role", "user"}, {"content", request.prompt}},
    });
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    body["n"] = n;

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(std::chrono::seconds{10});
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    auto res = client.Post(path_, headers, body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace),
                           "application/json");
    if (!res) {
        throw TransportError("POST " + options_.endpoint + " failed: " + httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 408 || status == 429 || status >= 500) {
        throw TransportError("HTTP " + std::to_string(status) + " from " + options_.endpoint);
    }
    if (status != 200) {
        throw BackendError("HTTP " + std::to_string(status) + " from " + options_.endpoint + ": " +
                           res->body.substr(0, 500));
    }
    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("malformed JSON reply: ") + e.what());
    }
    if (reply.contains("error")) throw BackendError("endpoint error: " + reply["error"].dump());
    std::vector<std::string> out;
    try {
        for (const auto& choice : reply.at("choices")) {
            const auto& content = choice.at("message").at("content");
            out.push_back(content.is_null() ? std::string{} : content.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unexpected reply shape: ") + e.what());
    }
    return out;
}

std::vector<std::string> HttpBackend::complete(const GenerationRequest& request)
{
    std::vector<std::string> samples;
    while (samples.size() < request.n_samples) {
        auto batch = post_once(request, request.n_samples - samples.size());
        if (batch.empty()) throw BackendError("endpoint returned no choices");
        for (auto& s : batch) {
            if (samples.size() == request.n_samples) break;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

} // namespace instructgen
