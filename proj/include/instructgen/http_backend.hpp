// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/gateway.hpp"

#include <chrono>
#include <string>

namespace instructgen {

struct HttpBackendOptions {
    /// Full URL of the chat-completion route, e.g.
    /// "http://localhost:8000/v1/chat/completions".
    std::string endpoint;
    std::string api_key;
    std::string model = "default";
    std::string system_prompt = "You are a helpful assistant.";
    std::chrono::seconds timeout{300};
};

/// Endpoint, token and model from INSTRUCTGEN_ENDPOINT, INSTRUCTGEN_API_KEY
/// and INSTRUCTGEN_MODEL. Throws ValidationError when no endpoint is set.
HttpBackendOptions http_options_from_env();

/// Chat-completion style JSON POST:
///
///   {"model", "messages": [{"role": "system", ...}, {"role": "user", ...}],
///    "temperature", "max_tokens", "n"}
///
/// Servers that ignore `n` are topped up with follow-up requests until
/// n_samples choices have been collected. Connection failures, 408, 429 and
/// 5xx map to TransportError; any other failure maps to BackendError.
class HttpBackend : public Backend {
  public:
    explicit HttpBackend(HttpBackendOptions options);

    std::vector<std::string> complete(const GenerationRequest& request) override;
    std::string id() const override { return "http:" + options_.model; }

  private:
    std::vector<std::string> post_once(const GenerationRequest& request, std::uint64_t n);

    HttpBackendOptions options_;
    std::string scheme_host_port_;
    std::string path_;
};

} // namespace instructgen
