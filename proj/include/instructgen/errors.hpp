// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace instructgen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

class ValidationError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class EncodingError : public Error {
  public:
    using Error::Error;
};

/// Network or HTTP-level failure. The only error class the gateway retries.
class TransportError : public Error {
  public:
    using Error::Error;
};

/// The endpoint answered but reported an error (4xx, malformed body, ...).
class BackendError : public Error {
  public:
    using Error::Error;
};

/// The mock backend has no scripted response left for a request.
class ScriptExhausted : public Error {
  public:
    using Error::Error;
};

class SeedShortfall : public Error {
  public:
    using Error::Error;
};

class EmptyCorpus : public Error {
  public:
    using Error::Error;
};

class UnknownDocument : public Error {
  public:
    using Error::Error;
};

class StageOrderError : public Error {
  public:
    using Error::Error;
};

/// Short machine-readable name of the most derived error class, e.g. "TransportError".
std::string error_kind(const std::exception& e);

} // namespace instructgen
