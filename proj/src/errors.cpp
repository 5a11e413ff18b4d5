// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/errors.hpp"

namespace instructgen {

std::string error_kind(const std::exception& e)
{
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    if (dynamic_cast<const EncodingError*>(&e)) return "EncodingError";
    if (dynamic_cast<const TransportError*>(&e)) return "TransportError";
    if (dynamic_cast<const BackendError*>(&e)) return "BackendError";
    if (dynamic_cast<const ScriptExhausted*>(&e)) return "ScriptExhausted";
    if (dynamic_cast<const SeedShortfall*>(&e)) return "SeedShortfall";
    if (dynamic_cast<const EmptyCorpus*>(&e)) return "EmptyCorpus";
    if (dynamic_cast<const UnknownDocument*>(&e)) return "UnknownDocument";
    if (dynamic_cast<const StageOrderError*>(&e)) return "StageOrderError";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "std::exception";
}

} // namespace instructgen
