#pragma once

#include <stdexcept>
#include <string>

namespace bnelicit {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (BIF, JSON, ...). Carries a 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Structurally well-formed input that violates a domain rule (self-loop,
/// duplicate node, unknown endpoint, ...). The message names the offender.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Two structures that should share a node set do not.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// An alias map entry points at a name that is not a true node, or the map
/// is not injective.
class MappingError : public Error {
public:
    using Error::Error;
};

/// Bad experiment configuration (even expert count, empty sweep, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Transport or HTTP failure talking to a chat backend.
class BackendError : public Error {
public:
    explicit BackendError(const std::string& what, bool retriable = true)
        : Error(what), retriable_(retriable) {}
    bool retriable() const { return retriable_; }

private:
    bool retriable_;
};

/// Replay transcript does not match the request the pipeline produced.
class ReplayDivergence : public Error {
public:
    using Error::Error;
};

/// Replay transcript ran out of entries.
class ReplayExhausted : public Error {
public:
    using Error::Error;
};

/// No JSON candidate region in a model reply.
class NoJsonError : public Error {
public:
    using Error::Error;
};

/// A JSON candidate region was found but could not be parsed. Carries the
/// candidate text for diagnostics.
class MalformedJsonError : public Error {
public:
    MalformedJsonError(const std::string& what, std::string candidate)
        : Error(what), candidate_(std::move(candidate)) {}
    const std::string& candidate() const { return candidate_; }

private:
    std::string candidate_;
};

/// Facilitator did not return the expected expert-profile JSON.
class ProfileParseError : public Error {
public:
    using Error::Error;
};

/// The Understand step produced an empty reply.
class UnderstandFailure : public Error {
public:
    using Error::Error;
};

} // namespace bnelicit
