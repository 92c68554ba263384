#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace commsense {

// Base of every error the engine raises. The service layer maps the
// subclasses onto HTTP status classes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input supplied by a caller (bad span, empty text, bad config).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Lookup of an id that does not exist (comment, topic, session, reminder).
class NotFound : public Error {
public:
    using Error::Error;
};

// Operation not allowed in the current state (e.g. resolving a reminder twice).
class StateError : public Error {
public:
    using Error::Error;
};

class CorpusError : public Error {
public:
    CorpusError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A model provider (embedding, sentiment, generator) failed or timed out.
class ProviderError : public Error {
public:
    using Error::Error;
};

// A generator answered, but the answer does not satisfy the expected schema.
class SchemaViolation : public Error {
public:
    SchemaViolation(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}

    const std::string& raw_response() const noexcept { return raw_; }

private:
    std::string raw_;
};

} // namespace commsense
