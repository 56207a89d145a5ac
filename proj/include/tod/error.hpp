#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tod {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dataset header does not match the expected columns.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A dataset cell or configuration value outside its domain.
class ValueError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class RenderError : public Error {
public:
    RenderError(const std::string& message, std::string placeholder)
        : Error(message), placeholder_(std::move(placeholder)) {}
    const std::string& placeholder() const noexcept { return placeholder_; }

private:
    std::string placeholder_;
};

// Provider unreachable or failing after the retry budget.
class TransportError : public Error {
public:
    explicit TransportError(const std::string& message, bool retryable = true)
        : Error(message), retryable_(retryable) {}
    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

// Provider refused to produce content.
class ContentError : public Error {
public:
    using Error::Error;
};

// A reply that does not satisfy its schema. Raised by schema parsers and
// consumed by the repair loop.
class ValidationError : public Error {
public:
    using Error::Error;
};

class StructuredOutputError : public Error {
public:
    StructuredOutputError(const std::string& message, std::vector<std::string> attempts)
        : Error(message), attempts_(std::move(attempts)) {}
    const std::vector<std::string>& attempts() const noexcept { return attempts_; }

private:
    std::vector<std::string> attempts_;
};

// Illegal debate-tree lifecycle operation.
class StateError : public Error {
public:
    using Error::Error;
};

// Tree document violates its schema; path is a JSON pointer into the document.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::string path)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class UnsupportedVersionError : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace tod
