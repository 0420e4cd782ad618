#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace rageval {

/// Root of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A transcript or input text did not follow the expected layout.
class ParseError : public Error {
public:
    enum class Kind {
        Malformed,       // general layout violation
        MissingSection,  // required marker / section header absent
        Count,           // item count differs from the expected count
        Token,           // a verdict token other than yes/no
        MissingTag,      // classification item without a bracket tag
        UnknownTag,      // bracket tag other than the two recall tags
        Empty,           // section present but without content
    };

    ParseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class CountMismatchError : public ParseError {
public:
    CountMismatchError(std::size_t expected, std::size_t actual, const std::string& what)
        : ParseError(Kind::Count, what), expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

/// Malformed qrels line; carries the 1-based line number and the raw line.
class QrelsError : public Error {
public:
    QrelsError(std::size_t line_number, std::string raw_line, const std::string& what)
        : Error(what), line_number_(line_number), raw_line_(std::move(raw_line)) {}

    std::size_t line_number() const noexcept { return line_number_; }
    const std::string& raw_line() const noexcept { return raw_line_; }

private:
    std::size_t line_number_;
    std::string raw_line_;
};

/// Violation of a RecordSet invariant (duplicate ids, empty label).
class RecordSetError : public Error {
public:
    using Error::Error;
};

/// Failure talking to a model backend. status() is the HTTP status, 0 for
/// transport-level failures and in-process stubs.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& what, int status = 0, std::string body = {})
        : Error(what), status_(status), body_(std::move(body)) {}

    int status() const noexcept { return status_; }
    const std::string& body() const noexcept { return body_; }

private:
    int status_;
    std::string body_;
};

/// 401/403 from a backend. Aborts whole runs rather than single records.
class AuthError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// Retries exhausted.
class TimeoutError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// Backend answered, but the body did not have the configured shape.
class ResponseFormatError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class MetricError : public Error {
public:
    using Error::Error;
};

/// Nothing in a record set could be evaluated.
class SetError : public Error {
public:
    explicit SetError(const std::string& what, bool provider_failure = false)
        : Error(what), provider_failure_(provider_failure) {}

    /// True when the failures were caused by backend calls rather than parsing.
    bool provider_failure() const noexcept { return provider_failure_; }

private:
    bool provider_failure_;
};

/// Invalid statistics parameters or input (B = 1, empty or non-finite data...).
class StatsError : public Error {
public:
    using Error::Error;
};

class AggregationError : public Error {
public:
    using Error::Error;
};

/// An input lacks a field a later stage depends on (e.g. a metric score).
class MissingFieldError : public AggregationError {
public:
    using AggregationError::AggregationError;
};

/// An input file held no usable rows.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

class SynthesisError : public Error {
public:
    SynthesisError(std::size_t completed, const std::string& what)
        : Error(what), completed_(completed) {}

    std::size_t completed() const noexcept { return completed_; }

private:
    std::size_t completed_;
};

}  // namespace rageval
