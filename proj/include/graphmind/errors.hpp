#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace graphmind {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCategory : int {
    config = 2,
    input_data = 3,
    transport = 4,
    parse = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string message)
        : Error(ErrorCategory::config, std::move(message)) {}
};

class InputDataError : public Error {
public:
    explicit InputDataError(std::string message)
        : Error(ErrorCategory::input_data, std::move(message)) {}
};

class TransportError : public Error {
public:
    explicit TransportError(std::string message)
        : Error(ErrorCategory::transport, std::move(message)) {}
};

// HTTP 429 or equivalent; retried, then surfaced distinctly.
class RateLimitError : public TransportError {
public:
    explicit RateLimitError(std::string message)
        : TransportError(std::move(message)) {}
};

// Replay client was asked for a request it has no recording of.
class MissingRecordingError : public TransportError {
public:
    explicit MissingRecordingError(std::string digest)
        : TransportError("no recording for request digest " + digest),
          digest_(std::move(digest)) {}

    const std::string& digest() const { return digest_; }

private:
    std::string digest_;
};

// Model output could not be parsed; carries the raw reply for diagnosis.
class ParseError : public Error {
public:
    explicit ParseError(std::string message, std::string raw = {})
        : Error(ErrorCategory::parse, std::move(message)), raw_(std::move(raw)) {}

    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

// Precondition breach by the caller; a bug, not a runtime condition.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(std::string message)
        : std::logic_error(std::move(message)) {}
};

} // namespace graphmind
