#pragma once

#include <stdexcept>
#include <string>

namespace bellbound {

// Process-level error contract, shared between library exceptions and CLI
// exit codes: 0 success, 1 mismatch, 2 invalid input, 3 undefined
// normalization, 4 capacity.
enum class ErrorCode : int {
    mismatch = 1,
    invalid_input = 2,
    undefined_normalization = 3,
    capacity = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class InvalidInputError : public Error {
public:
    explicit InvalidInputError(const std::string& message)
        : Error(ErrorCode::invalid_input, message) {}
};

class UndefinedNormalizationError : public Error {
public:
    explicit UndefinedNormalizationError(const std::string& message)
        : Error(ErrorCode::undefined_normalization, message) {}
};

class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& message)
        : Error(ErrorCode::capacity, message) {}
};

}  // namespace bellbound
