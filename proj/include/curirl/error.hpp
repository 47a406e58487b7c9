#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curirl {

enum class ErrorKind {
    invalid_argument,
    degenerate_input,
    unsupported_dimension,
    schema,
    parse,
    empty_input,
    io,
    missing_score,
    length_mismatch,
    consistency,
    contract,
    numeric,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

} // namespace curirl
