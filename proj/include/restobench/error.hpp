#pragma once

#include <stdexcept>
#include <string>

namespace restobench {

// Error taxonomy shared by the library and the CLI exit-code mapping.
enum class ErrorKind {
    InvalidArgument,
    Format,
    Io,
    Coverage,
    DanglingReference,
    EmptyInput,
    ExternalMetric,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:   return "invalid-argument";
        case ErrorKind::Format:            return "format";
        case ErrorKind::Io:                return "io";
        case ErrorKind::Coverage:          return "coverage";
        case ErrorKind::DanglingReference: return "dangling-reference";
        case ErrorKind::EmptyInput:        return "empty-input";
        case ErrorKind::ExternalMetric:    return "external-metric";
    }
    return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace restobench
