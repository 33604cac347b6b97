#pragma once

#include <stdexcept>
#include <string>

namespace hochster {

enum class ErrorKind {
    unsupported_ring,
    invalid_complex,
    domain,
    capacity,
    parse,
    vertex_range,
    shape_mismatch,
    missing_restriction,
    non_commuting,
    invalid_argument,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::unsupported_ring: return "unsupported-ring";
    case ErrorKind::invalid_complex: return "invalid-complex";
    case ErrorKind::domain: return "domain";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::parse: return "parse";
    case ErrorKind::vertex_range: return "vertex-range";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::missing_restriction: return "missing-restriction";
    case ErrorKind::non_commuting: return "non-commuting";
    case ErrorKind::invalid_argument: return "invalid-argument";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to a diagnostic and exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

} // namespace hochster
