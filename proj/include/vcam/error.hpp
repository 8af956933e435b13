#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vcam {

/// Failure classes. Each maps to a stable machine-readable name used by the
/// CLI error line and the HTTP error body.
enum class ErrorKind {
    invalid_argument,
    degenerate_geometry,
    invalid_config,
    plan_invalid,
    backend_failure,
    parse_error,
    io_error,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace vcam
