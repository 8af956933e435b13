#include "vcam/error.hpp"

namespace vcam {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::degenerate_geometry: return "degenerate_geometry";
        case ErrorKind::invalid_config: return "invalid_config";
        case ErrorKind::plan_invalid: return "plan_invalid";
        case ErrorKind::backend_failure: return "backend_failure";
        case ErrorKind::parse_error: return "parse_error";
        case ErrorKind::io_error: return "io_error";
    }
    return "unknown";
}

}  // namespace vcam
