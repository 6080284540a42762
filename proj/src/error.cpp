#include "femwarp/error.hpp"

namespace femwarp {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::reversed_element: return "REVERSED_ELEMENT";
    case ErrorCode::degenerate_element: return "DEGENERATE_ELEMENT";
    case ErrorCode::bad_index: return "BAD_INDEX";
    case ErrorCode::no_interior: return "NO_INTERIOR";
    case ErrorCode::singular_system: return "SINGULAR_SYSTEM";
    case ErrorCode::no_neighbors: return "NO_NEIGHBORS";
    case ErrorCode::node_not_interior_to_neighbors: return "NODE_NOT_INTERIOR_TO_NEIGHBORS";
    case ErrorCode::not_positive_definite: return "NOT_POSITIVE_DEFINITE";
    case ErrorCode::dimension_mismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::diverged: return "DIVERGED";
    case ErrorCode::unbounded: return "UNBOUNDED";
    case ErrorCode::invalid_spec: return "INVALID_SPEC";
    case ErrorCode::domain_error: return "DOMAIN_ERROR";
    case ErrorCode::invalid_bound: return "INVALID_BOUND";
    case ErrorCode::parse_error: return "PARSE_ERROR";
    case ErrorCode::io_error: return "IO_ERROR";
    case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    }
    return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

}  // namespace femwarp
