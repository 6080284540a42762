#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace femwarp {

enum class ErrorCode {
    reversed_element,
    degenerate_element,
    bad_index,
    no_interior,
    singular_system,
    no_neighbors,
    node_not_interior_to_neighbors,
    not_positive_definite,
    dimension_mismatch,
    diverged,
    unbounded,
    invalid_spec,
    domain_error,
    invalid_bound,
    parse_error,
    io_error,
    invalid_argument,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. `what()` is prefixed with
/// the upper-case code name, e.g. "SINGULAR_SYSTEM: ...".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace femwarp
