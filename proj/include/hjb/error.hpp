#pragma once

#include <stdexcept>
#include <string>

namespace hjb {

enum class ErrorCode {
    invalid_order,
    invalid_domain,
    out_of_domain,
    invalid_argument,
    step_too_large,
    not_positive_semidefinite,
    normalization_violated,
    stencil_condition,
    x_dependent_diffusion,
    parse_error,
};

/// Single exception type for the library; the code tells callers which
/// precondition failed.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hjb
