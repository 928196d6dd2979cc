#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mamv {

/// Failure categories surfaced by the library. The CLI maps these onto exit
/// codes (validation vs. numerical failure).
enum class Errc {
    InvalidMatrix,
    NotStrictlyConvex,
    InfeasibleBound,
    InvalidDomain,
    PointOutsideDomain,
    NonFiniteIntegrand,
    EllipsoidEscapesDomain,
    StencilOutOfDomain,
    NotATouchingParaboloid,
    NotConverged,
    InvalidRhs,
    InvalidArgument,
    InvalidConfig,
};

std::string_view to_string(Errc code);

/// True for errors caused by the numerics rather than by bad input.
bool is_numerical_failure(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace mamv
