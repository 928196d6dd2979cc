#include "mamv/error.hpp"

namespace mamv {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::InvalidMatrix: return "InvalidMatrix";
        case Errc::NotStrictlyConvex: return "NotStrictlyConvex";
        case Errc::InfeasibleBound: return "InfeasibleBound";
        case Errc::InvalidDomain: return "InvalidDomain";
        case Errc::PointOutsideDomain: return "PointOutsideDomain";
        case Errc::NonFiniteIntegrand: return "NonFiniteIntegrand";
        case Errc::EllipsoidEscapesDomain: return "EllipsoidEscapesDomain";
        case Errc::StencilOutOfDomain: return "StencilOutOfDomain";
        case Errc::NotATouchingParaboloid: return "NotATouchingParaboloid";
        case Errc::NotConverged: return "NotConverged";
        case Errc::InvalidRhs: return "InvalidRhs";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

bool is_numerical_failure(Errc code) {
    switch (code) {
        case Errc::NonFiniteIntegrand:
        case Errc::NotConverged:
            return true;
        default:
            return false;
    }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace mamv
