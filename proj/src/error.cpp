#include "toricma/error.hpp"

namespace toricma {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::CollinearVertices: return "CollinearVertices";
        case ErrorKind::NonConvex: return "NonConvex";
        case ErrorKind::WrongOrientation: return "WrongOrientation";
        case ErrorKind::TooFewVertices: return "TooFewVertices";
        case ErrorKind::PointOutsidePolygon: return "PointOutsidePolygon";
        case ErrorKind::BoundaryPoint: return "BoundaryPoint";
        case ErrorKind::ChartMismatch: return "ChartMismatch";
        case ErrorKind::MeshTooCoarse: return "MeshTooCoarse";
        case ErrorKind::IncompatibleH: return "IncompatibleH";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::NewtonStalled: return "NewtonStalled";
        case ErrorKind::IndefiniteHessianUnrecoverable: return "IndefiniteHessianUnrecoverable";
        case ErrorKind::NonPositiveH: return "NonPositiveH";
        case ErrorKind::WindowExceedsDomain: return "WindowExceedsDomain";
        case ErrorKind::RootNotBracketed: return "RootNotBracketed";
        case ErrorKind::NonMonotoneSlice: return "NonMonotoneSlice";
        case ErrorKind::RadiusCollapse: return "RadiusCollapse";
        case ErrorKind::CompatibilityLost: return "CompatibilityLost";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

namespace {
std::string decorate(ErrorKind kind, const std::string& what, std::size_t index) {
    std::string out(to_string(kind));
    if (index != Error::npos) out += "[" + std::to_string(index) + "]";
    out += ": ";
    out += what;
    return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& what, std::size_t index)
    : std::runtime_error(decorate(kind, what, index)), kind_(kind), index_(index) {}

}  // namespace toricma
