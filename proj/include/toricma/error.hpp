#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace toricma {

enum class ErrorKind {
    CollinearVertices,
    NonConvex,
    WrongOrientation,
    TooFewVertices,
    PointOutsidePolygon,
    BoundaryPoint,
    ChartMismatch,
    MeshTooCoarse,
    IncompatibleH,
    QuadratureFailure,
    NewtonStalled,
    IndefiniteHessianUnrecoverable,
    NonPositiveH,
    WindowExceedsDomain,
    RootNotBracketed,
    NonMonotoneSlice,
    RadiusCollapse,
    CompatibilityLost,
    ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Library error carrying a kind and, where meaningful, the offending index.
class Error : public std::runtime_error {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    Error(ErrorKind kind, const std::string& what, std::size_t index = npos);

    ErrorKind kind() const noexcept { return kind_; }
    std::size_t index() const noexcept { return index_; }
    bool has_index() const noexcept { return index_ != npos; }

private:
    ErrorKind kind_;
    std::size_t index_;
};

}  // namespace toricma
