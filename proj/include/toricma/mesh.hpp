#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "toricma/polygon.hpp"
#include "toricma/types.hpp"

namespace toricma {

struct MeshParams {
    /// 2^level + 1 nodes per axis of the bounding box.
    int level = 7;
    /// Blend between a uniform axis (0) and the smoothstep map (1) clustering nodes at both ends.
    double grading = 1.0;
    /// Interior nodes closer to the boundary than this fraction of their local spacing are dropped.
    double drop_fraction = 0.25;
};

enum class NodeKind : std::uint8_t { Outside, Interior, Boundary };

/// Weights of one stencil point for v11, v12, v22, v1, v2.
struct StencilEntry {
    std::uint32_t slot;
    double w11;
    double w12;
    double w22;
    double w1;
    double w2;
};

/// Boundary slot: a grid node on the boundary or a crossing of a stencil ray with the boundary.
struct BoundarySlot {
    Point position;
    std::size_t edge;
    double t;
};

/// Tensor grid over the bounding box, graded toward its sides and clipped to the polygon.
/// Slots 0..unknowns()-1 are interior nodes; the remaining slots carry Dirichlet data.
class Mesh {
public:
    static Mesh build(const Polygon& polygon, const MeshParams& params);

    const Polygon& polygon() const { return polygon_; }
    const MeshParams& params() const { return params_; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    std::size_t nx() const { return xs_.size(); }
    std::size_t ny() const { return ys_.size(); }
    std::size_t grid_index(std::size_t i, std::size_t j) const { return j * xs_.size() + i; }
    Point grid_point(std::size_t i, std::size_t j) const { return {xs_[i], ys_[j]}; }

    NodeKind kind(std::size_t i, std::size_t j) const { return kind_[grid_index(i, j)]; }
    /// Slot of a grid node, or -1 for outside and dropped nodes.
    std::int64_t slot_of(std::size_t i, std::size_t j) const { return slot_[grid_index(i, j)]; }

    std::size_t unknowns() const { return interior_ij_.size(); }
    std::size_t slots() const { return interior_ij_.size() + boundary_.size(); }
    Point slot_point(std::size_t s) const;

    /// Grid coordinates of interior node k.
    std::pair<std::size_t, std::size_t> interior_ij(std::size_t k) const { return interior_ij_[k]; }
    Point interior_point(std::size_t k) const { return position_[k]; }
    const std::vector<Point>& interior_points() const { return position_; }
    const std::vector<BoundarySlot>& boundary_slots() const { return boundary_; }
    const BoundarySlot& boundary_slot(std::size_t s) const { return boundary_[s - unknowns()]; }

    /// Stencil of interior node k; the centre is one of the entries.
    const StencilEntry* stencil_begin(std::size_t k) const { return stencil_.data() + offsets_[k]; }
    const StencilEntry* stencil_end(std::size_t k) const { return stencil_.data() + offsets_[k + 1]; }
    bool tensor_stencil(std::size_t k) const { return tensor_[k] != 0; }
    std::size_t fitted_stencils() const;

    /// prod_i l_i and D^2 u0 at interior nodes (structure of arrays).
    const std::vector<double>& prod_l() const { return prod_l_; }
    const std::vector<double>& d2u0_11() const { return a11_; }
    const std::vector<double>& d2u0_12() const { return a12_; }
    const std::vector<double>& d2u0_22() const { return a22_; }

    /// Largest ratio of adjacent cell widths along either axis.
    double grading_ratio() const;
    /// Cell index containing x along each axis (clamped to the grid).
    std::pair<std::size_t, std::size_t> locate_cell(Point x) const;

private:
    Polygon polygon_ = Polygon::from_vertices({{0, 0}, {1, 0}, {0, 1}});
    MeshParams params_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<NodeKind> kind_;
    std::vector<std::int64_t> slot_;
    std::vector<std::pair<std::size_t, std::size_t>> interior_ij_;
    std::vector<Point> position_;
    std::vector<BoundarySlot> boundary_;
    std::vector<StencilEntry> stencil_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint8_t> tensor_;
    std::vector<double> prod_l_;
    std::vector<double> a11_;
    std::vector<double> a12_;
    std::vector<double> a22_;
};

/// Graded coordinates lo..hi: x(xi) = lo + (hi - lo)((1 - g) xi + g xi^2 (3 - 2 xi)).
std::vector<double> graded_axis(double lo, double hi, std::size_t cells, double grading);

}  // namespace toricma
