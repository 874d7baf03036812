#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "toricma/boundary_data.hpp"
#include "toricma/field.hpp"
#include "toricma/mesh.hpp"
#include "toricma/rhs.hpp"

namespace toricma {

struct SolverParams {
    /// Sup-norm tolerance on the regularised residual.
    double tol = 1e-10;
    int max_iter = 60;
    /// Smallest admissible line-search factor.
    double damping_floor = 0x1p-20;
    /// Homotopy steps from the product form of the initial guess to H, used only when plain Newton stalls.
    int continuation_steps = 0;
    /// Vertex compatibility tolerance for the boundary data.
    double compat_tol = 1e-8;
};

/// F = (prod l) det(D^2 u0 + D_h^2 v) - H at interior nodes, with the smallest eigenvalue of each node Hessian.
struct ResidualField {
    std::vector<double> residual;
    std::vector<double> min_eig;
    double sup = 0.0;
    std::size_t argmax = 0;
    double min_eigenvalue = 0.0;
    std::size_t argmin = 0;
    bool spd = false;
};

ResidualField discrete_operator(const Mesh& mesh, std::span<const double> h_nodes, std::span<const double> v_slots);
ResidualField discrete_operator(const Mesh& mesh, const RhsField& rhs, std::span<const double> v_slots);

/// v-trace at every boundary slot of the mesh.
std::vector<double> boundary_slot_values(const Mesh& mesh, const BoundaryData& data);

/// u = u0 + v with v on the mesh: bicubic Hermite values and gradients from nodal data, bilinear
/// nodal Hessians, Taylor expansion from the nearest node in cells cut by the boundary, and exact
/// traces on the boundary.
class Solution final : public ConvexField {
public:
    Solution(std::shared_ptr<const Mesh> mesh, BoundaryData boundary, RhsField rhs, std::vector<double> slots);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    const Polygon& polygon() const { return mesh_->polygon(); }
    const BoundaryData& boundary() const { return boundary_; }
    const RhsField& rhs() const { return rhs_; }
    /// v at every slot (interior nodes first).
    const std::vector<double>& slot_values() const { return slots_; }

    bool converged = false;
    double residual_norm = 0.0;
    double min_eigenvalue = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;

    FieldSample evaluate(Point x, int order) const override;
    bool in_domain(Point x, double slack = 0.0) const override { return polygon().contains(x, slack); }
    /// v = u - u0 and its derivatives (interior points; order 0 also on the boundary).
    FieldSample evaluate_v(Point x, int order) const;

    /// Nodal derivative data on the full grid (flag zero where unavailable).
    bool has_node_data(std::size_t i, std::size_t j) const { return has_[mesh_->grid_index(i, j)] != 0; }
    double node_v(std::size_t i, std::size_t j) const { return nv_[mesh_->grid_index(i, j)]; }
    Vec2 node_grad(std::size_t i, std::size_t j) const { return ng_[mesh_->grid_index(i, j)]; }
    Sym2 node_hess(std::size_t i, std::size_t j) const { return nh_[mesh_->grid_index(i, j)]; }
    /// D^2 u0 + D_h^2 v at interior node k.
    Sym2 discrete_hessian(std::size_t k) const;

private:
    void build_node_data();
    FieldSample taylor_from(std::size_t g, Point x, int order) const;

    std::shared_ptr<const Mesh> mesh_;
    BoundaryData boundary_;
    RhsField rhs_;
    std::vector<double> slots_;
    std::vector<std::uint8_t> has_;
    std::vector<double> nv_;
    std::vector<Vec2> ng_;
    std::vector<Sym2> nh_;
};

Solution solve(const Polygon& polygon, const RhsField& rhs, std::span<const double> vertex_values,
               const MeshParams& mesh_params, const SolverParams& params = {});

Solution solve_on_mesh(std::shared_ptr<const Mesh> mesh, BoundaryData boundary, const RhsField& rhs,
                       const SolverParams& params = {});

}  // namespace toricma
