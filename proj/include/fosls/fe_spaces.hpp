#pragma once

#include "fosls/geometry.hpp"
#include "fosls/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fosls {

constexpr int kMaxScalarDegree = 5;
constexpr int kMaxVectorDegree = 5;

enum class ScalarBC { none, zero_trace };
enum class VectorFamily { RT, BDM };
enum class VectorBC { none, zero_normal_trace };

std::string to_string(VectorFamily family);
VectorFamily parse_family(const std::string& name);

/// Lagrange space S_p (or S_p^0 with zero trace).
struct ScalarSpaceSpec {
    int degree = 1;
    ScalarBC bc = ScalarBC::none;
};

/// RT family: reference space RT_{p-1}; BDM family: BDM_p.
struct VectorSpaceSpec {
    VectorFamily family = VectorFamily::RT;
    int degree = 1;
    VectorBC bc = VectorBC::none;
};

/// Values and reference gradients; rows are points, columns are local shape functions.
struct ScalarBasisEval {
    Eigen::MatrixXd values;
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
};

/// Vector values and divergences; rows are points, columns are local shape functions.
struct VectorBasisEval {
    Eigen::MatrixXd vx;
    Eigen::MatrixXd vy;
    Eigen::MatrixXd div;
};

/// Nodal Lagrange element on equispaced nodes.
///
/// Local ordering: the three vertices, then p - 1 nodes per local edge (running
/// from the lower to the higher local vertex), then interior nodes.
class LagrangeElement {
public:
    explicit LagrangeElement(int degree);

    int degree() const { return degree_; }
    int num_dofs() const { return static_cast<int>(nodes_.size()); }
    int dofs_per_edge() const { return degree_ - 1; }
    int num_interior_dofs() const { return (degree_ - 1) * (degree_ - 2) / 2; }
    const std::vector<Point2>& nodes() const { return nodes_; }

    ScalarBasisEval eval(std::span<const Point2> points) const;

private:
    int degree_;
    std::vector<Point2> nodes_;
    Eigen::MatrixXd coeffs_;  // Dubiner -> nodal
};

/// H(div) reference element defined by its degrees of freedom:
///   - per local edge (a -> b), moments of phi . rot_cw(b - a) against L_k(2t - 1),
///     k = 0..edge_degree();
///   - interior moments against P_{k-1}^2 (RT_k) or the first-kind Nedelec space
///     P_{p-2}^2 + x^perp P~_{p-2} (BDM_p).
class HdivElement {
public:
    HdivElement(VectorFamily family, int degree);

    VectorFamily family() const { return family_; }
    int degree() const { return degree_; }
    /// Polynomial degree of the normal trace on an edge.
    int edge_degree() const { return family_ == VectorFamily::RT ? degree_ - 1 : degree_; }
    int dofs_per_edge() const { return edge_degree() + 1; }
    int num_interior_dofs() const { return num_dofs_ - 3 * dofs_per_edge(); }
    int num_dofs() const { return num_dofs_; }
    /// The reference divergence lies in P_{divergence_degree()}.
    int divergence_degree() const { return degree_ - 1; }

    VectorBasisEval eval(std::span<const Point2> points) const;

    /// Applies the DOF functionals to reference fields. `field` returns, for a
    /// batch of reference points, x and y components (points x fields).
    using FieldBatch = std::function<void(std::span<const Point2>, Eigen::MatrixXd&, Eigen::MatrixXd&)>;
    Eigen::MatrixXd apply_dofs(const FieldBatch& field, int num_fields) const;

    /// Condition number of the DOF-functional (generalized Vandermonde) matrix.
    double vandermonde_condition() const { return condition_; }

private:
    VectorBasisEval eval_prime(std::span<const Point2> points) const;

    VectorFamily family_;
    int degree_;
    int num_dofs_;
    Eigen::MatrixXd coeffs_;  // prime -> nodal
    double condition_ = 0.0;
};

ScalarBasisEval eval_scalar_basis(const ScalarSpaceSpec& spec, std::span<const Point2> points);
VectorBasisEval eval_vector_basis(const VectorSpaceSpec& spec, std::span<const Point2> points);

struct PiolaValue {
    Point2 value;
    double div = 0.0;
};

/// Contravariant Piola: phi(F(x)) = J phi_hat(x) / det J, div phi = div_hat phi_hat / det J.
/// Throws std::domain_error for a singular or inverted Jacobian.
PiolaValue piola_push_forward(const ElementMap& map, const Point2& ref, const Point2& ref_value, double ref_div);

struct DofMap {
    int num_dofs = 0;
    std::vector<std::vector<int>> cell_dofs;
    std::vector<std::vector<double>> cell_signs;
    std::vector<char> constrained;
    std::vector<int> free_index;  // -1 for constrained DOFs
    int num_free = 0;
};

DofMap build_dof_map(const Mesh& mesh, const ScalarSpaceSpec& spec);
DofMap build_dof_map(const Mesh& mesh, const VectorSpaceSpec& spec);

/// Map data at a batch of reference points of one cell.
struct CellGeometry {
    std::vector<Point2> points;  // physical
    std::vector<Mat2> jacobians;
    std::vector<double> dets;
};
CellGeometry cell_geometry(const ElementMap& map, std::span<const Point2> ref_points);

/// Physical values/gradients of scalar shape functions.
ScalarBasisEval push_scalar(const ScalarBasisEval& ref, const CellGeometry& geo);
/// Piola-mapped vector shape functions with the cell's orientation signs applied.
VectorBasisEval push_vector(const VectorBasisEval& ref, const CellGeometry& geo, std::span<const double> signs);

class ScalarSpace {
public:
    ScalarSpace(std::shared_ptr<const Mesh> mesh, ScalarSpaceSpec spec);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    const ScalarSpaceSpec& spec() const { return spec_; }
    const LagrangeElement& element() const { return element_; }
    const DofMap& dofs() const { return dofs_; }
    int num_dofs() const { return dofs_.num_dofs; }

    /// Nodal interpolant; constrained DOFs are set to zero.
    Eigen::VectorXd interpolate(const std::function<double(const Point2&)>& u) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    ScalarSpaceSpec spec_;
    LagrangeElement element_;
    DofMap dofs_;
};

class VectorSpace {
public:
    VectorSpace(std::shared_ptr<const Mesh> mesh, VectorSpaceSpec spec);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    const VectorSpaceSpec& spec() const { return spec_; }
    const HdivElement& element() const { return element_; }
    const DofMap& dofs() const { return dofs_; }
    int num_dofs() const { return dofs_.num_dofs; }

    /// Canonical (DOF-based) interpolant through the Piola pullback; constrained
    /// DOFs are set to zero.
    Eigen::VectorXd interpolate(const std::function<Point2(const Point2&)>& phi) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    VectorSpaceSpec spec_;
    HdivElement element_;
    DofMap dofs_;
};

/// Restriction of a full coefficient vector to free DOFs and the inverse prolongation.
Eigen::VectorXd restrict_to_free(const DofMap& dofs, const Eigen::VectorXd& full);
Eigen::VectorXd prolong_from_free(const DofMap& dofs, const Eigen::VectorXd& free);

}  // namespace fosls
