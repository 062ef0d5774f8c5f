#pragma once

#include "fosls/fe_spaces.hpp"
#include "fosls/manufactured.hpp"
#include "fosls/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fosls {

using ScalarField = std::function<double(const Point2&)>;
using VectorField = std::function<Point2(const Point2&)>;

struct ProblemConfig {
    double gamma = 1.0;
    BoundaryCondition bc = BoundaryCondition::neumann;
    int ps = 1;
    VectorFamily family = VectorFamily::RT;
    int pv = 1;
    /// 0 selects the defaults assembly_degree(ps, pv) / error_degree(ps, pv).
    int assembly_quadrature = 0;
    int error_quadrature = 0;

    /// Throws std::invalid_argument for gamma <= 0, unsupported degrees or quadrature degrees.
    void validate() const;

    /// Dirichlet mode constrains u, Neumann mode constrains phi . n.
    ScalarSpaceSpec scalar_spec() const;
    VectorSpaceSpec vector_spec() const;
    int assembly_degree() const;
    int error_degree() const;
};

/// Vector and scalar spaces of one discretization. The coupled unknown is
/// ordered as [free phi DOFs, free u DOFs].
class FoslsSpaces {
public:
    FoslsSpaces(std::shared_ptr<const Mesh> mesh, const ProblemConfig& config);

    const ProblemConfig& config() const { return config_; }
    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    const VectorSpace& phi_space() const { return phi_; }
    const ScalarSpace& u_space() const { return u_; }

    int num_phi_free() const { return phi_.dofs().num_free; }
    int num_u_free() const { return u_.dofs().num_free; }
    int num_free() const { return num_phi_free() + num_u_free(); }

    Eigen::VectorXd pack(const Eigen::VectorXd& phi_full, const Eigen::VectorXd& u_full) const;
    void unpack(const Eigen::VectorXd& x, Eigen::VectorXd& phi_full, Eigen::VectorXd& u_full) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    ProblemConfig config_;
    VectorSpace phi_;
    ScalarSpace u_;
};

/// Reference-element evaluations of both bases at a fixed point set.
struct ReferenceBasis {
    std::vector<Point2> points;
    ScalarBasisEval u;
    VectorBasisEval phi;
};
ReferenceBasis reference_basis(const FoslsSpaces& spaces, std::span<const Point2> points);

/// Physical basis data of one cell (Piola-mapped vector functions with orientation signs).
struct CellBasis {
    CellGeometry geo;
    ScalarBasisEval u;
    VectorBasisEval phi;
};
CellBasis push_cell(const FoslsSpaces& spaces, int cell, const ReferenceBasis& ref);

/// The quadrature rule used on a cell: `base`, or the circle-split rule when the
/// cell is cut by |x| = `discontinuity`.
QuadratureRule cell_rule(const ElementMap& map, const QuadratureRule& base, std::optional<double> discontinuity);

struct FoslsSystem {
    Eigen::SparseMatrix<double> matrix;  // full symmetric storage
    Eigen::VectorXd load;
    int num_phi = 0;
    int num_u = 0;
};

/// Assembles b(.,.) and F(.) over the free DOFs:
///   b = (div phi + gamma u, div psi + gamma v) + (grad u + phi, grad v + psi),
///   F = (f, div psi + gamma v).
/// When `discontinuity` is set, cells cut by that circle integrate the load with
/// the circle-split rule.
FoslsSystem assemble(const FoslsSpaces& spaces, const ScalarField& f, std::optional<double> discontinuity = std::nullopt);

struct SolverOptions {
    enum class Method { automatic, cholesky, cg };
    Method method = Method::automatic;
    /// Largest system solved directly in automatic mode. Above it, Jacobi-CG is
    /// tried first and the solver falls back to Cholesky if CG does not converge.
    int direct_limit = 1000000;
    double cg_tolerance = 1e-12;
    int cg_max_iterations = 10000;
};

struct SolverReport {
    std::string method;
    int iterations = 0;
    double relative_residual = 0.0;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, SolverReport report) : std::runtime_error(what), report_(std::move(report)) {}
    const SolverReport& report() const { return report_; }

private:
    SolverReport report_;
};

/// Point values of a discrete pair.
struct FieldValues {
    std::vector<double> u;
    std::vector<Point2> grad_u;
    std::vector<Point2> phi;
    std::vector<double> div_phi;
};

/// Values of a discrete pair (full coefficient vectors) at the points of a pushed cell basis.
FieldValues cell_field_values(const FoslsSpaces& spaces, int cell, const CellBasis& basis, const Eigen::VectorXd& phi,
                              const Eigen::VectorXd& u);

/// Discrete (phi_h, u_h) with full coefficient vectors (constrained entries zero).
class SolutionPair {
public:
    SolutionPair(std::shared_ptr<const FoslsSpaces> spaces, Eigen::VectorXd phi, Eigen::VectorXd u, SolverReport report = {});

    const FoslsSpaces& spaces() const { return *spaces_; }
    const std::shared_ptr<const FoslsSpaces>& spaces_ptr() const { return spaces_; }
    const Eigen::VectorXd& phi() const { return phi_; }
    const Eigen::VectorXd& u() const { return u_; }
    const SolverReport& report() const { return report_; }
    Eigen::VectorXd packed() const { return spaces_->pack(phi_, u_); }

    /// Values at physical points; throws std::domain_error for points outside the mesh.
    FieldValues evaluate(std::span<const Point2> points) const;

    /// Values at reference points of one cell, from precomputed reference bases.
    FieldValues evaluate_cell(int cell, const CellBasis& basis) const;

private:
    std::shared_ptr<const FoslsSpaces> spaces_;
    Eigen::VectorXd phi_;
    Eigen::VectorXd u_;
    SolverReport report_;
};

/// Solves the assembled system: sparse Cholesky up to `direct_limit` unknowns
/// (with iterative refinement), Jacobi-preconditioned CG above. Throws SolverError
/// when the factorization fails, or when CG was requested explicitly and does not converge.
SolutionPair solve(std::shared_ptr<const FoslsSpaces> spaces, const FoslsSystem& system, const SolverOptions& options = {});

/// Locates the cell containing a physical point and its reference coordinates.
struct PointLocation {
    int cell = -1;
    Point2 ref;
};
std::optional<PointLocation> locate_point(const Mesh& mesh, const Point2& x);

/// Exact or discrete pair given by callbacks.
struct PairFields {
    VectorField phi;
    ScalarField div_phi;
    ScalarField u;
    VectorField grad_u;
};
PairFields exact_pair(const ManufacturedCase& c);

/// b((phi, u), (phi, u)) of callbacks by quadrature through the element maps.
double b_energy(const Mesh& mesh, double gamma, const PairFields& pair, int degree,
                std::optional<double> discontinuity = std::nullopt);
/// b((phi_h, u_h), (phi_h, u_h)) of full coefficient vectors.
double b_energy(const FoslsSpaces& spaces, const Eigen::VectorXd& phi, const Eigen::VectorXd& u);
/// ||u||_{H^1}^2 + ||phi||_{H(div)}^2 of full coefficient vectors.
double product_norm_squared(const FoslsSpaces& spaces, const Eigen::VectorXd& phi, const Eigen::VectorXd& u);

struct GalerkinResidual {
    double relative_norm = 0.0;  // ||F - M x|| / ||F||
    double max_scaled = 0.0;     // max_i |F_i - (M x)_i| / max_i |F_i|
};
GalerkinResidual galerkin_residual(const FoslsSystem& system, const Eigen::VectorXd& x);

/// F(psi_i) - b((phi, u), psi_i) for every free test function, with (phi, u) given
/// by callbacks (e.g. the exact solution).
Eigen::VectorXd consistency_residual(const FoslsSpaces& spaces, const ScalarField& f, const PairFields& pair,
                                     std::optional<double> discontinuity = std::nullopt);

/// Coordinate text format: one "row col value" line per stored entry (0-based).
void write_coordinate(std::ostream& os, const Eigen::SparseMatrix<double>& matrix);

}  // namespace fosls
