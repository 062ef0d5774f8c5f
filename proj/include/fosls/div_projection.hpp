#pragma once

#include "fosls/fe_spaces.hpp"
#include "fosls/fosls.hpp"

#include <Eigen/Sparse>

namespace fosls {

/// A vector field together with its divergence.
struct VectorTarget {
    VectorField phi;
    ScalarField div;
};

/// Matrices and moment vectors over the free DOFs of a vector space. `degree`
/// is the quadrature degree on the reference cell.
Eigen::SparseMatrix<double> vector_mass_matrix(const VectorSpace& space, int degree);
Eigen::SparseMatrix<double> div_div_matrix(const VectorSpace& space, int degree);
/// (phi, psi_i) and (div_field, div psi_i).
Eigen::VectorXd vector_moments(const VectorSpace& space, const VectorField& phi, int degree);
Eigen::VectorXd div_moments(const VectorSpace& space, const ScalarField& div_field, int degree);

/// Plain L2 projections; full coefficient vectors with constrained entries zero.
Eigen::VectorXd l2_project(const VectorSpace& space, const VectorField& phi, int degree);
Eigen::VectorXd l2_project(const ScalarSpace& space, const ScalarField& u, int degree);

struct ProjectionErrors {
    double l2 = 0.0;   // ||phi - phi_h||
    double div = 0.0;  // ||div (phi - phi_h)||
};
ProjectionErrors projection_errors(const VectorSpace& space, const Eigen::VectorXd& coeffs, const VectorTarget& target,
                                   int degree);

/// KKT system of the divergence-constrained L2 projection
///
///     min ||phi - phi_h||  subject to  (div (phi - phi_h), div chi_h) = 0 for all chi_h.
///
/// The multiplier lives in the broken space {q_hat / det J : q_hat in P_{p-1}},
/// which is the divergence range of a space without boundary condition. With
/// zero normal trace the range loses one direction, the L2 projection k of the
/// constant onto the multiplier space; the system is then bordered by (0, k)
/// and the constraint data is projected onto the orthogonal complement of k.
struct SaddleSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    int num_vector = 0;
    int num_multiplier = 0;
    bool bordered = false;
};
SaddleSystem build_Ih_system(const VectorSpace& space, const VectorTarget& target, int degree);

/// I_h (or I_h^0 when the space carries the zero normal trace condition) of a
/// field; `degree` = 0 picks a default. Throws std::runtime_error if the
/// saddle system cannot be factorized.
Eigen::VectorXd apply_Ih(const VectorSpace& space, const VectorTarget& target, int degree = 0);
/// Same for a discrete field given by full coefficients (moments computed exactly).
Eigen::VectorXd apply_Ih(const VectorSpace& space, const Eigen::VectorXd& coeffs, int degree = 0);

/// Lagrange space of the curl potentials: degree p for RT, p + 1 for BDM, with
/// zero trace when the vector space has zero normal trace.
ScalarSpaceSpec curl_potential_spec(const VectorSpaceSpec& spec);

/// (psi_j, curl mu_i) for free vector functions psi_j (rows) and free potentials
/// mu_i (columns), curl mu = (d_y mu, -d_x mu).
Eigen::SparseMatrix<double> curl_coupling_matrix(const VectorSpace& space, const ScalarSpace& potentials, int degree);

/// Free-DOF coefficients of curl mu_i in the vector space, one column per free potential.
Eigen::SparseMatrix<double> curl_coefficients(const VectorSpace& space, const ScalarSpace& potentials);

struct HelmholtzSplit {
    Eigen::VectorXd potential;  // full Lagrange coefficients of mu_h
    Eigen::VectorXd curl_part;  // full vector coefficients of curl mu_h
    Eigen::VectorXd remainder;  // phi_h - curl mu_h
};

/// phi_h = curl mu_h + r_h with curl mu_h the L2 projection of phi_h onto curls,
/// so that r_h is L2-orthogonal to every discrete curl and div r_h = div phi_h.
HelmholtzSplit helmholtz_split(const VectorSpace& space, const Eigen::VectorXd& coeffs, int degree = 0);

}  // namespace fosls
