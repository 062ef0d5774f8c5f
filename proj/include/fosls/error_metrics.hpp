#pragma once

#include "fosls/fosls.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fosls {

/// L2-type norms of e^u = u - u_h and e^phi = phi - phi_h.
struct ErrorReport {
    int level = 0;
    double h = 0.0;
    int dof_total = 0;  // free DOFs of the coupled system
    int dof_u = 0;
    int dof_phi = 0;
    double err_u = 0.0;
    double err_gradu = 0.0;
    double err_phi = 0.0;
    double err_divphi = 0.0;
    /// b-norm of the error, from the combined integrand.
    double err_b = 0.0;
    /// The two terms of the b-norm: ||div e^phi + gamma e^u|| and ||grad e^u + e^phi||.
    double err_b_div = 0.0;
    double err_b_grad = 0.0;
};

/// Errors of a discrete pair (full coefficient vectors) against callbacks.
/// `degree` = 0 uses the configured error quadrature degree; cells cut by
/// |x| = `discontinuity` use the circle-split rule.
ErrorReport compute_errors(const FoslsSpaces& spaces, const Eigen::VectorXd& phi, const Eigen::VectorXd& u,
                           const PairFields& exact, std::optional<double> discontinuity = std::nullopt, int degree = 0);

ErrorReport compute_errors(const SolutionPair& sol, const ManufacturedCase& exact, int degree = 0);

/// EOC_k = log(e_k / e_{k+1}) / log(h_k / h_{k+1}). Throws std::invalid_argument
/// for mismatched lengths, fewer than two entries, nonpositive values or h not
/// strictly decreasing.
std::vector<double> eoc(std::span<const double> errors, std::span<const double> h);

struct ConvergenceReport {
    std::vector<ErrorReport> levels;
    std::vector<double> eoc_u;
    std::vector<double> eoc_gradu;
    std::vector<double> eoc_phi;
    std::vector<double> eoc_divphi;
    std::vector<double> eoc_b;
};

/// Builds the EOC sequences between consecutive levels (empty for one level).
ConvergenceReport make_convergence_report(std::vector<ErrorReport> levels);

/// CSV with header
/// level,h,dof_total,dof_u,dof_phi,err_u,err_gradu,err_phi,err_divphi,err_b,eoc_u,eoc_gradu,eoc_phi
/// EOC fields are blank on the first row.
void write_csv(std::ostream& os, const ConvergenceReport& report);

}  // namespace fosls
