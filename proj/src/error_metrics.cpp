#include "fosls/error_metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace fosls {

ErrorReport compute_errors(const FoslsSpaces& spaces, const Eigen::VectorXd& phi, const Eigen::VectorXd& u,
                           const PairFields& exact, std::optional<double> discontinuity, int degree)
{
    const Mesh& mesh = spaces.mesh();
    const double gamma = spaces.config().gamma;
    const QuadratureRule& base = triangle_rule(degree > 0 ? degree : spaces.config().error_degree());
    const ReferenceBasis base_ref = reference_basis(spaces, base.nodes);

    double su = 0, sgu = 0, sphi = 0, sdiv = 0, sb = 0, sbd = 0, sbg = 0;
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const bool cut = discontinuity && cell_crosses_circle(mesh.map(k), *discontinuity);
        const QuadratureRule rule = cut ? circle_adapted_rule(mesh.map(k), base, *discontinuity) : QuadratureRule{};
        const QuadratureRule& r = cut ? rule : base;
        const CellBasis b = cut ? push_cell(spaces, k, reference_basis(spaces, r.nodes)) : push_cell(spaces, k, base_ref);
        const FieldValues v = cell_field_values(spaces, k, b, phi, u);
        for (std::size_t q = 0; q < r.size(); ++q) {
            const Point2& x = b.geo.points[q];
            const double w = r.weights[q] * b.geo.dets[q];
            const double eu = exact.u(x) - v.u[q];
            const Point2 egu = exact.grad_u(x) - v.grad_u[q];
            const Point2 ephi = exact.phi(x) - v.phi[q];
            const double ediv = exact.div_phi(x) - v.div_phi[q];
            const double bd = ediv + gamma * eu;
            const Point2 bg = egu + ephi;
            su += w * eu * eu;
            sgu += w * egu.squaredNorm();
            sphi += w * ephi.squaredNorm();
            sdiv += w * ediv * ediv;
            sbd += w * bd * bd;
            sbg += w * bg.squaredNorm();
            sb += w * (bd * bd + bg.squaredNorm());
        }
    }
    ErrorReport rep;
    rep.level = mesh.level();
    rep.h = mesh.h();
    rep.dof_phi = spaces.num_phi_free();
    rep.dof_u = spaces.num_u_free();
    rep.dof_total = spaces.num_free();
    rep.err_u = std::sqrt(su);
    rep.err_gradu = std::sqrt(sgu);
    rep.err_phi = std::sqrt(sphi);
    rep.err_divphi = std::sqrt(sdiv);
    rep.err_b = std::sqrt(sb);
    rep.err_b_div = std::sqrt(sbd);
    rep.err_b_grad = std::sqrt(sbg);
    return rep;
}

ErrorReport compute_errors(const SolutionPair& sol, const ManufacturedCase& exact, int degree)
{
    return compute_errors(sol.spaces(), sol.phi(), sol.u(), exact_pair(exact), exact.discontinuity_radius, degree);
}

std::vector<double> eoc(std::span<const double> errors, std::span<const double> h)
{
    if (errors.size() != h.size()) throw std::invalid_argument("eoc: errors and h differ in length");
    if (errors.size() < 2) throw std::invalid_argument("eoc: need at least two levels");
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0) || !(h[i] > 0.0)) throw std::invalid_argument("eoc: errors and h must be positive");
        if (i > 0 && !(h[i] < h[i - 1])) throw std::invalid_argument("eoc: h must be strictly decreasing");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]));
    return out;
}

namespace {

// EOC of one norm; NaN where an error vanished (rates are undefined there).
std::vector<double> eoc_or_nan(const std::vector<ErrorReport>& levels, double ErrorReport::*field)
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        const double e0 = levels[i].*field, e1 = levels[i + 1].*field;
        const double h[] = {levels[i].h, levels[i + 1].h};
        if (e0 > 0.0 && e1 > 0.0) {
            const double e[] = {e0, e1};
            out.push_back(eoc(e, h)[0]);
        } else {
            out.push_back(std::nan(""));
        }
    }
    return out;
}

}  // namespace

ConvergenceReport make_convergence_report(std::vector<ErrorReport> levels)
{
    ConvergenceReport rep;
    rep.levels = std::move(levels);
    rep.eoc_u = eoc_or_nan(rep.levels, &ErrorReport::err_u);
    rep.eoc_gradu = eoc_or_nan(rep.levels, &ErrorReport::err_gradu);
    rep.eoc_phi = eoc_or_nan(rep.levels, &ErrorReport::err_phi);
    rep.eoc_divphi = eoc_or_nan(rep.levels, &ErrorReport::err_divphi);
    rep.eoc_b = eoc_or_nan(rep.levels, &ErrorReport::err_b);
    return rep;
}

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& os, const ConvergenceReport& report)
{
    os << "level,h,dof_total,dof_u,dof_phi,err_u,err_gradu,err_phi,err_divphi,err_b,eoc_u,eoc_gradu,eoc_phi\n";
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const ErrorReport& r = report.levels[i];
        os << r.level << ',' << fmt(r.h) << ',' << r.dof_total << ',' << r.dof_u << ',' << r.dof_phi << ',' << fmt(r.err_u) << ','
           << fmt(r.err_gradu) << ',' << fmt(r.err_phi) << ',' << fmt(r.err_divphi) << ',' << fmt(r.err_b) << ',';
        if (i == 0) {
            os << ",,\n";
        } else {
            os << fmt(report.eoc_u[i - 1]) << ',' << fmt(report.eoc_gradu[i - 1]) << ',' << fmt(report.eoc_phi[i - 1]) << '\n';
        }
    }
}

}  // namespace fosls
