#include "fosls/manufactured.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fosls {

namespace {

constexpr double kPi = std::numbers::pi;

double bessel_i0(double x) { return std::cyl_bessel_i(0.0, x); }
double bessel_i1(double x) { return std::cyl_bessel_i(1.0, x); }
double bessel_k0(double x) { return std::cyl_bessel_k(0.0, x); }
double bessel_k1(double x) { return std::cyl_bessel_k(1.0, x); }

void require_positive_gamma(double gamma)
{
    if (!(gamma > 0.0)) throw std::invalid_argument("reaction coefficient gamma must be positive");
}

}  // namespace

std::string to_string(BoundaryCondition bc)
{
    return bc == BoundaryCondition::neumann ? "neumann" : "dirichlet";
}

ManufacturedCase smooth_case(double gamma)
{
    require_positive_gamma(gamma);
    ManufacturedCase c;
    c.name = "smooth";
    c.gamma = gamma;
    c.u = [](const Point2& x) { return std::cos(2 * kPi * x.squaredNorm()); };
    c.grad_u = [](const Point2& x) -> Point2 { return -4 * kPi * std::sin(2 * kPi * x.squaredNorm()) * x; };
    c.f = [gamma](const Point2& x) {
        const double r2 = x.squaredNorm();
        const double s = std::sin(2 * kPi * r2), co = std::cos(2 * kPi * r2);
        return 8 * kPi * s + 16 * kPi * kPi * r2 * co + gamma * co;
    };
    return c;
}

IndicatorRadialSolution::IndicatorRadialSolution(double gamma) : gamma_(gamma), k_(std::sqrt(gamma))
{
    require_positive_gamma(gamma);
    const double k = k_;
    const double h = 0.5 * k;
    // Unknowns (A, B, C): continuity of u and u' at r = 1/2, u'(1) = 0.
    Eigen::Matrix3d m;
    m << bessel_i0(h), -bessel_i0(h), -bessel_k0(h),
         bessel_i1(h), -bessel_i1(h), bessel_k1(h),
         0.0, bessel_i1(k), -bessel_k1(k);
    const Eigen::Vector3d rhs(-1.0 / gamma, 0.0, 0.0);
    const auto lu = m.fullPivLu();
    if (!lu.isInvertible()) throw std::runtime_error("IndicatorRadialSolution: singular matching system");
    const Eigen::Vector3d abc = lu.solve(rhs);
    a_ = abc(0);
    b_ = abc(1);
    c_ = abc(2);
}

double IndicatorRadialSolution::u(double r) const
{
    if (r <= 0.5) return 1.0 / gamma_ + a_ * bessel_i0(k_ * r);
    return b_ * bessel_i0(k_ * r) + c_ * bessel_k0(k_ * r);
}

double IndicatorRadialSolution::du(double r) const
{
    if (r <= 0.5) return a_ * k_ * bessel_i1(k_ * r);
    return k_ * (b_ * bessel_i1(k_ * r) - c_ * bessel_k1(k_ * r));
}

double IndicatorRadialSolution::du_over_r(double r) const
{
    if (r <= 0.5) {
        const double z = k_ * r;
        const double i1_over_z = z < 1e-8 ? 0.5 : bessel_i1(z) / z;
        return a_ * k_ * k_ * i1_over_z;
    }
    return du(r) / r;
}

double IndicatorRadialSolution::d2u(double r) const
{
    const double f = r <= 0.5 ? 1.0 : 0.0;
    return gamma_ * u(r) - f - du_over_r(r);
}

ManufacturedCase indicator_case(double gamma)
{
    const IndicatorRadialSolution sol(gamma);
    ManufacturedCase c;
    c.name = "indicator";
    c.gamma = gamma;
    c.regularity = 0.5;
    c.discontinuity_radius = 0.5;
    c.u = [sol](const Point2& x) { return sol.u(x.norm()); };
    c.grad_u = [sol](const Point2& x) -> Point2 { return sol.du_over_r(x.norm()) * x; };
    c.f = [](const Point2& x) { return x.norm() <= 0.5 ? 1.0 : 0.0; };
    return c;
}

ManufacturedCase dirichlet_smoke_case(double gamma)
{
    require_positive_gamma(gamma);
    ManufacturedCase c;
    c.name = "dirichlet-smoke";
    c.gamma = gamma;
    c.bc = BoundaryCondition::dirichlet;
    c.u = [](const Point2& x) { return 1.0 - x.squaredNorm(); };
    c.grad_u = [](const Point2& x) -> Point2 { return -2.0 * x; };
    c.f = [gamma](const Point2& x) { return 4.0 + gamma * (1.0 - x.squaredNorm()); };
    return c;
}

ManufacturedCase make_case(const std::string& name, double gamma)
{
    if (name == "smooth") return smooth_case(gamma);
    if (name == "indicator") return indicator_case(gamma);
    if (name == "dirichlet-smoke") return dirichlet_smoke_case(gamma);
    throw std::invalid_argument("unknown case '" + name + "' (expected smooth, indicator or dirichlet-smoke)");
}

namespace {

using State = std::array<double, 2>;  // (u, r u')

// Power series of the regular solution u = sum a_n r^(2n) with u(0) = u0 and
// source value `f` near the origin: a_{n+1} = (gamma a_n - f delta_{n0}) / (2n + 2)^2.
State series_start(double gamma, double u0, double f, double r)
{
    double a = u0;
    double u = 0.0, v = 0.0;
    double r2n = 1.0;
    for (int n = 0; n < 30; ++n) {
        u += a * r2n;
        v += 2.0 * n * a * r2n;
        const double next = (gamma * a - (n == 0 ? f : 0.0)) / ((2.0 * n + 2.0) * (2.0 * n + 2.0));
        a = next;
        r2n *= r * r;
    }
    return {u, v};
}

State integrate_radial(double gamma, double source, State y, double r0, double r1, double rel_tol)
{
    namespace odeint = boost::numeric::odeint;
    auto rhs = [gamma, source](const State& s, State& ds, double r) {
        ds[0] = s[1] / r;
        ds[1] = r * (gamma * s[0] - source);
    };
    auto stepper = odeint::make_controlled(rel_tol * 1e-2, rel_tol, odeint::runge_kutta_fehlberg78<State>());
    odeint::integrate_adaptive(stepper, rhs, y, r0, r1, (r1 - r0) * 1e-3);
    return y;
}

// Solution with u(0) = u0 and source weight `src` (1 for the particular part).
State shoot(double gamma, double u0, double src, double r, double rel_tol)
{
    constexpr double r_start = 1e-2;
    if (r <= r_start) return series_start(gamma, u0, src, r);
    State y = series_start(gamma, u0, src, r_start);
    const double r_mid = std::min(r, 0.5);
    y = integrate_radial(gamma, src, y, r_start, r_mid, rel_tol);
    if (r > 0.5) y = integrate_radial(gamma, 0.0, y, 0.5, r, rel_tol);
    return y;
}

}  // namespace

std::vector<RadialSample> indicator_radial_ode(double gamma, std::span<const double> radii, double rel_tol)
{
    require_positive_gamma(gamma);
    // u = u_p + u0 u_h; u_p(0) = 0 carries the source, u_h(0) = 1 is homogeneous.
    const State p1 = shoot(gamma, 0.0, 1.0, 1.0, rel_tol);
    const State h1 = shoot(gamma, 1.0, 0.0, 1.0, rel_tol);
    const double u0 = -p1[1] / h1[1];

    std::vector<RadialSample> out;
    out.reserve(radii.size());
    for (double r : radii) {
        if (r < 0.0 || r > 1.0) throw std::invalid_argument("indicator_radial_ode: radius outside [0, 1]");
        if (r == 0.0) {
            out.push_back({0.0, u0, 0.0});
            continue;
        }
        const State p = shoot(gamma, 0.0, 1.0, r, rel_tol);
        const State h = shoot(gamma, 1.0, 0.0, r, rel_tol);
        out.push_back({r, p[0] + u0 * h[0], (p[1] + u0 * h[1]) / r});
    }
    return out;
}

}  // namespace fosls
