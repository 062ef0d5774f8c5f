#pragma once

#include "fosls/geometry.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fosls {

enum class BoundaryCondition { neumann, dirichlet };

std::string to_string(BoundaryCondition bc);

/// Exact solution bundle for -Laplace(u) + gamma u = f on the unit disk.
struct ManufacturedCase {
    std::string name;
    double gamma = 1.0;
    std::function<double(const Point2&)> u;
    std::function<Point2(const Point2&)> grad_u;
    std::function<double(const Point2&)> f;
    /// Sobolev regularity s of f (infinity for smooth data).
    double regularity = std::numeric_limits<double>::infinity();
    BoundaryCondition bc = BoundaryCondition::neumann;
    /// Radius of a circle across which f jumps, if any.
    std::optional<double> discontinuity_radius;

    Point2 phi(const Point2& x) const { return -grad_u(x); }
    /// div phi = -Laplace(u) = f - gamma u.
    double div_phi(const Point2& x) const { return f(x) - gamma * u(x); }
};

/// u = cos(2 pi r^2), homogeneous Neumann data.
ManufacturedCase smooth_case(double gamma);

/// f = indicator of r <= 1/2, homogeneous Neumann data; u from the Bessel closed form.
ManufacturedCase indicator_case(double gamma);

/// u = 1 - r^2, homogeneous Dirichlet data.
ManufacturedCase dirichlet_smoke_case(double gamma);

ManufacturedCase make_case(const std::string& name, double gamma);

/// Closed-form radial solution of -u'' - u'/r + gamma u = 1_{r <= 1/2}, u'(0) = u'(1) = 0:
/// inner u = 1/gamma + A I0(k r), outer u = B I0(k r) + C K0(k r), k = sqrt(gamma).
class IndicatorRadialSolution {
public:
    explicit IndicatorRadialSolution(double gamma);

    double u(double r) const;
    double du(double r) const;
    /// u'(r) / r, finite at r = 0.
    double du_over_r(double r) const;
    double d2u(double r) const;

    double gamma() const { return gamma_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }

private:
    double gamma_, k_;
    double a_ = 0.0, b_ = 0.0, c_ = 0.0;
};

struct RadialSample {
    double r;
    double u;
    double du;
};

/// Independent reference for the indicator case: shooting with an adaptive
/// Runge-Kutta-Fehlberg 7(8) integrator on the radial ODE (regular series start
/// at the origin, restart at r = 1/2), solved for u'(1) = 0.
std::vector<RadialSample> indicator_radial_ode(double gamma, std::span<const double> radii, double rel_tol = 1e-12);

}  // namespace fosls
