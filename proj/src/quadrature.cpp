#include "fosls/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace fosls {

LineRule gauss_jacobi(int n, double alpha, double beta)
{
    if (n < 1) throw std::invalid_argument("gauss_jacobi: need at least one point");
    // Golub-Welsch on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        jac(k, k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double m = k + 1.0;
            const double t = 2.0 * m + ab;
            const double b = std::sqrt(4.0 * m * (m + alpha) * (m + beta) * (m + ab) /
                                       (t * t * (t + 1.0) * (t - 1.0)));
            jac(k, k + 1) = b;
            jac(k + 1, k) = b;
        }
    }
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                       std::tgamma(ab + 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
    LineRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Map to [0, 1]: x = 2t - 1, dx = 2 dt, (1 - x)^a (1 + x)^b = 2^(a+b) (1 - t)^a t^b.
    const double scale = 1.0 / std::pow(2.0, ab + 1.0);
    for (int k = 0; k < n; ++k) {
        const double v0 = eig.eigenvectors()(0, k);
        rule.nodes[k] = 0.5 * (eig.eigenvalues()(k) + 1.0);
        rule.weights[k] = mu0 * v0 * v0 * scale;
    }
    return rule;
}

LineRule gauss_legendre(int n)
{
    return gauss_jacobi(n, 0.0, 0.0);
}

namespace {

QuadratureRule make_collapsed_rule(int degree)
{
    const int n = (degree + 2) / 2;
    const LineRule gl = gauss_legendre(n);
    const LineRule gj = gauss_jacobi(n, 1.0, 0.0);
    QuadratureRule rule;
    rule.degree = degree;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double t = gj.nodes[j];
            rule.nodes.emplace_back(gl.nodes[i] * (1.0 - t), t);
            rule.weights.push_back(gl.weights[i] * gj.weights[j]);
        }
    }
    return rule;
}

}  // namespace

const QuadratureRule& triangle_rule(int degree)
{
    if (degree < 1 || degree > kMaxTriangleDegree) {
        throw std::invalid_argument("triangle_rule: degree " + std::to_string(degree) +
                                    " unsupported (valid range 1.." + std::to_string(kMaxTriangleDegree) + ")");
    }
    static std::array<QuadratureRule, kMaxTriangleDegree + 1> table;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int d = 1; d <= kMaxTriangleDegree; ++d) table[d] = make_collapsed_rule(d);
    });
    return table[degree];
}

int assembly_degree(int ps, int pv)
{
    return std::min(kMaxTriangleDegree, 2 * (std::max(ps, pv) + 3));
}

int error_degree(int ps, int pv)
{
    return std::min(kMaxTriangleDegree, 2 * (std::max(ps, pv) + 5));
}

namespace {

double circle_level(const ElementMap& map, const Point2& ref, double radius)
{
    return map.eval_unchecked(ref).squaredNorm() - radius * radius;
}

// Sign changes of g on [0, 1], located by sampling and bracketed root refinement.
template <class F>
std::vector<double> roots_on_unit_interval(F&& g)
{
    constexpr int samples = 32;
    std::vector<double> roots;
    double x0 = 0.0, g0 = g(0.0);
    for (int i = 1; i <= samples; ++i) {
        const double x1 = static_cast<double>(i) / samples;
        const double g1 = g(x1);
        if (g0 == 0.0 && i > 1) {
            roots.push_back(x0);
        } else if (g0 * g1 < 0.0) {
            std::uintmax_t max_iter = 200;
            const auto [lo, hi] = boost::math::tools::toms748_solve(
                g, x0, x1, g0, g1, boost::math::tools::eps_tolerance<double>(52), max_iter);
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    return roots;
}

}  // namespace

bool cell_crosses_circle(const ElementMap& map, double radius)
{
    constexpr int n = 12;
    bool below = false, above = false;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i + j <= n; ++i) {
            const double v = circle_level(map, Point2(static_cast<double>(i) / n, static_cast<double>(j) / n), radius);
            below |= v < 0.0;
            above |= v > 0.0;
        }
    }
    return below && above;
}

QuadratureRule circle_adapted_rule(const ElementMap& map, const QuadratureRule& base, double radius)
{
    const int n = (base.degree + 2) / 2;
    const LineRule rule_s = gauss_legendre(2 * n + 4);
    const LineRule rule_t = gauss_legendre(n + 1);

    // Breakpoints in s: crossings of the circle with the edge opposite vertex 0.
    std::vector<double> s_breaks{0.0};
    for (double s : roots_on_unit_interval([&](double s) { return circle_level(map, Point2(1.0 - s, s), radius); }))
        if (s > 0.0 && s < 1.0) s_breaks.push_back(s);
    s_breaks.push_back(1.0);

    QuadratureRule out;
    out.degree = base.degree;
    for (std::size_t is = 0; is + 1 < s_breaks.size(); ++is) {
        const double s0 = s_breaks[is], s1 = s_breaks[is + 1];
        for (std::size_t qs = 0; qs < rule_s.nodes.size(); ++qs) {
            const double s = s0 + (s1 - s0) * rule_s.nodes[qs];
            const double ws = (s1 - s0) * rule_s.weights[qs];
            const Point2 dir(1.0 - s, s);
            std::vector<double> t_breaks{0.0};
            for (double t : roots_on_unit_interval([&](double t) { return circle_level(map, t * dir, radius); }))
                if (t > 0.0 && t < 1.0) t_breaks.push_back(t);
            t_breaks.push_back(1.0);
            for (std::size_t it = 0; it + 1 < t_breaks.size(); ++it) {
                const double t0 = t_breaks[it], t1 = t_breaks[it + 1];
                for (std::size_t qt = 0; qt < rule_t.nodes.size(); ++qt) {
                    const double t = t0 + (t1 - t0) * rule_t.nodes[qt];
                    // dx dy = t ds dt for the collapsed coordinates.
                    out.nodes.push_back(t * dir);
                    out.weights.push_back(ws * (t1 - t0) * rule_t.weights[qt] * t);
                }
            }
        }
    }
    return out;
}

}  // namespace fosls
