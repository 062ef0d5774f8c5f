#pragma once

#include "fosls/geometry.hpp"

#include <vector>

namespace fosls {

/// Quadrature rule on the reference triangle; weights sum to the reference area 1/2.
struct QuadratureRule {
    int degree = 0;
    std::vector<Point2> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// 1D Gauss rule on [0, 1].
struct LineRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

constexpr int kMaxTriangleDegree = 20;

/// Rule exact for all polynomials of total degree <= `degree`, degree in [1, 20].
/// Collapsed (Duffy) tensor rule: Gauss-Legendre in one direction and
/// Gauss-Jacobi(1, 0) in the other, so all weights are positive and all nodes
/// are interior. The same degree always yields the same rule.
const QuadratureRule& triangle_rule(int degree);

/// n-point Gauss-Legendre rule on [0, 1] (exact to degree 2n - 1).
LineRule gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight (1 - t)^alpha t^beta.
LineRule gauss_jacobi(int n, double alpha, double beta);

/// Quadrature degree used for assembly: 2 (max(p_s, p_v) + 3), capped at the table limit.
int assembly_degree(int ps, int pv);
/// Quadrature degree used for error norms: 2 (max(p_s, p_v) + 5), capped at the table limit.
int error_degree(int ps, int pv);

/// True if the circle |x| = radius passes through the interior of the mapped cell
/// (detected on a sampling lattice of the reference triangle).
bool cell_crosses_circle(const ElementMap& map, double radius);

/// Composite reference-cell rule for integrands that are smooth on either side
/// of the circle |x| = radius but not across it. The reference triangle is
/// collapsed onto vertex 0, x = t (1 - s, s); each ray s = const is split at its
/// crossings with the pulled-back circle and the s-range at the crossings of the
/// opposite edge, and Gauss rules are used on every piece. `base` sets the
/// per-piece resolution.
QuadratureRule circle_adapted_rule(const ElementMap& map, const QuadratureRule& base, double radius);

}  // namespace fosls
