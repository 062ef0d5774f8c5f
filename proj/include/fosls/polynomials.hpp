#pragma once

#include "fosls/geometry.hpp"

#include <Eigen/Dense>

#include <span>

namespace fosls {

/// dim P_p on a triangle.
constexpr int dim_p(int p)
{
    return p < 0 ? 0 : (p + 1) * (p + 2) / 2;
}

/// Orthogonal (Dubiner) polynomials on the reference triangle, ordered by total
/// degree so that the first dim_p(k) members span P_k.
struct PrimeBasis {
    Eigen::MatrixXd values;  // points x functions
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
};

PrimeBasis dubiner_basis(int degree, std::span<const Point2> points);

/// Total degree of the i-th Dubiner polynomial.
int dubiner_degree(int index);

/// Legendre polynomial L_n on [-1, 1].
double legendre(int n, double x);

}  // namespace fosls
