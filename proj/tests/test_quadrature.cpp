#include "fosls/geometry.hpp"
#include "fosls/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace fosls;

namespace {

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

double integrate_monomial(const QuadratureRule& rule, int a, int b)
{
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.nodes[q].x(), a) * std::pow(rule.nodes[q].y(), b);
    return s;
}

}  // namespace

TEST(TriangleRule, DegreeOneIsCentroid)
{
    const QuadratureRule& rule = triangle_rule(1);
    ASSERT_EQ(rule.size(), 1u);
    EXPECT_NEAR(rule.nodes[0].x(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(rule.nodes[0].y(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(rule.weights[0], 0.5, 1e-15);
}

TEST(TriangleRule, FirstMoment)
{
    for (int d = 1; d <= kMaxTriangleDegree; ++d) EXPECT_NEAR(integrate_monomial(triangle_rule(d), 1, 0), 1.0 / 6.0, 1e-15);
}

TEST(TriangleRule, QuinticMoment)
{
    // 3! 2! / 7! = 1 / 420
    EXPECT_NEAR(integrate_monomial(triangle_rule(5), 3, 2), 1.0 / 420.0, 1e-16);
}

TEST(TriangleRule, MonomialExactness)
{
    for (int d = 1; d <= kMaxTriangleDegree; ++d) {
        const QuadratureRule& rule = triangle_rule(d);
        EXPECT_GE(rule.degree, d);
        for (int a = 0; a <= d; ++a)
            for (int b = 0; a + b <= d; ++b)
                EXPECT_LT(std::abs(integrate_monomial(rule, a, b) - factorial(a) * factorial(b) / factorial(a + b + 2)), 1e-13)
                    << "degree " << d << " monomial x^" << a << " y^" << b;
    }
}

TEST(TriangleRule, PositiveWeightsInteriorNodes)
{
    for (int d = 1; d <= kMaxTriangleDegree; ++d) {
        const QuadratureRule& rule = triangle_rule(d);
        EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 0.5, 1e-14);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            EXPECT_GT(rule.weights[q], 0.0);
            EXPECT_TRUE(ReferenceTriangle::contains(rule.nodes[q], 0.0));
        }
    }
}

TEST(TriangleRule, Deterministic)
{
    const QuadratureRule a = triangle_rule(9);
    const QuadratureRule& b = triangle_rule(9);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t q = 0; q < a.size(); ++q) {
        EXPECT_EQ(a.nodes[q], b.nodes[q]);
        EXPECT_EQ(a.weights[q], b.weights[q]);
    }
}

TEST(TriangleRule, RejectsUnsupportedDegree)
{
    EXPECT_THROW(triangle_rule(0), std::invalid_argument);
    EXPECT_THROW(triangle_rule(kMaxTriangleDegree + 1), std::invalid_argument);
    try {
        triangle_rule(21);
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("1..20"), std::string::npos);
    }
}

TEST(LineRules, GaussLegendreExactness)
{
    const LineRule r = gauss_legendre(5);
    for (int k = 0; k <= 9; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
        EXPECT_NEAR(s, 1.0 / (k + 1), 1e-15);
    }
}

TEST(LineRules, GaussJacobiExactness)
{
    // int_0^1 (1 - t) t^k dt = 1 / ((k + 1)(k + 2))
    const LineRule r = gauss_jacobi(4, 1.0, 0.0);
    for (int k = 0; k <= 7; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
        EXPECT_NEAR(s, 1.0 / ((k + 1.0) * (k + 2.0)), 1e-15);
    }
}

TEST(DegreeDefaults, AssemblyAndErrorDegrees)
{
    EXPECT_EQ(assembly_degree(1, 1), 8);
    EXPECT_EQ(assembly_degree(2, 3), 12);
    EXPECT_EQ(error_degree(3, 2), 16);
    EXPECT_EQ(error_degree(5, 5), kMaxTriangleDegree);
}

TEST(CircleAdaptedRule, AreaOfDiskPiecesIsExact)
{
    // Cells cut by r = 1/2: the inner area of the refined disk is pi / 4 only if
    // the split rule resolves the circle exactly.
    const Mesh mesh = build_disk_mesh(6, 2);
    const QuadratureRule& base = triangle_rule(10);
    double inner = 0.0;
    int cut = 0;
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const ElementMap& map = mesh.map(k);
        const bool crosses = cell_crosses_circle(map, 0.5);
        cut += crosses;
        const QuadratureRule rule = crosses ? circle_adapted_rule(map, base, 0.5) : base;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point2 x = map.eval(rule.nodes[q]);
            if (x.norm() <= 0.5) inner += rule.weights[q] * map.jacobian(rule.nodes[q]).determinant();
        }
    }
    EXPECT_GT(cut, 0);
    EXPECT_NEAR(inner, std::acos(-1.0) / 4, 1e-10);
}

TEST(CircleAdaptedRule, ReproducesPolynomialMoments)
{
    const ElementMap map = ElementMap::affine({Point2(0.2, 0.1), Point2(0.7, 0.0), Point2(0.3, 0.6)});
    ASSERT_TRUE(cell_crosses_circle(map, 0.5));
    const QuadratureRule rule = circle_adapted_rule(map, triangle_rule(6), 0.5);
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; a + b <= 6; ++b)
            EXPECT_NEAR(integrate_monomial(rule, a, b), factorial(a) * factorial(b) / factorial(a + b + 2), 1e-14);
}
