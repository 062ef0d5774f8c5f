#include "fosls/polynomials.hpp"

#include <vector>

namespace fosls {

namespace {

// Jacobi P_n^{(a,0)} and its derivative for n = 0..N at x.
void jacobi_a0(int N, double a, double x, std::vector<double>& p, std::vector<double>& dp)
{
    p.assign(N + 1, 0.0);
    dp.assign(N + 1, 0.0);
    p[0] = 1.0;
    if (N == 0) return;
    p[1] = 0.5 * ((a + 2.0) * x + a);
    dp[1] = 0.5 * (a + 2.0);
    for (int n = 2; n <= N; ++n) {
        const double c0 = 2.0 * n * (n + a) * (2.0 * n + a - 2.0);
        const double c1 = (2.0 * n + a - 1.0) * (2.0 * n + a) * (2.0 * n + a - 2.0);
        const double c2 = (2.0 * n + a - 1.0) * a * a;
        const double c3 = 2.0 * (n + a - 1.0) * (n - 1.0) * (2.0 * n + a);
        p[n] = ((c1 * x + c2) * p[n - 1] - c3 * p[n - 2]) / c0;
        dp[n] = ((c1 * x + c2) * dp[n - 1] + c1 * p[n - 1] - c3 * dp[n - 2]) / c0;
    }
}

}  // namespace

int dubiner_degree(int index)
{
    int d = 0;
    while (dim_p(d) <= index) ++d;
    return d;
}

PrimeBasis dubiner_basis(int degree, std::span<const Point2> points)
{
    const int n = dim_p(degree);
    const int np = static_cast<int>(points.size());
    PrimeBasis b{Eigen::MatrixXd(np, n), Eigen::MatrixXd(np, n), Eigen::MatrixXd(np, n)};

    std::vector<double> q(degree + 1), dq_xi(degree + 1), dq_eta(degree + 1);
    std::vector<double> jp, djp;
    for (int k = 0; k < np; ++k) {
        const double xi = 2.0 * points[k].x() - 1.0;
        const double eta = 2.0 * points[k].y() - 1.0;
        const double f1 = 0.5 * (1.0 + 2.0 * xi + eta);
        const double f2 = 0.25 * (1.0 - eta) * (1.0 - eta);
        const double df2_eta = -0.5 * (1.0 - eta);

        q[0] = 1.0;
        dq_xi[0] = dq_eta[0] = 0.0;
        if (degree >= 1) {
            q[1] = f1;
            dq_xi[1] = 1.0;
            dq_eta[1] = 0.5;
        }
        for (int i = 1; i < degree; ++i) {
            const double a = (2.0 * i + 1.0) / (i + 1.0);
            const double c = static_cast<double>(i) / (i + 1.0);
            q[i + 1] = a * f1 * q[i] - c * f2 * q[i - 1];
            dq_xi[i + 1] = a * (q[i] + f1 * dq_xi[i]) - c * f2 * dq_xi[i - 1];
            dq_eta[i + 1] = a * (0.5 * q[i] + f1 * dq_eta[i]) - c * (df2_eta * q[i - 1] + f2 * dq_eta[i - 1]);
        }

        int col = 0;
        for (int d = 0; d <= degree; ++d) {
            for (int j = 0; j <= d; ++j) {
                const int i = d - j;
                jacobi_a0(j, 2.0 * i + 1.0, eta, jp, djp);
                b.values(k, col) = q[i] * jp[j];
                // Chain rule to reference coordinates: d/dx = 2 d/dxi, d/dy = 2 d/deta.
                b.dx(k, col) = 2.0 * dq_xi[i] * jp[j];
                b.dy(k, col) = 2.0 * (dq_eta[i] * jp[j] + q[i] * djp[j]);
                ++col;
            }
        }
    }
    return b;
}

double legendre(int n, double x)
{
    if (n == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

}  // namespace fosls
