#include "fosls/div_projection.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fosls {

namespace {

int default_degree(const VectorSpace& space, int degree)
{
    return degree > 0 ? degree : assembly_degree(space.spec().degree + 1, space.spec().degree);
}

// Pushed vector basis of one cell with quadrature weights (including det J).
struct CellVectorData {
    CellGeometry geo;
    VectorBasisEval phi;
    Eigen::VectorXd w;
};

CellVectorData cell_vector_data(const VectorSpace& space, int k, const QuadratureRule& rule, const VectorBasisEval& ref)
{
    CellVectorData d;
    d.geo = cell_geometry(space.mesh().map(k), rule.nodes);
    d.phi = push_vector(ref, d.geo, space.dofs().cell_signs[k]);
    d.w.resize(static_cast<Eigen::Index>(rule.size()));
    for (std::size_t q = 0; q < rule.size(); ++q) d.w[static_cast<Eigen::Index>(q)] = rule.weights[q] * d.geo.dets[q];
    return d;
}

void scatter(const DofMap& rows, const DofMap& cols, int k, const Eigen::MatrixXd& local,
             std::vector<Eigen::Triplet<double>>& triplets)
{
    const auto& r = rows.cell_dofs[k];
    const auto& c = cols.cell_dofs[k];
    for (std::size_t i = 0; i < r.size(); ++i) {
        const int fi = rows.free_index[r[i]];
        if (fi < 0) continue;
        for (std::size_t j = 0; j < c.size(); ++j) {
            const int fj = cols.free_index[c[j]];
            if (fj >= 0) triplets.emplace_back(fi, fj, local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
}

void scatter(const DofMap& rows, int k, const Eigen::VectorXd& local, Eigen::VectorXd& out)
{
    const auto& r = rows.cell_dofs[k];
    for (std::size_t i = 0; i < r.size(); ++i)
        if (const int fi = rows.free_index[r[i]]; fi >= 0) out[fi] += local[static_cast<Eigen::Index>(i)];
}

Eigen::SparseMatrix<double> from_triplets(int rows, int cols, const std::vector<Eigen::Triplet<double>>& t)
{
    Eigen::SparseMatrix<double> m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

template <class Local>
Eigen::SparseMatrix<double> vector_matrix(const VectorSpace& space, int degree, Local&& local)
{
    const QuadratureRule& rule = triangle_rule(degree);
    const VectorBasisEval ref = space.element().eval(rule.nodes);
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < space.mesh().num_cells(); ++k) scatter(space.dofs(), space.dofs(), k, local(cell_vector_data(space, k, rule, ref)), t);
    const int n = space.dofs().num_free;
    return from_triplets(n, n, t);
}

Eigen::MatrixXd mass_local(const CellVectorData& d)
{
    return d.phi.vx.transpose() * d.w.asDiagonal() * d.phi.vx + d.phi.vy.transpose() * d.w.asDiagonal() * d.phi.vy;
}

// Monomials x^a y^b, a + b <= p, about the reference centroid.
Eigen::MatrixXd multiplier_basis(int p, std::span<const Point2> points)
{
    const int n = (p + 1) * (p + 2) / 2;
    Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), n);
    for (std::size_t q = 0; q < points.size(); ++q) {
        const double x = points[q].x() - 1.0 / 3.0, y = points[q].y() - 1.0 / 3.0;
        int col = 0;
        for (int total = 0; total <= p; ++total)
            for (int b = 0; b <= total; ++b) out(static_cast<Eigen::Index>(q), col++) = std::pow(x, total - b) * std::pow(y, b);
    }
    return out;
}

// Pieces of the saddle system that do not depend on the target.
struct SaddleParts {
    Eigen::SparseMatrix<double> mass;      // vector mass over free DOFs
    Eigen::SparseMatrix<double> coupling;  // (q_m, div psi_j)
    Eigen::SparseMatrix<double> mult_mass; // block-diagonal multiplier mass
    Eigen::VectorXd constant_moments;      // (1, q_m)
    int per_cell = 0;
    bool bordered = false;
};

SaddleParts saddle_parts(const VectorSpace& space, int degree)
{
    const QuadratureRule& rule = triangle_rule(degree);
    const VectorBasisEval ref = space.element().eval(rule.nodes);
    const Eigen::MatrixXd qref = multiplier_basis(space.element().divergence_degree(), rule.nodes);
    const Eigen::Index nm = qref.cols();
    const Eigen::VectorXd wref = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));

    SaddleParts parts;
    parts.per_cell = static_cast<int>(nm);
    const int cells = space.mesh().num_cells();
    const int nq = cells * parts.per_cell;
    parts.constant_moments = Eigen::VectorXd::Zero(nq);
    std::vector<Eigen::Triplet<double>> tm, tb, tq;
    for (int k = 0; k < cells; ++k) {
        const CellVectorData d = cell_vector_data(space, k, rule, ref);
        scatter(space.dofs(), space.dofs(), k, mass_local(d), tm);
        // q = q_hat / det J: (q, div psi) = sum w_hat q_hat div psi, det J cancels against dx.
        Eigen::VectorXd inv_det(d.w.size());
        for (Eigen::Index i = 0; i < d.w.size(); ++i) inv_det[i] = 1.0 / d.geo.dets[static_cast<std::size_t>(i)];
        const Eigen::MatrixXd b = qref.transpose() * wref.asDiagonal() * d.phi.div;
        const Eigen::MatrixXd mq = qref.transpose() * (wref.cwiseProduct(inv_det)).asDiagonal() * qref;
        const Eigen::VectorXd c1 = qref.transpose() * wref;
        const auto& dofs = space.dofs().cell_dofs[k];
        for (Eigen::Index m = 0; m < nm; ++m) {
            const int row = k * parts.per_cell + static_cast<int>(m);
            parts.constant_moments[row] = c1[m];
            for (Eigen::Index n = 0; n < nm; ++n) tq.emplace_back(row, k * parts.per_cell + static_cast<int>(n), mq(m, n));
            for (std::size_t j = 0; j < dofs.size(); ++j)
                if (const int fj = space.dofs().free_index[dofs[j]]; fj >= 0) tb.emplace_back(row, fj, b(m, static_cast<Eigen::Index>(j)));
        }
    }
    const int nv = space.dofs().num_free;
    parts.mass = from_triplets(nv, nv, tm);
    parts.coupling = from_triplets(nq, nv, tb);
    parts.mult_mass = from_triplets(nq, nq, tq);
    parts.bordered = space.spec().bc == VectorBC::zero_normal_trace;
    return parts;
}

SaddleSystem assemble_saddle(const SaddleParts& parts, const Eigen::VectorXd& vector_rhs, Eigen::VectorXd constraint)
{
    const int nv = static_cast<int>(parts.mass.rows());
    const int nq = static_cast<int>(parts.coupling.rows());
    Eigen::VectorXd kernel;
    if (parts.bordered) {
        // k = projection of the constant; mult_mass is block diagonal, so solve it cell by cell.
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mq(parts.mult_mass);
        kernel = mq.solve(parts.constant_moments);
        const Eigen::VectorXd mk = parts.mult_mass * kernel;
        constraint -= (constraint.dot(kernel) / kernel.dot(mk)) * mk;
    }

    SaddleSystem sys;
    sys.num_vector = nv;
    sys.num_multiplier = nq;
    sys.bordered = parts.bordered;
    const int n = nv + nq + (parts.bordered ? 1 : 0);
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j < parts.mass.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(parts.mass, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int j = 0; j < parts.coupling.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(parts.coupling, j); it; ++it) {
            t.emplace_back(nv + it.row(), it.col(), it.value());
            t.emplace_back(it.col(), nv + it.row(), it.value());
        }
    if (parts.bordered)
        for (int m = 0; m < nq; ++m) {
            t.emplace_back(n - 1, nv + m, kernel[m]);
            t.emplace_back(nv + m, n - 1, kernel[m]);
        }
    sys.matrix = from_triplets(n, n, t);
    sys.rhs = Eigen::VectorXd::Zero(n);
    sys.rhs.head(nv) = vector_rhs;
    sys.rhs.segment(nv, nq) = constraint;
    return sys;
}

Eigen::VectorXd solve_saddle(const VectorSpace& space, const SaddleSystem& sys)
{
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw std::runtime_error("I_h saddle system is singular: " + lu.lastErrorMessage());
    const Eigen::VectorXd x = lu.solve(sys.rhs);
    if (lu.info() != Eigen::Success) throw std::runtime_error("I_h saddle solve failed");
    return prolong_from_free(space.dofs(), x.head(sys.num_vector));
}

}  // namespace

Eigen::SparseMatrix<double> vector_mass_matrix(const VectorSpace& space, int degree)
{
    return vector_matrix(space, degree, mass_local);
}

Eigen::SparseMatrix<double> div_div_matrix(const VectorSpace& space, int degree)
{
    return vector_matrix(space, degree, [](const CellVectorData& d) -> Eigen::MatrixXd {
        return d.phi.div.transpose() * d.w.asDiagonal() * d.phi.div;
    });
}

Eigen::VectorXd vector_moments(const VectorSpace& space, const VectorField& phi, int degree)
{
    const QuadratureRule& rule = triangle_rule(degree);
    const VectorBasisEval ref = space.element().eval(rule.nodes);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space.dofs().num_free);
    for (int k = 0; k < space.mesh().num_cells(); ++k) {
        const CellVectorData d = cell_vector_data(space, k, rule, ref);
        Eigen::VectorXd fx(d.w.size()), fy(d.w.size());
        for (Eigen::Index q = 0; q < d.w.size(); ++q) {
            const Point2 v = phi(d.geo.points[static_cast<std::size_t>(q)]);
            fx[q] = d.w[q] * v.x();
            fy[q] = d.w[q] * v.y();
        }
        scatter(space.dofs(), k, d.phi.vx.transpose() * fx + d.phi.vy.transpose() * fy, out);
    }
    return out;
}

Eigen::VectorXd div_moments(const VectorSpace& space, const ScalarField& div_field, int degree)
{
    const QuadratureRule& rule = triangle_rule(degree);
    const VectorBasisEval ref = space.element().eval(rule.nodes);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space.dofs().num_free);
    for (int k = 0; k < space.mesh().num_cells(); ++k) {
        const CellVectorData d = cell_vector_data(space, k, rule, ref);
        Eigen::VectorXd f(d.w.size());
        for (Eigen::Index q = 0; q < d.w.size(); ++q) f[q] = d.w[q] * div_field(d.geo.points[static_cast<std::size_t>(q)]);
        scatter(space.dofs(), k, d.phi.div.transpose() * f, out);
    }
    return out;
}

Eigen::VectorXd l2_project(const VectorSpace& space, const VectorField& phi, int degree)
{
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(vector_mass_matrix(space, degree));
    if (llt.info() != Eigen::Success) throw std::runtime_error("vector mass matrix is not positive definite");
    return prolong_from_free(space.dofs(), llt.solve(vector_moments(space, phi, degree)));
}

Eigen::VectorXd l2_project(const ScalarSpace& space, const ScalarField& u, int degree)
{
    const QuadratureRule& rule = triangle_rule(degree);
    const ScalarBasisEval ref = space.element().eval(rule.nodes);
    const int n = space.dofs().num_free;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < space.mesh().num_cells(); ++k) {
        const CellGeometry geo = cell_geometry(space.mesh().map(k), rule.nodes);
        const ScalarBasisEval b = push_scalar(ref, geo);
        Eigen::VectorXd w(static_cast<Eigen::Index>(rule.size())), f(w.size());
        for (Eigen::Index q = 0; q < w.size(); ++q) {
            w[q] = rule.weights[static_cast<std::size_t>(q)] * geo.dets[static_cast<std::size_t>(q)];
            f[q] = w[q] * u(geo.points[static_cast<std::size_t>(q)]);
        }
        scatter(space.dofs(), space.dofs(), k, b.values.transpose() * w.asDiagonal() * b.values, t);
        scatter(space.dofs(), k, b.values.transpose() * f, rhs);
    }
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(from_triplets(n, n, t));
    if (llt.info() != Eigen::Success) throw std::runtime_error("scalar mass matrix is not positive definite");
    return prolong_from_free(space.dofs(), llt.solve(rhs));
}

ProjectionErrors projection_errors(const VectorSpace& space, const Eigen::VectorXd& coeffs, const VectorTarget& target,
                                   int degree)
{
    const QuadratureRule& rule = triangle_rule(degree);
    const VectorBasisEval ref = space.element().eval(rule.nodes);
    double l2 = 0.0, dv = 0.0;
    for (int k = 0; k < space.mesh().num_cells(); ++k) {
        const CellVectorData d = cell_vector_data(space, k, rule, ref);
        const auto& dofs = space.dofs().cell_dofs[k];
        Eigen::VectorXd c(static_cast<Eigen::Index>(dofs.size()));
        for (std::size_t i = 0; i < dofs.size(); ++i) c[static_cast<Eigen::Index>(i)] = coeffs[dofs[i]];
        const Eigen::VectorXd px = d.phi.vx * c, py = d.phi.vy * c, pd = d.phi.div * c;
        for (Eigen::Index q = 0; q < d.w.size(); ++q) {
            const Point2& x = d.geo.points[static_cast<std::size_t>(q)];
            l2 += d.w[q] * (target.phi(x) - Point2(px[q], py[q])).squaredNorm();
            dv += d.w[q] * std::pow(target.div(x) - pd[q], 2);
        }
    }
    return {std::sqrt(l2), std::sqrt(dv)};
}

SaddleSystem build_Ih_system(const VectorSpace& space, const VectorTarget& target, int degree)
{
    degree = default_degree(space, degree);
    const SaddleParts parts = saddle_parts(space, degree);

    const QuadratureRule& rule = triangle_rule(degree);
    const Eigen::MatrixXd qref = multiplier_basis(space.element().divergence_degree(), rule.nodes);
    Eigen::VectorXd constraint(parts.coupling.rows());
    for (int k = 0; k < space.mesh().num_cells(); ++k) {
        const CellGeometry geo = cell_geometry(space.mesh().map(k), rule.nodes);
        Eigen::VectorXd f(static_cast<Eigen::Index>(rule.size()));
        for (std::size_t q = 0; q < rule.size(); ++q) f[static_cast<Eigen::Index>(q)] = rule.weights[q] * target.div(geo.points[q]);
        constraint.segment(k * parts.per_cell, parts.per_cell) = qref.transpose() * f;
    }
    return assemble_saddle(parts, vector_moments(space, target.phi, degree), std::move(constraint));
}

Eigen::VectorXd apply_Ih(const VectorSpace& space, const VectorTarget& target, int degree)
{
    return solve_saddle(space, build_Ih_system(space, target, degree));
}

Eigen::VectorXd apply_Ih(const VectorSpace& space, const Eigen::VectorXd& coeffs, int degree)
{
    if (coeffs.size() != space.num_dofs()) throw std::invalid_argument("apply_Ih: coefficient size does not match the space");
    const SaddleParts parts = saddle_parts(space, default_degree(space, degree));
    const Eigen::VectorXd a = restrict_to_free(space.dofs(), coeffs);
    return solve_saddle(space, assemble_saddle(parts, parts.mass * a, parts.coupling * a));
}

ScalarSpaceSpec curl_potential_spec(const VectorSpaceSpec& spec)
{
    return {spec.family == VectorFamily::RT ? spec.degree : spec.degree + 1,
            spec.bc == VectorBC::zero_normal_trace ? ScalarBC::zero_trace : ScalarBC::none};
}

Eigen::SparseMatrix<double> curl_coupling_matrix(const VectorSpace& space, const ScalarSpace& potentials, int degree)
{
    const QuadratureRule& rule = triangle_rule(degree);
    const VectorBasisEval vref = space.element().eval(rule.nodes);
    const ScalarBasisEval sref = potentials.element().eval(rule.nodes);
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < space.mesh().num_cells(); ++k) {
        const CellVectorData d = cell_vector_data(space, k, rule, vref);
        const ScalarBasisEval s = push_scalar(sref, d.geo);
        const Eigen::MatrixXd local = d.phi.vx.transpose() * d.w.asDiagonal() * s.dy - d.phi.vy.transpose() * d.w.asDiagonal() * s.dx;
        scatter(space.dofs(), potentials.dofs(), k, local, t);
    }
    return from_triplets(space.dofs().num_free, potentials.dofs().num_free, t);
}

Eigen::SparseMatrix<double> curl_coefficients(const VectorSpace& space, const ScalarSpace& potentials)
{
    // curl(mu_hat o F^-1) is the Piola transform of the reference curl, so the
    // reference DOFs of curl_hat mu_hat give the coefficients exactly.
    const LagrangeElement& lagrange = potentials.element();
    const auto reference_curls = [&](std::span<const Point2> pts, Eigen::MatrixXd& fx, Eigen::MatrixXd& fy) {
        const ScalarBasisEval e = lagrange.eval(pts);
        fx = e.dy;
        fy = -e.dx;
    };
    const Eigen::MatrixXd local = space.element().apply_dofs(reference_curls, lagrange.num_dofs());
    const DofMap& vd = space.dofs();
    const DofMap& sd = potentials.dofs();
    std::vector<Eigen::Triplet<double>> t;
    // Shared DOFs get identical values from every cell; keep one copy per entry.
    std::vector<std::vector<std::pair<int, double>>> columns(static_cast<std::size_t>(sd.num_free));
    for (int k = 0; k < space.mesh().num_cells(); ++k) {
        const auto& cv = vd.cell_dofs[k];
        const auto& cs = vd.cell_signs[k];
        const auto& cp = sd.cell_dofs[k];
        for (std::size_t j = 0; j < cp.size(); ++j) {
            const int col = sd.free_index[cp[j]];
            if (col < 0) continue;
            for (std::size_t i = 0; i < cv.size(); ++i) {
                const int row = vd.free_index[cv[i]];
                const double v = cs[i] * local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (row >= 0 && v != 0.0) columns[static_cast<std::size_t>(col)].emplace_back(row, v);
            }
        }
    }
    for (std::size_t col = 0; col < columns.size(); ++col) {
        auto& entries = columns[col];
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (i == 0 || entries[i].first != entries[i - 1].first) t.emplace_back(entries[i].first, static_cast<int>(col), entries[i].second);
    }
    return from_triplets(vd.num_free, sd.num_free, t);
}

HelmholtzSplit helmholtz_split(const VectorSpace& space, const Eigen::VectorXd& coeffs, int degree)
{
    if (coeffs.size() != space.num_dofs()) throw std::invalid_argument("helmholtz_split: coefficient size does not match the space");
    degree = default_degree(space, degree);
    const ScalarSpace potentials(space.mesh_ptr(), curl_potential_spec(space.spec()));
    const Eigen::SparseMatrix<double> coupling = curl_coupling_matrix(space, potentials, degree);
    const Eigen::VectorXd a = restrict_to_free(space.dofs(), coeffs);

    // (curl mu, curl nu) = (phi_h, curl nu); |curl mu| = |grad mu| so this is the Laplace stiffness.
    const QuadratureRule& rule = triangle_rule(degree);
    const ScalarBasisEval sref = potentials.element().eval(rule.nodes);
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < space.mesh().num_cells(); ++k) {
        const CellGeometry geo = cell_geometry(space.mesh().map(k), rule.nodes);
        const ScalarBasisEval s = push_scalar(sref, geo);
        Eigen::VectorXd w(static_cast<Eigen::Index>(rule.size()));
        for (Eigen::Index q = 0; q < w.size(); ++q) w[q] = rule.weights[static_cast<std::size_t>(q)] * geo.dets[static_cast<std::size_t>(q)];
        scatter(potentials.dofs(), potentials.dofs(), k,
                s.dx.transpose() * w.asDiagonal() * s.dx + s.dy.transpose() * w.asDiagonal() * s.dy, t);
    }
    const int ns = potentials.dofs().num_free;
    const bool pinned = potentials.spec().bc == ScalarBC::none;
    // Without a trace condition the constants are curl-free; border with the all-ones vector.
    if (pinned)
        for (int i = 0; i < ns; ++i) {
            t.emplace_back(ns, i, 1.0);
            t.emplace_back(i, ns, 1.0);
        }
    const int n = ns + (pinned ? 1 : 0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs.head(ns) = coupling.transpose() * a;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(from_triplets(n, n, t));
    if (lu.info() != Eigen::Success) throw std::runtime_error("curl potential system is singular");
    const Eigen::VectorXd mu = lu.solve(rhs).head(ns);

    const Eigen::VectorXd curl = curl_coefficients(space, potentials) * mu;

    HelmholtzSplit out;
    out.potential = prolong_from_free(potentials.dofs(), mu);
    out.curl_part = prolong_from_free(space.dofs(), curl);
    out.remainder = prolong_from_free(space.dofs(), a - curl);
    return out;
}

}  // namespace fosls
