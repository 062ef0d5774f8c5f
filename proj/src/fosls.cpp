#include "fosls/fosls.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fosls {

void ProblemConfig::validate() const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be a positive finite number");
    if (ps < 1 || ps > kMaxScalarDegree)
        throw std::invalid_argument("scalar degree p_s must lie in 1.." + std::to_string(kMaxScalarDegree));
    if (pv < 1 || pv > kMaxVectorDegree)
        throw std::invalid_argument("vector degree p_v must lie in 1.." + std::to_string(kMaxVectorDegree));
    for (int q : {assembly_quadrature, error_quadrature})
        if (q < 0 || q > kMaxTriangleDegree)
            throw std::invalid_argument("quadrature degree must lie in 1.." + std::to_string(kMaxTriangleDegree) + " (0 = default)");
}

ScalarSpaceSpec ProblemConfig::scalar_spec() const
{
    return {ps, bc == BoundaryCondition::dirichlet ? ScalarBC::zero_trace : ScalarBC::none};
}

VectorSpaceSpec ProblemConfig::vector_spec() const
{
    return {family, pv, bc == BoundaryCondition::neumann ? VectorBC::zero_normal_trace : VectorBC::none};
}

int ProblemConfig::assembly_degree() const
{
    return assembly_quadrature > 0 ? assembly_quadrature : fosls::assembly_degree(ps, pv);
}

int ProblemConfig::error_degree() const
{
    return error_quadrature > 0 ? error_quadrature : fosls::error_degree(ps, pv);
}

namespace {

const ProblemConfig& validated(const ProblemConfig& c)
{
    c.validate();
    return c;
}

}  // namespace

FoslsSpaces::FoslsSpaces(std::shared_ptr<const Mesh> mesh, const ProblemConfig& config)
    : mesh_(mesh), config_(validated(config)), phi_(mesh, config.vector_spec()), u_(mesh, config.scalar_spec())
{
}

Eigen::VectorXd FoslsSpaces::pack(const Eigen::VectorXd& phi_full, const Eigen::VectorXd& u_full) const
{
    Eigen::VectorXd x(num_free());
    x.head(num_phi_free()) = restrict_to_free(phi_.dofs(), phi_full);
    x.tail(num_u_free()) = restrict_to_free(u_.dofs(), u_full);
    return x;
}

void FoslsSpaces::unpack(const Eigen::VectorXd& x, Eigen::VectorXd& phi_full, Eigen::VectorXd& u_full) const
{
    if (x.size() != num_free()) throw std::invalid_argument("unpack: vector size does not match the free DOF count");
    phi_full = prolong_from_free(phi_.dofs(), x.head(num_phi_free()));
    u_full = prolong_from_free(u_.dofs(), x.tail(num_u_free()));
}

ReferenceBasis reference_basis(const FoslsSpaces& spaces, std::span<const Point2> points)
{
    return {std::vector<Point2>(points.begin(), points.end()), spaces.u_space().element().eval(points),
            spaces.phi_space().element().eval(points)};
}

CellBasis push_cell(const FoslsSpaces& spaces, int cell, const ReferenceBasis& ref)
{
    CellBasis out;
    out.geo = cell_geometry(spaces.mesh().map(cell), ref.points);
    out.u = push_scalar(ref.u, out.geo);
    out.phi = push_vector(ref.phi, out.geo, spaces.phi_space().dofs().cell_signs[cell]);
    return out;
}

QuadratureRule cell_rule(const ElementMap& map, const QuadratureRule& base, std::optional<double> discontinuity)
{
    if (discontinuity && cell_crosses_circle(map, *discontinuity)) return circle_adapted_rule(map, base, *discontinuity);
    return base;
}

namespace {

Eigen::VectorXd quadrature_weights(const QuadratureRule& rule, const CellGeometry& geo)
{
    Eigen::VectorXd w(static_cast<Eigen::Index>(rule.size()));
    for (std::size_t q = 0; q < rule.size(); ++q) w[static_cast<Eigen::Index>(q)] = rule.weights[q] * geo.dets[q];
    return w;
}

// Rows: [div phi + gamma u; phi_x + u_x; phi_y + u_y] at the quadrature points,
// columns: local phi functions then local u functions.
Eigen::MatrixXd residual_operator(const CellBasis& b, double gamma)
{
    const Eigen::Index nq = b.u.values.rows();
    const Eigen::Index nv = b.phi.vx.cols();
    const Eigen::Index ns = b.u.values.cols();
    Eigen::MatrixXd r(3 * nq, nv + ns);
    r.block(0, 0, nq, nv) = b.phi.div;
    r.block(0, nv, nq, ns) = gamma * b.u.values;
    r.block(nq, 0, nq, nv) = b.phi.vx;
    r.block(nq, nv, nq, ns) = b.u.dx;
    r.block(2 * nq, 0, nq, nv) = b.phi.vy;
    r.block(2 * nq, nv, nq, ns) = b.u.dy;
    return r;
}

// Free-unknown index of each local function of a cell (-1 if constrained).
std::vector<int> cell_unknowns(const FoslsSpaces& spaces, int cell)
{
    const DofMap& vd = spaces.phi_space().dofs();
    const DofMap& sd = spaces.u_space().dofs();
    std::vector<int> idx;
    for (int g : vd.cell_dofs[cell]) idx.push_back(vd.free_index[g]);
    for (int g : sd.cell_dofs[cell]) idx.push_back(sd.free_index[g] < 0 ? -1 : spaces.num_phi_free() + sd.free_index[g]);
    return idx;
}

// (f, div psi + gamma v) contributions of one cell.
Eigen::VectorXd cell_load(const FoslsSpaces& spaces, int k, const QuadratureRule& rule, const ReferenceBasis& ref,
                          const ScalarField& f)
{
    const CellBasis b = push_cell(spaces, k, ref);
    const Eigen::VectorXd w = quadrature_weights(rule, b.geo);
    Eigen::VectorXd fw(w.size());
    for (Eigen::Index q = 0; q < w.size(); ++q) fw[q] = w[q] * f(b.geo.points[static_cast<std::size_t>(q)]);
    const double gamma = spaces.config().gamma;
    Eigen::VectorXd out(b.phi.div.cols() + b.u.values.cols());
    out << b.phi.div.transpose() * fw, gamma * (b.u.values.transpose() * fw);
    return out;
}

}  // namespace

FoslsSystem assemble(const FoslsSpaces& spaces, const ScalarField& f, std::optional<double> discontinuity)
{
    const Mesh& mesh = spaces.mesh();
    const double gamma = spaces.config().gamma;
    const QuadratureRule& rule = triangle_rule(spaces.config().assembly_degree());
    const ReferenceBasis ref = reference_basis(spaces, rule.nodes);

    FoslsSystem sys;
    sys.num_phi = spaces.num_phi_free();
    sys.num_u = spaces.num_u_free();
    const int n = spaces.num_free();
    sys.load = Eigen::VectorXd::Zero(n);

    std::vector<Eigen::Triplet<double>> triplets;
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const CellBasis b = push_cell(spaces, k, ref);
        const Eigen::VectorXd w = quadrature_weights(rule, b.geo);
        const Eigen::MatrixXd r = residual_operator(b, gamma);
        const Eigen::Index nq = w.size();
        Eigen::VectorXd w3(3 * nq);
        w3 << w, w, w;
        const Eigen::MatrixXd local = r.transpose() * w3.asDiagonal() * r;

        Eigen::VectorXd load;
        if (discontinuity && cell_crosses_circle(mesh.map(k), *discontinuity)) {
            const QuadratureRule cut = circle_adapted_rule(mesh.map(k), rule, *discontinuity);
            load = cell_load(spaces, k, cut, reference_basis(spaces, cut.nodes), f);
        } else {
            Eigen::VectorXd fw(nq);
            for (Eigen::Index q = 0; q < nq; ++q) fw[q] = w[q] * f(b.geo.points[static_cast<std::size_t>(q)]);
            load = r.topRows(nq).transpose() * fw;
        }

        const std::vector<int> idx = cell_unknowns(spaces, k);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0) continue;
            sys.load[idx[i]] += load[static_cast<Eigen::Index>(i)];
            for (std::size_t j = 0; j < idx.size(); ++j)
                if (idx[j] >= 0) triplets.emplace_back(idx[i], idx[j], local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();
    return sys;
}

SolutionPair::SolutionPair(std::shared_ptr<const FoslsSpaces> spaces, Eigen::VectorXd phi, Eigen::VectorXd u, SolverReport report)
    : spaces_(std::move(spaces)), phi_(std::move(phi)), u_(std::move(u)), report_(std::move(report))
{
    if (phi_.size() != spaces_->phi_space().num_dofs() || u_.size() != spaces_->u_space().num_dofs())
        throw std::invalid_argument("SolutionPair: coefficient sizes do not match the spaces");
}

FieldValues cell_field_values(const FoslsSpaces& spaces, int cell, const CellBasis& b, const Eigen::VectorXd& phi,
                              const Eigen::VectorXd& u_coeffs)
{
    const auto& vd = spaces.phi_space().dofs().cell_dofs[cell];
    const auto& sd = spaces.u_space().dofs().cell_dofs[cell];
    Eigen::VectorXd cv(static_cast<Eigen::Index>(vd.size())), cs(static_cast<Eigen::Index>(sd.size()));
    for (std::size_t i = 0; i < vd.size(); ++i) cv[static_cast<Eigen::Index>(i)] = phi[vd[i]];
    for (std::size_t i = 0; i < sd.size(); ++i) cs[static_cast<Eigen::Index>(i)] = u_coeffs[sd[i]];
    const Eigen::VectorXd u = b.u.values * cs, ux = b.u.dx * cs, uy = b.u.dy * cs;
    const Eigen::VectorXd px = b.phi.vx * cv, py = b.phi.vy * cv, dv = b.phi.div * cv;
    FieldValues out;
    for (Eigen::Index q = 0; q < u.size(); ++q) {
        out.u.push_back(u[q]);
        out.grad_u.emplace_back(ux[q], uy[q]);
        out.phi.emplace_back(px[q], py[q]);
        out.div_phi.push_back(dv[q]);
    }
    return out;
}

FieldValues SolutionPair::evaluate_cell(int cell, const CellBasis& b) const
{
    return cell_field_values(*spaces_, cell, b, phi_, u_);
}

FieldValues SolutionPair::evaluate(std::span<const Point2> points) const
{
    FieldValues out;
    for (const Point2& x : points) {
        const auto loc = locate_point(spaces_->mesh(), x);
        if (!loc) throw std::domain_error("evaluate: point outside the domain");
        const std::vector<Point2> ref{loc->ref};
        const FieldValues v = evaluate_cell(loc->cell, push_cell(*spaces_, loc->cell, reference_basis(*spaces_, ref)));
        out.u.push_back(v.u[0]);
        out.grad_u.push_back(v.grad_u[0]);
        out.phi.push_back(v.phi[0]);
        out.div_phi.push_back(v.div_phi[0]);
    }
    return out;
}

std::optional<PointLocation> locate_point(const Mesh& mesh, const Point2& x)
{
    if (x.squaredNorm() > 1.0 + 1e-12) return std::nullopt;
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const ElementMap& map = mesh.map(k);
        const auto& v = map.vertices();
        Point2 lo = v[0].cwiseMin(v[1]).cwiseMin(v[2]);
        Point2 hi = v[0].cwiseMax(v[1]).cwiseMax(v[2]);
        // Curved cells bulge past their vertex box by at most the arc's sagitta.
        const double margin = map.is_curved() ? 0.15 * (v[2] - v[1]).norm() + 1e-12 : 1e-12;
        lo.array() -= margin;
        hi.array() += margin;
        if ((x.array() < lo.array()).any() || (x.array() > hi.array()).any()) continue;
        if (const auto ref = map.inverse(x)) return PointLocation{k, *ref};
    }
    return std::nullopt;
}

namespace {

double residual_norm(const FoslsSystem& system, const Eigen::VectorXd& x)
{
    const double fn = system.load.norm();
    const double rn = (system.load - system.matrix * x).norm();
    return fn > 0.0 ? rn / fn : rn;
}

}  // namespace

SolutionPair solve(std::shared_ptr<const FoslsSpaces> spaces, const FoslsSystem& system, const SolverOptions& options)
{
    const int n = static_cast<int>(system.load.size());
    if (system.matrix.rows() != n || n != spaces->num_free())
        throw std::invalid_argument("solve: system size does not match the spaces");
    using Method = SolverOptions::Method;
    const bool direct = options.method == Method::cholesky || (options.method == Method::automatic && n <= options.direct_limit);

    SolverReport report;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    const auto cholesky = [&] {
        report.method = "cholesky";
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt(system.matrix);
        if (llt.info() != Eigen::Success) throw SolverError("sparse Cholesky failed: matrix not positive definite", report);
        x = llt.solve(system.load);
        report.iterations = 1;
        // Iterative refinement against the assembled matrix.
        for (int step = 0; step < 3 && residual_norm(system, x) > 1e-13; ++step) {
            x += llt.solve(system.load - system.matrix * x);
            ++report.iterations;
        }
    };
    if (n > 0 && direct) {
        cholesky();
    } else if (n > 0) {
        report.method = "jacobi-cg";
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
        cg.setTolerance(options.cg_tolerance);
        cg.setMaxIterations(options.cg_max_iterations);
        cg.compute(system.matrix);
        x = cg.solve(system.load);
        report.iterations = static_cast<int>(cg.iterations());
        if (cg.info() != Eigen::Success) {
            report.relative_residual = residual_norm(system, x);
            if (options.method == Method::cg)
                throw SolverError("CG did not converge after " + std::to_string(report.iterations) +
                                      " iterations (relative residual " + std::to_string(report.relative_residual) + ")",
                                  report);
            // Jacobi-CG stalls on high-order systems; factorize instead.
            cholesky();
            report.method = "jacobi-cg+cholesky";
        }
    } else {
        report.method = "empty";
    }
    report.relative_residual = residual_norm(system, x);
    Eigen::VectorXd phi, u;
    spaces->unpack(x, phi, u);
    return SolutionPair(std::move(spaces), std::move(phi), std::move(u), report);
}

PairFields exact_pair(const ManufacturedCase& c)
{
    return {[c](const Point2& x) { return c.phi(x); }, [c](const Point2& x) { return c.div_phi(x); }, c.u, c.grad_u};
}

double b_energy(const Mesh& mesh, double gamma, const PairFields& pair, int degree, std::optional<double> discontinuity)
{
    const QuadratureRule& base = triangle_rule(degree);
    double total = 0.0;
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const QuadratureRule rule = cell_rule(mesh.map(k), base, discontinuity);
        const CellGeometry geo = cell_geometry(mesh.map(k), rule.nodes);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point2& x = geo.points[q];
            const double a = pair.div_phi(x) + gamma * pair.u(x);
            const Point2 g = pair.grad_u(x) + pair.phi(x);
            total += rule.weights[q] * geo.dets[q] * (a * a + g.squaredNorm());
        }
    }
    return total;
}

namespace {

// Sum over cells of sum_q w_q * integrand(values at q).
template <class Integrand>
double integrate_discrete(const FoslsSpaces& spaces, const Eigen::VectorXd& phi, const Eigen::VectorXd& u, Integrand&& g)
{
    const QuadratureRule& rule = triangle_rule(spaces.config().assembly_degree());
    const ReferenceBasis ref = reference_basis(spaces, rule.nodes);
    double total = 0.0;
    for (int k = 0; k < spaces.mesh().num_cells(); ++k) {
        const CellBasis b = push_cell(spaces, k, ref);
        const FieldValues v = cell_field_values(spaces, k, b, phi, u);
        for (std::size_t q = 0; q < rule.size(); ++q)
            total += rule.weights[q] * b.geo.dets[q] * g(v.u[q], v.grad_u[q], v.phi[q], v.div_phi[q]);
    }
    return total;
}

}  // namespace

double b_energy(const FoslsSpaces& spaces, const Eigen::VectorXd& phi, const Eigen::VectorXd& u)
{
    const double gamma = spaces.config().gamma;
    return integrate_discrete(spaces, phi, u, [gamma](double uq, const Point2& gu, const Point2& pq, double dq) {
        const double a = dq + gamma * uq;
        return a * a + (gu + pq).squaredNorm();
    });
}

double product_norm_squared(const FoslsSpaces& spaces, const Eigen::VectorXd& phi, const Eigen::VectorXd& u)
{
    return integrate_discrete(spaces, phi, u, [](double uq, const Point2& gu, const Point2& pq, double dq) {
        return uq * uq + gu.squaredNorm() + pq.squaredNorm() + dq * dq;
    });
}

GalerkinResidual galerkin_residual(const FoslsSystem& system, const Eigen::VectorXd& x)
{
    const Eigen::VectorXd r = system.load - system.matrix * x;
    GalerkinResidual out;
    const double fn = system.load.norm();
    const double fmax = system.load.cwiseAbs().maxCoeff();
    out.relative_norm = fn > 0.0 ? r.norm() / fn : r.norm();
    out.max_scaled = fmax > 0.0 ? r.cwiseAbs().maxCoeff() / fmax : r.cwiseAbs().maxCoeff();
    return out;
}

Eigen::VectorXd consistency_residual(const FoslsSpaces& spaces, const ScalarField& f, const PairFields& pair,
                                     std::optional<double> discontinuity)
{
    const Mesh& mesh = spaces.mesh();
    const double gamma = spaces.config().gamma;
    const QuadratureRule& base = triangle_rule(spaces.config().assembly_degree());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(spaces.num_free());
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const QuadratureRule rule = cell_rule(mesh.map(k), base, discontinuity);
        const CellBasis b = push_cell(spaces, k, reference_basis(spaces, rule.nodes));
        const Eigen::VectorXd w = quadrature_weights(rule, b.geo);
        const Eigen::MatrixXd r = residual_operator(b, gamma);
        const Eigen::Index nq = w.size();
        // Integrand: (f - div phi - gamma u) * (row 0) - (grad u + phi) . (rows 1, 2)
        Eigen::VectorXd coef(3 * nq);
        for (Eigen::Index q = 0; q < nq; ++q) {
            const Point2& x = b.geo.points[static_cast<std::size_t>(q)];
            const Point2 g = pair.grad_u(x) + pair.phi(x);
            coef[q] = w[q] * (f(x) - pair.div_phi(x) - gamma * pair.u(x));
            coef[nq + q] = -w[q] * g.x();
            coef[2 * nq + q] = -w[q] * g.y();
        }
        const Eigen::VectorXd local = r.transpose() * coef;
        const std::vector<int> idx = cell_unknowns(spaces, k);
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (idx[i] >= 0) out[idx[i]] += local[static_cast<Eigen::Index>(i)];
    }
    return out;
}

void write_coordinate(std::ostream& os, const Eigen::SparseMatrix<double>& matrix)
{
    const auto precision = os.precision(17);
    for (int j = 0; j < matrix.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, j); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    os.precision(precision);
}

}  // namespace fosls
