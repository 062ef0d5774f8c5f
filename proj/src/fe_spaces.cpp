#include "fosls/fe_spaces.hpp"

#include "fosls/polynomials.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace fosls {

std::string to_string(VectorFamily family)
{
    return family == VectorFamily::RT ? "RT" : "BDM";
}

VectorFamily parse_family(const std::string& name)
{
    if (name == "RT" || name == "rt") return VectorFamily::RT;
    if (name == "BDM" || name == "bdm") return VectorFamily::BDM;
    throw std::invalid_argument("unknown vector family '" + name + "' (expected RT or BDM)");
}

// ---------------------------------------------------------------------------
// Lagrange

LagrangeElement::LagrangeElement(int degree) : degree_(degree)
{
    if (degree < 1 || degree > kMaxScalarDegree)
        throw std::invalid_argument("LagrangeElement: degree must be in [1, " + std::to_string(kMaxScalarDegree) + "]");
    const auto verts = ReferenceTriangle::vertices();
    nodes_.assign(verts.begin(), verts.end());
    for (const auto& le : kLocalEdges) {
        for (int k = 1; k < degree; ++k)
            nodes_.push_back(verts[le[0]] + (static_cast<double>(k) / degree) * (verts[le[1]] - verts[le[0]]));
    }
    for (int j = 1; j < degree; ++j)
        for (int i = 1; i + j < degree; ++i) nodes_.emplace_back(static_cast<double>(i) / degree, static_cast<double>(j) / degree);

    const PrimeBasis prime = dubiner_basis(degree, nodes_);
    coeffs_ = prime.values.inverse();
}

ScalarBasisEval LagrangeElement::eval(std::span<const Point2> points) const
{
    const PrimeBasis prime = dubiner_basis(degree_, points);
    return {prime.values * coeffs_, prime.dx * coeffs_, prime.dy * coeffs_};
}

// ---------------------------------------------------------------------------
// H(div)

namespace {

int hdiv_dim(VectorFamily family, int degree)
{
    return family == VectorFamily::RT ? degree * (degree + 2) : (degree + 1) * (degree + 2);
}

Point2 rot_cw(const Point2& t)
{
    return {t.y(), -t.x()};
}

}  // namespace

HdivElement::HdivElement(VectorFamily family, int degree)
    : family_(family), degree_(degree), num_dofs_(hdiv_dim(family, degree))
{
    if (degree < 1 || degree > kMaxVectorDegree)
        throw std::invalid_argument("HdivElement: degree must be in [1, " + std::to_string(kMaxVectorDegree) + "]");

    const int n = num_dofs_;
    FieldBatch prime_fields = [this](std::span<const Point2> pts, Eigen::MatrixXd& fx, Eigen::MatrixXd& fy) {
        VectorBasisEval e = eval_prime(pts);
        fx = std::move(e.vx);
        fy = std::move(e.vy);
    };
    const Eigen::MatrixXd vandermonde = apply_dofs(prime_fields, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(vandermonde);
    const auto& sv = svd.singularValues();
    condition_ = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!std::isfinite(condition_) || condition_ > 1e12)
        throw std::logic_error("HdivElement: degrees of freedom are not unisolvent");
    coeffs_ = vandermonde.inverse();
}

VectorBasisEval HdivElement::eval_prime(std::span<const Point2> points) const
{
    const int np = static_cast<int>(points.size());
    const int k = family_ == VectorFamily::RT ? degree_ - 1 : degree_;
    const int nk = dim_p(k);
    const PrimeBasis b = dubiner_basis(k, points);
    VectorBasisEval e{Eigen::MatrixXd::Zero(np, num_dofs_), Eigen::MatrixXd::Zero(np, num_dofs_),
                      Eigen::MatrixXd::Zero(np, num_dofs_)};
    e.vx.leftCols(nk) = b.values;
    e.div.leftCols(nk) = b.dx;
    e.vy.middleCols(nk, nk) = b.values;
    e.div.middleCols(nk, nk) = b.dy;
    if (family_ == VectorFamily::RT) {
        // x * psi for psi of exact degree k.
        const int first = dim_p(k - 1);
        for (int j = first, col = 2 * nk; j < nk; ++j, ++col) {
            for (int q = 0; q < np; ++q) {
                const double x = points[q].x(), y = points[q].y();
                e.vx(q, col) = x * b.values(q, j);
                e.vy(q, col) = y * b.values(q, j);
                e.div(q, col) = 2.0 * b.values(q, j) + x * b.dx(q, j) + y * b.dy(q, j);
            }
        }
    }
    return e;
}

VectorBasisEval HdivElement::eval(std::span<const Point2> points) const
{
    const VectorBasisEval p = eval_prime(points);
    return {p.vx * coeffs_, p.vy * coeffs_, p.div * coeffs_};
}

Eigen::MatrixXd HdivElement::apply_dofs(const FieldBatch& field, int num_fields) const
{
    Eigen::MatrixXd out(num_dofs_, num_fields);
    const auto verts = ReferenceTriangle::vertices();
    const LineRule line = gauss_legendre(degree_ + 3);
    const int ne = dofs_per_edge();

    std::vector<Point2> pts(line.nodes.size());
    Eigen::MatrixXd fx, fy;
    for (int e = 0; e < 3; ++e) {
        const Point2 a = verts[kLocalEdges[e][0]];
        const Point2 b = verts[kLocalEdges[e][1]];
        const Point2 nu = rot_cw(b - a);
        for (std::size_t q = 0; q < pts.size(); ++q) pts[q] = a + line.nodes[q] * (b - a);
        field(pts, fx, fy);
        for (int k = 0; k < ne; ++k) {
            Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(num_fields);
            for (std::size_t q = 0; q < pts.size(); ++q) {
                const double w = line.weights[q] * legendre(k, 2.0 * line.nodes[q] - 1.0);
                acc += w * (nu.x() * fx.row(q) + nu.y() * fy.row(q));
            }
            out.row(e * ne + k) = acc;
        }
    }

    const int ni = num_interior_dofs();
    if (ni == 0) return out;
    const QuadratureRule& rule = triangle_rule(2 * degree_ + 2);
    field(rule.nodes, fx, fy);
    // Interior test functions.
    const int np = static_cast<int>(rule.size());
    Eigen::MatrixXd qx = Eigen::MatrixXd::Zero(np, ni), qy = Eigen::MatrixXd::Zero(np, ni);
    const int kk = family_ == VectorFamily::RT ? degree_ - 2 : degree_ - 2;
    const int nk = dim_p(kk);
    const PrimeBasis b = dubiner_basis(std::max(kk, 0), rule.nodes);
    qx.leftCols(nk) = b.values.leftCols(nk);
    qy.middleCols(nk, nk) = b.values.leftCols(nk);
    if (family_ == VectorFamily::BDM) {
        const int first = dim_p(kk - 1);
        for (int j = first, col = 2 * nk; j < nk; ++j, ++col) {
            for (int q = 0; q < np; ++q) {
                qx(q, col) = -rule.nodes[q].y() * b.values(q, j);
                qy(q, col) = rule.nodes[q].x() * b.values(q, j);
            }
        }
    }
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), np);
    out.bottomRows(ni) = qx.transpose() * w.asDiagonal() * fx + qy.transpose() * w.asDiagonal() * fy;
    return out;
}

ScalarBasisEval eval_scalar_basis(const ScalarSpaceSpec& spec, std::span<const Point2> points)
{
    return LagrangeElement(spec.degree).eval(points);
}

VectorBasisEval eval_vector_basis(const VectorSpaceSpec& spec, std::span<const Point2> points)
{
    return HdivElement(spec.family, spec.degree).eval(points);
}

PiolaValue piola_push_forward(const ElementMap& map, const Point2& ref, const Point2& ref_value, double ref_div)
{
    const Mat2 j = map.jacobian(ref);
    const double det = j.determinant();
    if (!(det > 0.0)) throw std::domain_error("piola_push_forward: singular or inverted Jacobian");
    return {j * ref_value / det, ref_div / det};
}

// ---------------------------------------------------------------------------
// DOF maps

namespace {

void finalize_free(DofMap& d)
{
    d.free_index.assign(d.num_dofs, -1);
    d.num_free = 0;
    for (int i = 0; i < d.num_dofs; ++i)
        if (!d.constrained[i]) d.free_index[i] = d.num_free++;
}

}  // namespace

DofMap build_dof_map(const Mesh& mesh, const ScalarSpaceSpec& spec)
{
    const LagrangeElement elem(spec.degree);
    const int p = spec.degree;
    const int pe = p - 1;
    const int ni = elem.num_interior_dofs();
    const int edge_offset = mesh.num_vertices();
    const int interior_offset = edge_offset + mesh.num_edges() * pe;

    DofMap d;
    d.num_dofs = interior_offset + mesh.num_cells() * ni;
    d.constrained.assign(d.num_dofs, 0);
    d.cell_dofs.resize(mesh.num_cells());
    d.cell_signs.assign(mesh.num_cells(), std::vector<double>(elem.num_dofs(), 1.0));
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto& t = mesh.cell(k);
        auto& dofs = d.cell_dofs[k];
        dofs.reserve(elem.num_dofs());
        for (int v = 0; v < 3; ++v) dofs.push_back(t[v]);
        for (int e = 0; e < 3; ++e) {
            const int ge = mesh.cell_edge(k, e);
            const bool reversed = t[kLocalEdges[e][0]] > t[kLocalEdges[e][1]];
            for (int j = 0; j < pe; ++j) dofs.push_back(edge_offset + ge * pe + (reversed ? pe - 1 - j : j));
        }
        for (int j = 0; j < ni; ++j) dofs.push_back(interior_offset + k * ni + j);
    }
    if (spec.bc == ScalarBC::zero_trace) {
        for (int ge = 0; ge < mesh.num_edges(); ++ge) {
            const MeshEdge& e = mesh.edge(ge);
            if (!e.on_boundary()) continue;
            d.constrained[e.vertices[0]] = 1;
            d.constrained[e.vertices[1]] = 1;
            for (int j = 0; j < pe; ++j) d.constrained[edge_offset + ge * pe + j] = 1;
        }
    }
    finalize_free(d);
    return d;
}

DofMap build_dof_map(const Mesh& mesh, const VectorSpaceSpec& spec)
{
    const HdivElement elem(spec.family, spec.degree);
    const int ne = elem.dofs_per_edge();
    const int ni = elem.num_interior_dofs();
    const int interior_offset = mesh.num_edges() * ne;

    DofMap d;
    d.num_dofs = interior_offset + mesh.num_cells() * ni;
    d.constrained.assign(d.num_dofs, 0);
    d.cell_dofs.resize(mesh.num_cells());
    d.cell_signs.resize(mesh.num_cells());
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto& t = mesh.cell(k);
        auto& dofs = d.cell_dofs[k];
        auto& signs = d.cell_signs[k];
        for (int e = 0; e < 3; ++e) {
            const int ge = mesh.cell_edge(k, e);
            const bool reversed = t[kLocalEdges[e][0]] > t[kLocalEdges[e][1]];
            for (int j = 0; j < ne; ++j) {
                dofs.push_back(ge * ne + j);
                // Reversing the edge flips the normal and maps L_j(s) to L_j(-s).
                signs.push_back(reversed ? (j % 2 == 0 ? -1.0 : 1.0) : 1.0);
            }
        }
        for (int j = 0; j < ni; ++j) {
            dofs.push_back(interior_offset + k * ni + j);
            signs.push_back(1.0);
        }
    }
    if (spec.bc == VectorBC::zero_normal_trace) {
        for (int ge = 0; ge < mesh.num_edges(); ++ge) {
            if (!mesh.edge(ge).on_boundary()) continue;
            for (int j = 0; j < ne; ++j) d.constrained[ge * ne + j] = 1;
        }
    }
    finalize_free(d);
    return d;
}

// ---------------------------------------------------------------------------
// Physical evaluation

CellGeometry cell_geometry(const ElementMap& map, std::span<const Point2> ref_points)
{
    CellGeometry g;
    g.points.reserve(ref_points.size());
    g.jacobians.reserve(ref_points.size());
    g.dets.reserve(ref_points.size());
    for (const Point2& r : ref_points) {
        g.points.push_back(map.eval_unchecked(r));
        const Mat2 j = map.jacobian_unchecked(r);
        const double det = j.determinant();
        if (!(det > 0.0)) throw std::domain_error("cell_geometry: nonpositive Jacobian determinant");
        g.jacobians.push_back(j);
        g.dets.push_back(det);
    }
    return g;
}

ScalarBasisEval push_scalar(const ScalarBasisEval& ref, const CellGeometry& geo)
{
    ScalarBasisEval out{ref.values, Eigen::MatrixXd(ref.dx.rows(), ref.dx.cols()),
                        Eigen::MatrixXd(ref.dy.rows(), ref.dy.cols())};
    for (Eigen::Index q = 0; q < ref.values.rows(); ++q) {
        // grad u = J^{-T} grad_hat u_hat
        const Mat2 jit = geo.jacobians[q].inverse().transpose();
        out.dx.row(q) = jit(0, 0) * ref.dx.row(q) + jit(0, 1) * ref.dy.row(q);
        out.dy.row(q) = jit(1, 0) * ref.dx.row(q) + jit(1, 1) * ref.dy.row(q);
    }
    return out;
}

VectorBasisEval push_vector(const VectorBasisEval& ref, const CellGeometry& geo, std::span<const double> signs)
{
    VectorBasisEval out{Eigen::MatrixXd(ref.vx.rows(), ref.vx.cols()), Eigen::MatrixXd(ref.vy.rows(), ref.vy.cols()),
                        Eigen::MatrixXd(ref.div.rows(), ref.div.cols())};
    const Eigen::Map<const Eigen::RowVectorXd> s(signs.data(), static_cast<Eigen::Index>(signs.size()));
    for (Eigen::Index q = 0; q < ref.vx.rows(); ++q) {
        const Mat2& j = geo.jacobians[q];
        const double inv_det = 1.0 / geo.dets[q];
        out.vx.row(q) = (inv_det * (j(0, 0) * ref.vx.row(q) + j(0, 1) * ref.vy.row(q))).cwiseProduct(s);
        out.vy.row(q) = (inv_det * (j(1, 0) * ref.vx.row(q) + j(1, 1) * ref.vy.row(q))).cwiseProduct(s);
        out.div.row(q) = (inv_det * ref.div.row(q)).cwiseProduct(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spaces

ScalarSpace::ScalarSpace(std::shared_ptr<const Mesh> mesh, ScalarSpaceSpec spec)
    : mesh_(std::move(mesh)), spec_(spec), element_(spec.degree), dofs_(build_dof_map(*mesh_, spec))
{
}

Eigen::VectorXd ScalarSpace::interpolate(const std::function<double(const Point2&)>& u) const
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dofs_.num_dofs);
    for (int k = 0; k < mesh_->num_cells(); ++k) {
        const ElementMap& map = mesh_->map(k);
        const auto& cd = dofs_.cell_dofs[k];
        for (int i = 0; i < element_.num_dofs(); ++i) c[cd[i]] = u(map.eval_unchecked(element_.nodes()[i]));
    }
    for (int i = 0; i < dofs_.num_dofs; ++i)
        if (dofs_.constrained[i]) c[i] = 0.0;
    return c;
}

VectorSpace::VectorSpace(std::shared_ptr<const Mesh> mesh, VectorSpaceSpec spec)
    : mesh_(std::move(mesh)), spec_(spec), element_(spec.family, spec.degree), dofs_(build_dof_map(*mesh_, spec))
{
}

Eigen::VectorXd VectorSpace::interpolate(const std::function<Point2(const Point2&)>& phi) const
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dofs_.num_dofs);
    for (int k = 0; k < mesh_->num_cells(); ++k) {
        const ElementMap& map = mesh_->map(k);
        // Pullback: phi_hat = det(J) J^{-1} phi o F.
        auto pullback = [&](std::span<const Point2> pts, Eigen::MatrixXd& fx, Eigen::MatrixXd& fy) {
            fx.resize(static_cast<Eigen::Index>(pts.size()), 1);
            fy.resize(static_cast<Eigen::Index>(pts.size()), 1);
            for (std::size_t q = 0; q < pts.size(); ++q) {
                const Mat2 j = map.jacobian_unchecked(pts[q]);
                const Point2 v = j.determinant() * j.inverse() * phi(map.eval_unchecked(pts[q]));
                fx(static_cast<Eigen::Index>(q), 0) = v.x();
                fy(static_cast<Eigen::Index>(q), 0) = v.y();
            }
        };
        const Eigen::MatrixXd local = element_.apply_dofs(pullback, 1);
        const auto& cd = dofs_.cell_dofs[k];
        const auto& cs = dofs_.cell_signs[k];
        for (int i = 0; i < element_.num_dofs(); ++i) c[cd[i]] = cs[i] * local(i, 0);
    }
    for (int i = 0; i < dofs_.num_dofs; ++i)
        if (dofs_.constrained[i]) c[i] = 0.0;
    return c;
}

Eigen::VectorXd restrict_to_free(const DofMap& dofs, const Eigen::VectorXd& full)
{
    Eigen::VectorXd out(dofs.num_free);
    for (int i = 0; i < dofs.num_dofs; ++i)
        if (dofs.free_index[i] >= 0) out[dofs.free_index[i]] = full[i];
    return out;
}

Eigen::VectorXd prolong_from_free(const DofMap& dofs, const Eigen::VectorXd& free)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.num_dofs);
    for (int i = 0; i < dofs.num_dofs; ++i)
        if (dofs.free_index[i] >= 0) out[i] = free[dofs.free_index[i]];
    return out;
}

}  // namespace fosls
