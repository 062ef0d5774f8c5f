#include "fosls/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fosls {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a)
{
    while (a > kPi) a -= 2 * kPi;
    while (a <= -kPi) a += 2 * kPi;
    return a;
}

double signed_area(const Point2& a, const Point2& b, const Point2& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double spectral_norm(const Mat2& m)
{
    Eigen::JacobiSVD<Mat2> svd(m);
    return svd.singularValues()(0);
}

// Terms of the endpoint expansion of the blend function.
constexpr int kSeriesTerms = 16;
// Below this distance to s = +-1 the blend is evaluated by its Taylor series.
constexpr double kSeriesZone = 0.05;

}  // namespace

bool ReferenceTriangle::contains(const Point2& p, double tol)
{
    return p.x() >= -tol && p.y() >= -tol && p.x() + p.y() <= 1.0 + tol;
}

ElementMap ElementMap::affine(const std::array<Point2, 3>& v)
{
    ElementMap m;
    m.kind_ = Kind::affine;
    m.v_ = v;
    m.affine_jac_.col(0) = v[1] - v[0];
    m.affine_jac_.col(1) = v[2] - v[0];
    return m;
}

ElementMap ElementMap::arc_blended(const std::array<Point2, 3>& v, double theta1, double theta2,
                                   double radius)
{
    ElementMap m = affine(v);
    m.kind_ = Kind::arc_blended;
    m.radius_ = radius;
    m.half_angle_ = 0.5 * wrap_angle(theta2 - theta1);
    m.mid_angle_ = theta1 + m.half_angle_;
    return m;
}

Point2 ElementMap::arc_point(double s) const
{
    const double t = mid_angle_ + s * half_angle_;
    return radius_ * Point2(std::cos(t), std::sin(t));
}

ElementMap::Blend ElementMap::blend(double s) const
{
    const Point2 half_chord = 0.5 * (v_[2] - v_[1]);
    const double a = half_angle_;
    if (std::abs(s) <= 1.0 - kSeriesZone) {
        const double t = mid_angle_ + s * a;
        const Point2 gamma = radius_ * Point2(std::cos(t), std::sin(t));
        const Point2 dgamma = radius_ * a * Point2(-std::sin(t), std::cos(t));
        const Point2 d = gamma - (0.5 * (v_[1] + v_[2]) + s * half_chord);
        const Point2 dd = dgamma - half_chord;
        const double q = 1.0 - s * s;
        return {4.0 * d / q, 4.0 * (dd * q + 2.0 * s * d) / (q * q)};
    }
    // Expand d(s) = gamma(s) - chord(s) around the nearest endpoint sigma,
    // where d(sigma) = 0, and divide the series by 1 - s^2 = -u (u + 2 sigma).
    const double sigma = s > 0 ? 1.0 : -1.0;
    const double u = s - sigma;
    const double t0 = mid_angle_ + sigma * a;
    Point2 series = Point2::Zero();
    Point2 dseries = Point2::Zero();
    double ak = 1.0;
    double fact = 1.0;
    for (int k = 1; k <= kSeriesTerms; ++k) {
        ak *= a;
        fact *= k;
        const double phase = t0 + k * kPi / 2;
        Point2 deriv = radius_ * ak * Point2(std::cos(phase), std::sin(phase));
        if (k == 1) deriv -= half_chord;
        series += deriv * std::pow(u, k - 1) / fact;
        if (k >= 2) dseries += deriv * (k - 1) * std::pow(u, k - 2) / fact;
    }
    const double w = u + 2.0 * sigma;
    return {-4.0 * series / w, -4.0 * (dseries * w - series) / (w * w)};
}

Point2 ElementMap::eval_unchecked(const Point2& ref) const
{
    Point2 x = v_[0] + affine_jac_ * ref;
    if (kind_ == Kind::arc_blended) {
        const double xy = ref.x() * ref.y();
        if (xy != 0.0) x += xy * blend(ref.y() - ref.x()).g;
    }
    return x;
}

Mat2 ElementMap::jacobian_unchecked(const Point2& ref) const
{
    Mat2 j = affine_jac_;
    if (kind_ == Kind::arc_blended) {
        const auto [g, dg] = blend(ref.y() - ref.x());
        const double xy = ref.x() * ref.y();
        j.col(0) += ref.y() * g - xy * dg;
        j.col(1) += ref.x() * g + xy * dg;
    }
    return j;
}

Point2 ElementMap::eval(const Point2& ref) const
{
    if (!ReferenceTriangle::contains(ref))
        throw std::domain_error("ElementMap::eval: point outside the reference triangle");
    return eval_unchecked(ref);
}

Mat2 ElementMap::jacobian(const Point2& ref) const
{
    if (!ReferenceTriangle::contains(ref))
        throw std::domain_error("ElementMap::jacobian: point outside the reference triangle");
    return jacobian_unchecked(ref);
}

std::optional<Point2> ElementMap::inverse(const Point2& x, double tol) const
{
    Point2 ref = affine_jac_.inverse() * (x - v_[0]);
    if (kind_ == Kind::arc_blended) {
        const double scale = affine_jac_.norm();
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            // Keep the iterate in the region where the blend is defined.
            const Point2 clamped(std::clamp(ref.x(), -0.5, 1.5), std::clamp(ref.y(), -0.5, 1.5));
            ref = clamped;
            const Point2 r = eval_unchecked(ref) - x;
            const Point2 step = jacobian_unchecked(ref).partialPivLu().solve(r);
            ref -= step;
            if (step.norm() < 1e-15 || r.norm() < 1e-15 * scale) {
                converged = true;
                break;
            }
        }
        if (!converged) return std::nullopt;
    }
    if (!ReferenceTriangle::contains(ref, tol)) return std::nullopt;
    return ref;
}

Mesh::Mesh(std::vector<Point2> vertices, std::vector<double> boundary_angles,
           std::vector<std::array<int, 3>> triangles, int level)
    : vertices_(std::move(vertices)),
      boundary_angles_(std::move(boundary_angles)),
      triangles_(std::move(triangles)),
      level_(level)
{
    if (boundary_angles_.size() != vertices_.size())
        throw std::invalid_argument("Mesh: boundary angle list does not match vertex list");

    // Put the (unique) boundary edge of each cell opposite local vertex 0.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : triangles_) {
        for (const auto& le : kLocalEdges) {
            const int a = t[le[0]], b = t[le[1]];
            ++edge_count[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (auto& t : triangles_) {
        int boundary_local = -1;
        int count = 0;
        for (int e = 0; e < 3; ++e) {
            const int a = t[kLocalEdges[e][0]], b = t[kLocalEdges[e][1]];
            if (edge_count[{std::min(a, b), std::max(a, b)}] == 1) {
                boundary_local = e;
                ++count;
            }
        }
        if (count > 1)
            throw std::invalid_argument("Mesh: a triangle has more than one boundary edge");
        if (boundary_local > 0) std::rotate(t.begin(), t.begin() + boundary_local, t.end());
    }

    build_edges();

    maps_.reserve(triangles_.size());
    for (int k = 0; k < num_cells(); ++k) {
        const auto& t = triangles_[k];
        const std::array<Point2, 3> v{vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
        if (edges_[cell_edges_[k][0]].on_boundary()) {
            maps_.push_back(ElementMap::arc_blended(v, boundary_angles_[t[1]], boundary_angles_[t[2]]));
        } else {
            maps_.push_back(ElementMap::affine(v));
        }
    }
    check_invariants();
}

void Mesh::build_edges()
{
    std::map<std::pair<int, int>, int> index;
    cell_edges_.assign(triangles_.size(), {-1, -1, -1});
    for (int k = 0; k < num_cells(); ++k) {
        for (int e = 0; e < 3; ++e) {
            const int a = triangles_[k][kLocalEdges[e][0]];
            const int b = triangles_[k][kLocalEdges[e][1]];
            const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
            auto [it, inserted] = index.try_emplace(key, static_cast<int>(edges_.size()));
            if (inserted) {
                MeshEdge edge;
                edge.vertices = {key.first, key.second};
                edge.cells[0] = k;
                edge.local_index[0] = e;
                edges_.push_back(edge);
            } else {
                MeshEdge& edge = edges_[it->second];
                if (edge.cells[1] >= 0)
                    throw std::invalid_argument("Mesh: edge shared by more than two triangles");
                edge.cells[1] = k;
                edge.local_index[1] = e;
            }
            cell_edges_[k][e] = it->second;
        }
    }
}

void Mesh::check_invariants() const
{
    for (int k = 0; k < num_cells(); ++k) {
        const auto& t = triangles_[k];
        if (signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]) <= 0.0)
            throw std::invalid_argument("Mesh: triangle " + std::to_string(k) + " is not counterclockwise");
    }
    for (const auto& e : edges_) {
        if (!e.on_boundary()) continue;
        for (int v : e.vertices) {
            if (!is_boundary_vertex(v))
                throw std::invalid_argument("Mesh: boundary edge endpoint without boundary angle");
        }
    }
    for (int i = 0; i < num_vertices(); ++i) {
        if (is_boundary_vertex(i) && std::abs(vertices_[i].squaredNorm() - 1.0) > 1e-13)
            throw std::invalid_argument("Mesh: boundary vertex off the unit circle");
    }
}

int Mesh::num_boundary_edges() const
{
    return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                          [](const MeshEdge& e) { return e.on_boundary(); }));
}

bool Mesh::is_boundary_vertex(int i) const
{
    return !std::isnan(boundary_angles_[i]);
}

double Mesh::cell_diameter(int k) const
{
    const ElementMap& m = maps_[k];
    std::vector<Point2> pts(m.vertices().begin(), m.vertices().end());
    if (m.is_curved()) {
        constexpr int n = 32;
        for (int i = 1; i < n; ++i) pts.push_back(m.arc_point(-1.0 + 2.0 * i / n));
    }
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

double Mesh::h() const
{
    double h = 0.0;
    for (int k = 0; k < num_cells(); ++k) h = std::max(h, cell_diameter(k));
    return h;
}

void Mesh::write(std::ostream& os) const
{
    os.precision(17);
    os << "vertices " << num_vertices() << '\n';
    for (const auto& v : vertices_) os << v.x() << ' ' << v.y() << '\n';
    os << "triangles " << num_cells() << '\n';
    for (const auto& t : triangles_) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "boundary_edges " << num_boundary_edges() << '\n';
    for (const auto& e : edges_)
        if (e.on_boundary()) os << e.vertices[0] << ' ' << e.vertices[1] << '\n';
}

Mesh build_coarse_disk_mesh(int n_fan)
{
    if (n_fan < 3) throw std::invalid_argument("build_coarse_disk_mesh: n_fan must be >= 3");
    std::vector<Point2> vertices{Point2(0, 0)};
    std::vector<double> angles{std::numeric_limits<double>::quiet_NaN()};
    for (int k = 0; k < n_fan; ++k) {
        const double theta = 2 * kPi * k / n_fan;
        vertices.emplace_back(std::cos(theta), std::sin(theta));
        angles.push_back(theta);
    }
    std::vector<std::array<int, 3>> triangles;
    for (int k = 0; k < n_fan; ++k) triangles.push_back({0, 1 + k, 1 + (k + 1) % n_fan});
    return Mesh(std::move(vertices), std::move(angles), std::move(triangles), 0);
}

Mesh refine_uniform(const Mesh& mesh)
{
    std::vector<Point2> vertices = mesh.vertices();
    std::vector<double> angles(vertices.size());
    for (int i = 0; i < mesh.num_vertices(); ++i) angles[i] = mesh.boundary_angle(i);

    std::vector<int> midpoint(mesh.num_edges());
    for (int i = 0; i < mesh.num_edges(); ++i) {
        const MeshEdge& e = mesh.edge(i);
        const int a = e.vertices[0], b = e.vertices[1];
        midpoint[i] = static_cast<int>(vertices.size());
        if (e.on_boundary()) {
            const double ta = mesh.boundary_angle(a);
            const double theta = ta + 0.5 * wrap_angle(mesh.boundary_angle(b) - ta);
            vertices.emplace_back(std::cos(theta), std::sin(theta));
            angles.push_back(theta);
        } else {
            vertices.push_back(0.5 * (mesh.vertex(a) + mesh.vertex(b)));
            angles.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(4 * mesh.num_cells());
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto& t = mesh.cell(k);
        // Local edge e is opposite local vertex e.
        const int m12 = midpoint[mesh.cell_edge(k, 0)];
        const int m02 = midpoint[mesh.cell_edge(k, 1)];
        const int m01 = midpoint[mesh.cell_edge(k, 2)];
        triangles.push_back({t[0], m01, m02});
        triangles.push_back({m01, t[1], m12});
        triangles.push_back({m02, m12, t[2]});
        triangles.push_back({m12, m02, m01});
    }
    return Mesh(std::move(vertices), std::move(angles), std::move(triangles), mesh.level() + 1);
}

Mesh build_disk_mesh(int n_fan, int level)
{
    Mesh mesh = build_coarse_disk_mesh(n_fan);
    for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
    return mesh;
}

MapConstants map_constants(const Mesh& mesh)
{
    MapConstants c;
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const double hk = mesh.cell_diameter(k);
        const Mat2& a = mesh.map(k).affine_jacobian();
        c.max_scaled_norm = std::max(c.max_scaled_norm, spectral_norm(a) / hk);
        c.max_scaled_inverse_norm = std::max(c.max_scaled_inverse_norm, hk * spectral_norm(a.inverse()));
    }
    return c;
}

}  // namespace fosls
