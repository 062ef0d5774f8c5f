#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace fosls {

using Point2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// The reference simplex with vertices (0,0), (1,0), (0,1).
struct ReferenceTriangle {
    static constexpr double area = 0.5;
    static std::array<Point2, 3> vertices() { return {Point2(0, 0), Point2(1, 0), Point2(0, 1)}; }
    /// True if `p` lies in the closed triangle, up to `tol`.
    static bool contains(const Point2& p, double tol = 1e-12);
};

/// Local edge `e` joins the two local vertices other than `e`, ordered
/// increasingly: e0 = (1,2), e1 = (0,2), e2 = (0,1).
constexpr std::array<std::array<int, 2>, 3> kLocalEdges{{{1, 2}, {0, 2}, {0, 1}}};

/// Element map F_K from the reference triangle to a physical cell.
///
/// Affine cells use F(x) = v0 + [v1-v0, v2-v0] x. Arc-blended cells carry one
/// curved edge, local edge 0 (v1 -> v2), which lies on the circle of radius
/// `radius` centered at the origin. The blend
///
///     F(x, y) = A(x, y) + x y g(y - x),   g(s) = 4 (gamma(s) - chord(s)) / (1 - s^2)
///
/// is affine on the two straight edges and reproduces the arc exactly on the
/// curved one. `g` is analytic on [-1, 1], so F is smooth up to the vertices.
class ElementMap {
public:
    enum class Kind { affine, arc_blended };

    static ElementMap affine(const std::array<Point2, 3>& v);
    /// `theta1`, `theta2` are the polar angles of v1 and v2 on the circle; the
    /// shorter arc between them is used.
    static ElementMap arc_blended(const std::array<Point2, 3>& v, double theta1, double theta2,
                                  double radius = 1.0);

    Kind kind() const { return kind_; }
    bool is_curved() const { return kind_ == Kind::arc_blended; }
    const std::array<Point2, 3>& vertices() const { return v_; }

    /// Throws std::domain_error if `ref` is outside the closed reference triangle.
    Point2 eval(const Point2& ref) const;
    Mat2 jacobian(const Point2& ref) const;

    /// Same as eval/jacobian without the domain check (used by Newton iterations).
    Point2 eval_unchecked(const Point2& ref) const;
    Mat2 jacobian_unchecked(const Point2& ref) const;

    /// The affine part A_K'.
    const Mat2& affine_jacobian() const { return affine_jac_; }

    /// Newton inversion of the map; returns the reference point if it lies in
    /// the closed reference triangle up to `tol`.
    std::optional<Point2> inverse(const Point2& x, double tol = 1e-10) const;

    /// Point on the curved edge for s in [-1, 1] (s = -1 at v1, s = 1 at v2).
    Point2 arc_point(double s) const;

private:
    struct Blend {
        Point2 g;
        Point2 dg;
    };
    Blend blend(double s) const;

    Kind kind_ = Kind::affine;
    std::array<Point2, 3> v_;
    Mat2 affine_jac_;
    double radius_ = 1.0;
    double mid_angle_ = 0.0;
    double half_angle_ = 0.0;
};

struct MeshEdge {
    std::array<int, 2> vertices;        // global orientation: low -> high index
    std::array<int, 2> cells{-1, -1};   // incident triangles (second is -1 on the boundary)
    std::array<int, 2> local_index{-1, -1};
    bool on_boundary() const { return cells[1] < 0; }
};

/// Conforming triangulation of the unit disk. Immutable after construction.
class Mesh {
public:
    /// Assembles a mesh from raw data; boundary angles are NaN for interior
    /// vertices. Cells are reordered so that a boundary edge, if any, is local
    /// edge 0. Throws std::invalid_argument on invariant violations.
    Mesh(std::vector<Point2> vertices, std::vector<double> boundary_angles,
         std::vector<std::array<int, 3>> triangles, int level);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_boundary_edges() const;
    int level() const { return level_; }

    const std::vector<Point2>& vertices() const { return vertices_; }
    const Point2& vertex(int i) const { return vertices_[i]; }
    bool is_boundary_vertex(int i) const;
    double boundary_angle(int i) const { return boundary_angles_[i]; }

    const std::array<int, 3>& cell(int k) const { return triangles_[k]; }
    /// Global edge index of local edge `e` of cell `k`.
    int cell_edge(int k, int e) const { return cell_edges_[k][e]; }
    const MeshEdge& edge(int i) const { return edges_[i]; }
    const ElementMap& map(int k) const { return maps_[k]; }

    /// Diameter of cell k (curved edges sampled).
    double cell_diameter(int k) const;
    /// Maximum cell diameter.
    double h() const;

    /// Writes vertices, triangles and boundary edges as plain text.
    void write(std::ostream& os) const;

private:
    void build_edges();
    void check_invariants() const;

    std::vector<Point2> vertices_;
    std::vector<double> boundary_angles_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 3>> cell_edges_;
    std::vector<MeshEdge> edges_;
    std::vector<ElementMap> maps_;
    int level_ = 0;
};

/// Fan of `n_fan` triangles around the origin; throws for n_fan < 3.
Mesh build_coarse_disk_mesh(int n_fan);

/// Red refinement; boundary midpoints are projected radially onto the circle.
Mesh refine_uniform(const Mesh& mesh);

/// `n_fan` fan refined `level` times.
Mesh build_disk_mesh(int n_fan, int level);

/// Shape-regularity constants of the assumption F_K = R_K o A_K.
struct MapConstants {
    double max_scaled_norm = 0.0;          // max_K ||A_K'|| / h_K
    double max_scaled_inverse_norm = 0.0;  // max_K h_K ||(A_K')^{-1}||
};
MapConstants map_constants(const Mesh& mesh);

}  // namespace fosls
