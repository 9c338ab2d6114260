#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace dh2 {

using Vec3 = Eigen::Vector3d;
using complex = std::complex<double>;

//
// Axis-parallel box [lo, hi].
//
struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 width() const { return hi - lo; }
    double diameter() const { return (hi - lo).norm(); }

    bool contains(const Vec3& p, double tol = 0.0) const;
    void include(const Vec3& p);

    static Box empty();
};

// Euclidean distance between two boxes (componentwise gap).
double box_distance(const Box& a, const Box& b);

//
// Flat triangle with the affine element map
//   chi(x1, x2) = p0 + x1 (p1 - p0) + x2 (p2 - p1)
// from the reference triangle {0 <= x2 <= x1 <= 1}.
//
struct Panel {
    std::array<Vec3, 3> corner;
    double area = 0.0;
    double diameter = 0.0;
    Vec3 barycenter = Vec3::Zero();

    Panel() = default;
    Panel(const Vec3& p0, const Vec3& p1, const Vec3& p2);

    Vec3 map(double x1, double x2) const {
        return corner[0] + x1 * (corner[1] - corner[0]) + x2 * (corner[2] - corner[1]);
    }
    Box bounding_box() const;
};

using Triangle = std::array<std::size_t, 3>;

//
// Triangulated closed surface. Immutable after construction.
//
class SurfaceMesh {
public:
    SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

    std::size_t size() const { return panels_.size(); }
    std::size_t vertex_count() const { return vertices_.size(); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Panel& panel(std::size_t i) const { return panels_[i]; }
    const std::vector<Panel>& panels() const { return panels_; }

    // every edge shared by exactly two panels
    bool is_closed() const;

    Box bounding_box() const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Panel> panels_;
};

struct MeshMetrics {
    double h_max = 0.0;   // maximal panel diameter h_G
    double h_min = 0.0;   // minimal distance of non-touching panels
    double c_sr = 0.0;    // min |tau| / h_tau^2
    double C_sr = 0.0;    // max |tau| / h_tau^2
    double C_qu = 0.0;    // h_max / h_min
};

// Octahedron {|x1|+|x2|+|x3| = 1} with `refinement_level` uniform 4-way
// refinements of its faces, vertices projected to the unit sphere.
SurfaceMesh build_sphere_mesh(int refinement_level);

MeshMetrics mesh_metrics(const SurfaceMesh& mesh);

double point_triangle_distance(const Vec3& p, const Panel& t);
double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);
// exact distance of two disjoint triangles
double triangle_distance(const Panel& a, const Panel& b);

// Plain-text format: "nv np", nv lines of coordinates, np lines of 0-based triples.
void write_mesh(std::ostream& os, const SurfaceMesh& mesh);
SurfaceMesh read_mesh(std::istream& is);

}  // namespace dh2
