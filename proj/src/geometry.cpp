#include "dh2/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace dh2 {

bool Box::contains(const Vec3& p, double tol) const {
    for (int k = 0; k < 3; ++k)
        if (p[k] < lo[k] - tol || p[k] > hi[k] + tol)
            return false;
    return true;
}

void Box::include(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
}

Box Box::empty() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Box{Vec3::Constant(inf), Vec3::Constant(-inf)};
}

double box_distance(const Box& a, const Box& b) {
    double d2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double gap = std::max({0.0, a.lo[k] - b.hi[k], b.lo[k] - a.hi[k]});
        d2 += gap * gap;
    }
    return std::sqrt(d2);
}

Panel::Panel(const Vec3& p0, const Vec3& p1, const Vec3& p2) : corner{p0, p1, p2} {
    area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
    diameter = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
    barycenter = (p0 + p1 + p2) / 3.0;
}

Box Panel::bounding_box() const {
    Box b = Box::empty();
    for (const auto& c : corner)
        b.include(c);
    return b;
}

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    panels_.reserve(triangles_.size());
    for (const auto& t : triangles_) {
        for (auto v : t)
            if (v >= vertices_.size())
                throw std::invalid_argument("SurfaceMesh: vertex index out of range");
        Panel p(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
        if (!(p.area > 0.0))
            throw std::invalid_argument("SurfaceMesh: degenerate panel");
        panels_.push_back(p);
    }
}

bool SurfaceMesh::is_closed() const {
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (const auto& t : triangles_)
        for (int k = 0; k < 3; ++k) {
            auto a = t[k], b = t[(k + 1) % 3];
            ++edges[{std::min(a, b), std::max(a, b)}];
        }
    return !edges.empty() &&
           std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
}

Box SurfaceMesh::bounding_box() const {
    Box b = Box::empty();
    for (const auto& v : vertices_)
        b.include(v);
    return b;
}

SurfaceMesh build_sphere_mesh(int refinement_level) {
    if (refinement_level < 0)
        throw std::invalid_argument("build_sphere_mesh: negative refinement level");
    const long N = 1L << refinement_level;

    // lattice points of the octahedron faces have coordinates in (1/N) Z
    std::map<std::tuple<long, long, long>, std::size_t> index;
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    triangles.reserve(8 * N * N);

    auto vertex = [&](const Eigen::Vector3i& A, const Eigen::Vector3i& B, const Eigen::Vector3i& C,
                      long i, long j) {
        const Eigen::Matrix<long, 3, 1> p =
            (N - i - j) * A.cast<long>() + i * B.cast<long>() + j * C.cast<long>();
        auto key = std::make_tuple(p[0], p[1], p[2]);
        auto it = index.find(key);
        if (it != index.end())
            return it->second;
        Vec3 x = p.cast<double>() / double(N);
        vertices.push_back(x.normalized());
        index.emplace(key, vertices.size() - 1);
        return vertices.size() - 1;
    };

    for (int sx : {1, -1})
        for (int sy : {1, -1})
            for (int sz : {1, -1}) {
                Eigen::Vector3i A(sx, 0, 0), B(0, sy, 0), C(0, 0, sz);
                if (sx * sy * sz < 0)
                    std::swap(B, C);  // outward orientation
                for (long j = 0; j < N; ++j)
                    for (long i = 0; i + j < N; ++i) {
                        triangles.push_back(
                            {vertex(A, B, C, i, j), vertex(A, B, C, i + 1, j), vertex(A, B, C, i, j + 1)});
                        if (i + j + 1 < N)
                            triangles.push_back({vertex(A, B, C, i + 1, j), vertex(A, B, C, i + 1, j + 1),
                                                 vertex(A, B, C, i, j + 1)});
                    }
            }
    return SurfaceMesh(std::move(vertices), std::move(triangles));
}

double point_triangle_distance(const Vec3& p, const Panel& t) {
    // closest point on triangle, region classification (Ericson, RTCD 5.1.5)
    const Vec3& a = t.corner[0];
    const Vec3& b = t.corner[1];
    const Vec3& c = t.corner[2];
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0)
        return (p - a).norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3)
        return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0)
        return (p - (a + d1 / (d1 - d3) * ab)).norm();
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6)
        return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0)
        return (p - (a + d2 / (d2 - d6) * ac)).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0, t = 0;
    if (a <= 0 && e <= 0)
        return r.norm();
    if (a <= 0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0) {
                t = 0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1) {
                t = 1;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

double triangle_distance(const Panel& a, const Panel& b) {
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        d = std::min(d, point_triangle_distance(a.corner[k], b));
        d = std::min(d, point_triangle_distance(b.corner[k], a));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            d = std::min(d, segment_distance(a.corner[i], a.corner[(i + 1) % 3], b.corner[j],
                                             b.corner[(j + 1) % 3]));
    return d;
}

MeshMetrics mesh_metrics(const SurfaceMesh& mesh) {
    const std::size_t n = mesh.size();
    if (n < 2)
        throw std::invalid_argument("mesh_metrics: h_min undefined for fewer than two panels");

    MeshMetrics m;
    m.c_sr = std::numeric_limits<double>::infinity();
    double reach = 0.0;
    for (const auto& p : mesh.panels()) {
        m.h_max = std::max(m.h_max, p.diameter);
        const double r = p.area / (p.diameter * p.diameter);
        m.c_sr = std::min(m.c_sr, r);
        m.C_sr = std::max(m.C_sr, r);
        for (const auto& c : p.corner)
            reach = std::max(reach, (c - p.barycenter).norm());
    }

    // sweep over barycenters sorted along x; a pair with barycentric x-gap g
    // is at least g - 2 reach apart
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) {
        return mesh.panel(i).barycenter.x() < mesh.panel(j).barycenter.x();
    });
    const auto& tri = mesh.triangles();
    auto touching = [&](std::size_t i, std::size_t j) {
        for (auto u : tri[i])
            for (auto v : tri[j])
                if (u == v)
                    return true;
        return false;
    };
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
        const auto i = order[a];
        const Panel& pi = mesh.panel(i);
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto j = order[b];
            const Panel& pj = mesh.panel(j);
            if (pj.barycenter.x() - pi.barycenter.x() - 2 * reach > best)
                break;
            if (touching(i, j))
                continue;
            if ((pj.barycenter - pi.barycenter).norm() - 2 * reach > best)
                continue;
            best = std::min(best, triangle_distance(pi, pj));
        }
    }
    if (!std::isfinite(best))
        throw std::invalid_argument("mesh_metrics: no pair of non-touching panels");
    m.h_min = best;
    m.C_qu = m.h_max / m.h_min;
    return m;
}

void write_mesh(std::ostream& os, const SurfaceMesh& mesh) {
    os << mesh.vertex_count() << ' ' << mesh.size() << '\n';
    os << std::setprecision(17);
    for (const auto& v : mesh.vertices())
        os << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const auto& t : mesh.triangles())
        os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

SurfaceMesh read_mesh(std::istream& is) {
    std::size_t nv = 0, np = 0;
    if (!(is >> nv >> np))
        throw std::runtime_error("read_mesh: bad header");
    std::vector<Vec3> vertices(nv);
    for (auto& v : vertices)
        if (!(is >> v[0] >> v[1] >> v[2]))
            throw std::runtime_error("read_mesh: truncated vertex list");
    std::vector<Triangle> triangles(np);
    for (auto& t : triangles)
        if (!(is >> t[0] >> t[1] >> t[2]))
            throw std::runtime_error("read_mesh: truncated panel list");
    return SurfaceMesh(std::move(vertices), std::move(triangles));
}

}  // namespace dh2
