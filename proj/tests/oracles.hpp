#pragma once

// Independent reference computations for the tests. Nothing here uses the
// library's quadrature rules.

#include <cmath>
#include <array>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec3 = Eigen::Vector3d;
using complex = std::complex<double>;

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
inline void gauss01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 - t);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

struct Rule01 {
    std::vector<double> x, w;
};

inline const Rule01& gauss01_cached(int n) {
    static std::map<int, Rule01> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        Rule01 r;
        gauss01(n, r.x, r.w);
        it = cache.emplace(n, std::move(r)).first;
    }
    return it->second;
}

// Integral of f over the triangle (a, b, c): the triangle is split into
// 4^levels congruent pieces, each with a collapsed n x n Gauss rule.
template <typename F>
auto triangle_integral(const F& f, const Vec3& a, const Vec3& b, const Vec3& c, int levels, int n) {
    std::vector<double> x, w;
    gauss01(n, x, w);
    using R = decltype(f(a));
    R sum{};
    std::vector<std::array<Vec3, 3>> tris{{a, b, c}};
    for (int l = 0; l < levels; ++l) {
        std::vector<std::array<Vec3, 3>> next;
        for (const auto& t : tris) {
            const Vec3 ab = 0.5 * (t[0] + t[1]), bc = 0.5 * (t[1] + t[2]), ca = 0.5 * (t[2] + t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({ab, t[1], bc});
            next.push_back({ca, bc, t[2]});
            next.push_back({bc, ca, ab});
        }
        tris.swap(next);
    }
    for (const auto& t : tris) {
        const double area2 = (t[1] - t[0]).cross(t[2] - t[0]).norm();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                // (u, v) = (x_i, x_i x_j) covers the reference triangle, Jacobian u
                const double u = x[i], v = x[i] * x[j];
                const Vec3 p = t[0] + u * (t[1] - t[0]) + v * (t[2] - t[1]);
                sum += (w[i] * w[j] * u * area2) * f(p);
            }
    }
    return sum;
}

// R ((1 - e^{-w}) / w - 1), w = zeta R, without cancellation for small w
inline complex remainder_term(complex zeta, double R) {
    const complex w = zeta * R;
    if (std::abs(w) < 0.1) {
        complex s = 0.0, t = 1.0;
        // (1 - e^{-w})/w - 1 = sum_{k>=1} (-w)^k / (k+1)!
        double fact = 1.0;
        for (int k = 1; k <= 12; ++k) {
            t *= -w;
            fact *= (k + 1);
            s += t / fact;
        }
        return R * s;
    }
    return (1.0 - std::exp(-w)) / zeta - R;
}

// int_T e^{-zeta |x-y|} / |x-y| dy for x in the plane of T, in polar
// coordinates around x. Each edge at distance d contributes
//   d (asinh(t_b/d) - asinh(t_a/d))                          (Laplace part)
//   + int_{t_a}^{t_b} d g(R) / R^2 dt,  R = sqrt(d^2 + t^2)
// with g(R) = (1 - e^{-zeta R})/zeta - R. The remainder is integrated along
// the edge (dphi = d dt / R^2), split at the foot point, since in the angle it
// gets steep for x close to the edge.
inline complex polar_inner(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c, complex zeta, int n = 24) {
    const auto& [gx, gw] = gauss01_cached(n);
    const Vec3 v[3] = {a, b, c};
    const Vec3 normal = (b - a).cross(c - a).normalized();
    auto remainder = [&](double d, double t0, double t1) {
        complex r = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = t0 + (t1 - t0) * gx[i];
            const double R2 = d * d + t * t;
            r += gw[i] * d * remainder_term(zeta, std::sqrt(R2)) / R2;
        }
        return (t1 - t0) * r;
    };
    complex total = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Vec3& p = v[k];
        const Vec3& q = v[(k + 1) % 3];
        const Vec3 e = (q - p).normalized();
        const Vec3 foot = p + e * (x - p).dot(e);
        const double d = (foot - x).norm();
        if (d < 1e-15)
            continue;
        // positive if x sees the edge counter-clockwise
        const double sgn = ((p - x).cross(q - x)).dot(normal) > 0 ? 1.0 : -1.0;
        const double ta = (p - foot).dot(e), tb = (q - foot).dot(e);
        complex s = d * (std::asinh(tb / d) - std::asinh(ta / d));
        if (std::abs(zeta) > 0) {
            if (ta < 0 && tb > 0)
                s += remainder(d, ta, 0.0) + remainder(d, 0.0, tb);
            else
                s += remainder(d, ta, tb);
        }
        total += sgn * s;
    }
    return total;
}

// Integral of f over T with subdivision graded towards the boundary of T:
// sub-triangles touching the boundary are split `depth` times, all others
// get the collapsed n x n rule.
template <typename F>
complex graded_integral(const F& f, const Vec3& a, const Vec3& b, const Vec3& c, int depth, int n) {
    std::vector<double> x, w;
    gauss01(n, x, w);
    using Bary = Eigen::Vector3d;
    auto point = [&](const Bary& l) { return Vec3(l[0] * a + l[1] * b + l[2] * c); };
    const double area2 = (b - a).cross(c - a).norm();
    complex sum = 0.0;
    std::vector<std::pair<std::array<Bary, 3>, int>> stack{{{Bary(1, 0, 0), Bary(0, 1, 0), Bary(0, 0, 1)}, 0}};
    while (!stack.empty()) {
        auto [t, lvl] = stack.back();
        stack.pop_back();
        bool boundary = false;
        for (const auto& l : t)
            boundary = boundary || l.minCoeff() < 1e-14;
        if (boundary && lvl < depth) {
            const Bary ab = 0.5 * (t[0] + t[1]), bc = 0.5 * (t[1] + t[2]), ca = 0.5 * (t[2] + t[0]);
            stack.push_back({{t[0], ab, ca}, lvl + 1});
            stack.push_back({{ab, t[1], bc}, lvl + 1});
            stack.push_back({{ca, bc, t[2]}, lvl + 1});
            stack.push_back({{bc, ca, ab}, lvl + 1});
            continue;
        }
        const Vec3 p0 = point(t[0]), p1 = point(t[1]), p2 = point(t[2]);
        const double scale = area2 * std::pow(0.25, lvl);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double u = x[i], v = x[i] * x[j];
                sum += (w[i] * w[j] * u * scale) * f(Vec3(p0 + u * (p1 - p0) + v * (p2 - p1)));
            }
    }
    return sum;
}

// int_T int_T e^{-zeta|x-y|} / (4 pi |x-y|) dy dx
inline complex self_integral(const Vec3& a, const Vec3& b, const Vec3& c, complex zeta, int depth = 8, int n = 6) {
    const auto inner = [&](const Vec3& x) { return polar_inner(x, a, b, c, zeta); };
    return graded_integral(inner, a, b, c, depth, n) / (4.0 * std::numbers::pi);
}

}  // namespace oracle
