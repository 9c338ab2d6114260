#include "dh2/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dh2 {

GaussRule gauss_legendre(int q) {
    if (q < 1)
        throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(q);
    rule.weights.resize(q);
    for (int i = 0; i < q; ++i) {
        // Newton iteration on P_q starting from the Chebyshev-like guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
        }
        // map from [-1,1] to [0,1]
        rule.nodes[q - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[q - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

QuadratureRule triangle_rule(int q) {
    const GaussRule g = gauss_legendre(q);
    QuadratureRule rule;
    rule.order = q;
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
            const double u = g.nodes[a], v = g.nodes[b];
            rule.points.emplace_back(u, u * v);
            rule.weights.push_back(g.weights[a] * g.weights[b] * u);
        }
    return rule;
}

namespace {

using PairRule = PanelPairQuadrature::PairRule;

template <typename F>
PairRule tensor4(const GaussRule& g, F&& emit) {
    PairRule rule;
    const std::size_t q = g.nodes.size();
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b)
            for (std::size_t c = 0; c < q; ++c)
                for (std::size_t d = 0; d < q; ++d) {
                    const double w = g.weights[a] * g.weights[b] * g.weights[c] * g.weights[d];
                    emit(rule, g.nodes[a], g.nodes[b], g.nodes[c], g.nodes[d], w);
                }
    return rule;
}

void push(PairRule& r, double x1, double x2, double y1, double y2, double w) {
    r.points.push_back({x1, x2, y1, y2});
    r.weights.push_back(w);
}

// shared vertex at reference (0,0) of both panels
PairRule vertex_rule(const GaussRule& g) {
    return tensor4(g, [](PairRule& r, double xi, double e1, double e2, double e3, double w) {
        const double jw = w * xi * xi * xi * e2;
        push(r, xi, xi * e1, xi * e2, xi * e2 * e3, jw);
        push(r, xi * e2, xi * e2 * e3, xi, xi * e1, jw);
    });
}

// shared edge (0,0)-(1,0) of both panels
PairRule edge_rule(const GaussRule& g) {
    return tensor4(g, [](PairRule& r, double xi, double e1, double e2, double e3, double w) {
        const double w0 = w * xi * xi * xi * e1 * e1;
        const double w1 = w0 * e2;
        push(r, xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2), w0);
        push(r, xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), w1);
        push(r, xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, w1);
        push(r, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, w1);
        push(r, xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, w1);
    });
}

PairRule identical_rule(const GaussRule& g) {
    return tensor4(g, [](PairRule& r, double xi, double e1, double e2, double e3, double w) {
        const double jw = w * xi * xi * xi * e1 * e1 * e2;
        push(r, xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), jw);
        push(r, xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), jw);
        push(r, xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), jw);
        push(r, xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), jw);
        push(r, xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), jw);
        push(r, xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), jw);
    });
}

}  // namespace

PanelPairQuadrature::PanelPairQuadrature(int q) : order_(q) {
    if (q < 1)
        throw std::invalid_argument("PanelPairQuadrature: order must be >= 1");
    const GaussRule g = gauss_legendre(q);
    triangle_ = triangle_rule(q);
    singular_[0] = vertex_rule(g);
    singular_[1] = edge_rule(g);
    singular_[2] = identical_rule(g);
}

Adjacency PanelPairQuadrature::classify(Panel& a, Panel& b) {
    std::array<int, 3> match{-1, -1, -1};  // match[i] = corner of b equal to corner i of a
    int shared = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a.corner[i] == b.corner[j]) {
                match[i] = j;
                ++shared;
                break;
            }
    switch (shared) {
    case 0:
        return Adjacency::disjoint;
    case 3:
        b = a;
        return Adjacency::identical;
    case 1: {
        int i = 0;
        while (match[i] < 0)
            ++i;
        const int j = match[i];
        a = Panel(a.corner[i], a.corner[(i + 1) % 3], a.corner[(i + 2) % 3]);
        b = Panel(b.corner[j], b.corner[(j + 1) % 3], b.corner[(j + 2) % 3]);
        return Adjacency::vertex;
    }
    default: {
        int i0 = -1, i1 = -1, ia = -1;
        for (int i = 0; i < 3; ++i) {
            if (match[i] < 0)
                ia = i;
            else if (i0 < 0)
                i0 = i;
            else
                i1 = i;
        }
        const int j0 = match[i0], j1 = match[i1];
        const int jb = 3 - j0 - j1;
        a = Panel(a.corner[i0], a.corner[i1], a.corner[ia]);
        b = Panel(b.corner[j0], b.corner[j1], b.corner[jb]);
        return Adjacency::edge;
    }
    }
}

complex panel_pair_integral(const PairKernel& kernel, const Panel& tau, const Panel& tau_prime, int q) {
    if (q < 1)
        throw std::invalid_argument("panel_pair_integral: order must be >= 1");
    return PanelPairQuadrature(q).integrate(kernel, tau, tau_prime);
}

}  // namespace dh2
