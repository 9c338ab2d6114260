#pragma once

#include <array>
#include <functional>
#include <vector>

#include "dh2/geometry.hpp"

namespace dh2 {

// Gauss-Legendre rule with q points on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int q);

//
// Collapsed tensor Gauss rule on the reference triangle {0 <= x2 <= x1 <= 1}:
// q^2 points, weights summing to 1/2, exact for total degree <= 2q - 2.
//
struct QuadratureRule {
    int order = 0;
    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;

    int exact_degree() const { return 2 * order - 2; }
};

QuadratureRule triangle_rule(int q);

enum class Adjacency { disjoint, vertex, edge, identical };

//
// Panel-pair quadrature. Touching pairs use the relative-coordinate
// (Sauter-Schwab) transforms with q Gauss points per direction on [0,1]^4,
// disjoint pairs the q^2 x q^2 tensor rule.
//
class PanelPairQuadrature {
public:
    explicit PanelPairQuadrature(int q);

    int order() const { return order_; }
    const QuadratureRule& triangle() const { return triangle_; }

    // Classifies the pair and reorders the corners so that shared vertices
    // lead both corner lists, as the singular rules expect.
    static Adjacency classify(Panel& a, Panel& b);

    template <typename Kernel>
    complex integrate(const Kernel& kernel, Panel a, Panel b) const {
        const Adjacency adj = classify(a, b);
        const double jac = 4.0 * a.area * b.area;
        complex sum = 0.0;
        if (adj == Adjacency::disjoint) {
            for (std::size_t i = 0; i < triangle_.points.size(); ++i) {
                const Vec3 x = a.map(triangle_.points[i][0], triangle_.points[i][1]);
                complex inner = 0.0;
                for (std::size_t j = 0; j < triangle_.points.size(); ++j)
                    inner += triangle_.weights[j] * kernel(x, b.map(triangle_.points[j][0], triangle_.points[j][1]));
                sum += triangle_.weights[i] * inner;
            }
            return jac * sum;
        }
        const auto& rule = singular_[static_cast<int>(adj) - 1];
        for (std::size_t k = 0; k < rule.weights.size(); ++k) {
            const auto& p = rule.points[k];
            sum += rule.weights[k] * kernel(a.map(p[0], p[1]), b.map(p[2], p[3]));
        }
        return jac * sum;
    }

    // weights and reference points (x1, x2, y1, y2) of a singular rule
    struct PairRule {
        std::vector<std::array<double, 4>> points;
        std::vector<double> weights;
    };
    const PairRule& singular_rule(Adjacency adj) const { return singular_[static_cast<int>(adj) - 1]; }

private:
    int order_;
    QuadratureRule triangle_;
    std::array<PairRule, 3> singular_;  // vertex, edge, identical
};

using PairKernel = std::function<complex(const Vec3&, const Vec3&)>;

// Approximates the double surface integral of kernel(x, y) over tau x tau'.
complex panel_pair_integral(const PairKernel& kernel, const Panel& tau, const Panel& tau_prime, int q);

}  // namespace dh2
