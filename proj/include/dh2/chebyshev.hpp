#pragma once

#include <array>
#include <vector>

#include "dh2/geometry.hpp"

namespace dh2 {

// Chebyshev points cos((2i+1) pi / (2m+2)), i = 0..m, descending.
std::vector<double> cheb_nodes(int m);

// Barycentric weights of the Chebyshev points of order m.
std::vector<double> cheb_weights(int m);

// Values of the m+1 univariate Lagrange polynomials at t in [-1,1].
void lagrange_values(int m, double t, double* out);

// Maximum of the univariate Lebesgue function on a uniform grid of
// `samples` points (endpoints included).
double lebesgue_constant(int m, int samples = 10000);

//
// Tensor Chebyshev grid of order m on a box. Axes of zero width collapse to a
// single point (order 0 along that axis).
//
class ChebGrid {
public:
    ChebGrid() = default;
    ChebGrid(const Box& box, int m);

    int order() const { return order_; }
    const Box& box() const { return box_; }
    const std::array<int, 3>& axis_orders() const { return axis_order_; }

    // (m+1)^3 for non-degenerate boxes
    std::size_t size() const { return size_; }

    // linear index of mu = (mu0, mu1, mu2); mu0 fastest
    std::size_t index(int mu0, int mu1, int mu2) const {
        return mu0 + (axis_order_[0] + 1) * (mu1 + (axis_order_[1] + 1) * std::size_t(mu2));
    }
    std::array<int, 3> multi_index(std::size_t lin) const;

    // reference coordinate of x along axis k (affine pullback to [-1,1])
    double pullback(int k, double x) const;

    Vec3 point(std::size_t lin) const;
    std::vector<Vec3> points() const;

    // tensor Lagrange polynomial L_mu(x)
    double lagrange(std::size_t mu, const Vec3& x) const;

    // all L_mu(x), mu in index order
    void lagrange_all(const Vec3& x, double* out) const;

private:
    Box box_;
    int order_ = -1;
    std::array<int, 3> axis_order_{-1, -1, -1};
    std::size_t size_ = 0;
};

//
// Transfer from a parent grid to a child grid, q_{mu,nu} = L^parent_mu(xi^child_nu),
// kept as three univariate factors: factor[k](nu_k, mu_k).
//
class TransferMatrix {
public:
    TransferMatrix() = default;
    TransferMatrix(const ChebGrid& parent, const ChebGrid& child);

    const Eigen::MatrixXd& factor(int k) const { return factor_[k]; }

    // entry q_{mu, nu}
    double operator()(std::size_t mu, std::size_t nu) const;

    // dense (child.size() x parent.size()) matrix Q with Q(nu, mu) = q_{mu,nu}
    Eigen::MatrixXd dense() const;

    // out(child) = Q * in(parent)  (interpolation of parent coefficients to child points)
    void apply(const complex* in, complex* out) const;
    // out(parent) = Q^T * in(child)
    void apply_transpose(const complex* in, complex* out) const;

    const std::array<int, 3>& parent_orders() const { return pm_; }
    const std::array<int, 3>& child_orders() const { return cm_; }

private:
    std::array<Eigen::MatrixXd, 3> factor_;
    std::array<int, 3> pm_{}, cm_{};
};

}  // namespace dh2
