#include "dh2/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dh2 {

std::vector<double> cheb_nodes(int m) {
    if (m < 0)
        throw std::invalid_argument("cheb_nodes: negative order");
    std::vector<double> x(m + 1);
    for (int i = 0; i <= m; ++i)
        x[i] = std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * m + 2.0));
    if (m % 2 == 0)
        x[m / 2] = 0.0;
    return x;
}

std::vector<double> cheb_weights(int m) {
    std::vector<double> w(m + 1);
    for (int i = 0; i <= m; ++i)
        w[i] = ((i % 2) ? -1.0 : 1.0) * std::sin((2.0 * i + 1.0) * std::numbers::pi / (2.0 * m + 2.0));
    return w;
}

namespace {

struct NodeTable {
    std::vector<double> x, w;
};

const NodeTable& table(int m) {
    // orders used in practice are small; build lazily, once
    static std::vector<NodeTable> cache = [] {
        std::vector<NodeTable> c(65);
        for (int k = 0; k < 65; ++k)
            c[k] = NodeTable{cheb_nodes(k), cheb_weights(k)};
        return c;
    }();
    if (m < 0 || m >= int(cache.size()))
        throw std::out_of_range("Chebyshev order out of supported range");
    return cache[m];
}

void barycentric(const std::vector<double>& x, const std::vector<double>& w, double t, double* out) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i)
        if (t == x[i]) {
            std::fill(out, out + n, 0.0);
            out[i] = 1.0;
            return;
        }
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = w[i] / (t - x[i]);
        denom += out[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] /= denom;
}

}  // namespace

void lagrange_values(int m, double t, double* out) {
    if (m < 65) {
        const auto& tb = table(m);
        barycentric(tb.x, tb.w, t, out);
    } else {
        barycentric(cheb_nodes(m), cheb_weights(m), t, out);
    }
}

double lebesgue_constant(int m, int samples) {
    if (m < 0)
        throw std::invalid_argument("lebesgue_constant: negative order");
    if (samples < 2)
        throw std::invalid_argument("lebesgue_constant: need at least two samples");
    const auto x = cheb_nodes(m);
    const auto w = cheb_weights(m);
    std::vector<double> l(m + 1);
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double t = -1.0 + 2.0 * s / (samples - 1);
        barycentric(x, w, t, l.data());
        double sum = 0.0;
        for (double v : l)
            sum += std::abs(v);
        best = std::max(best, sum);
    }
    return best;
}

ChebGrid::ChebGrid(const Box& box, int m) : box_(box), order_(m) {
    if (m < 0)
        throw std::invalid_argument("ChebGrid: negative order");
    const double scale = 1.0 + box.diameter();
    size_ = 1;
    for (int k = 0; k < 3; ++k) {
        const double w = box.hi[k] - box.lo[k];
        if (w < 0)
            throw std::invalid_argument("ChebGrid: inverted box");
        axis_order_[k] = (w <= 1e-14 * scale) ? 0 : m;
        size_ *= axis_order_[k] + 1;
    }
}

std::array<int, 3> ChebGrid::multi_index(std::size_t lin) const {
    std::array<int, 3> mu{};
    for (int k = 0; k < 3; ++k) {
        mu[k] = int(lin % (axis_order_[k] + 1));
        lin /= axis_order_[k] + 1;
    }
    return mu;
}

double ChebGrid::pullback(int k, double x) const {
    if (axis_order_[k] == 0 && order_ > 0)
        return 0.0;
    const double w = box_.hi[k] - box_.lo[k];
    if (w <= 0)
        return 0.0;
    return (2.0 * x - box_.lo[k] - box_.hi[k]) / w;
}

Vec3 ChebGrid::point(std::size_t lin) const {
    const auto mu = multi_index(lin);
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
        const double t = table(axis_order_[k]).x[mu[k]];
        p[k] = 0.5 * (box_.lo[k] + box_.hi[k]) + 0.5 * (box_.hi[k] - box_.lo[k]) * t;
    }
    return p;
}

std::vector<Vec3> ChebGrid::points() const {
    std::vector<Vec3> pts(size_);
    for (std::size_t i = 0; i < size_; ++i)
        pts[i] = point(i);
    return pts;
}

double ChebGrid::lagrange(std::size_t mu, const Vec3& x) const {
    const auto idx = multi_index(mu);
    double v = 1.0;
    double buf[65];
    for (int k = 0; k < 3; ++k) {
        lagrange_values(axis_order_[k], pullback(k, x[k]), buf);
        v *= buf[idx[k]];
    }
    return v;
}

void ChebGrid::lagrange_all(const Vec3& x, double* out) const {
    double l[3][65];
    for (int k = 0; k < 3; ++k)
        lagrange_values(axis_order_[k], pullback(k, x[k]), l[k]);
    std::size_t i = 0;
    for (int c = 0; c <= axis_order_[2]; ++c)
        for (int b = 0; b <= axis_order_[1]; ++b) {
            const double lbc = l[1][b] * l[2][c];
            for (int a = 0; a <= axis_order_[0]; ++a)
                out[i++] = l[0][a] * lbc;
        }
}

TransferMatrix::TransferMatrix(const ChebGrid& parent, const ChebGrid& child)
    : pm_(parent.axis_orders()), cm_(child.axis_orders()) {
    if (child.order() < parent.order())
        throw std::invalid_argument("TransferMatrix: child order below parent order");
    double buf[65];
    for (int k = 0; k < 3; ++k) {
        factor_[k].resize(cm_[k] + 1, pm_[k] + 1);
        const auto& cx = table(cm_[k]).x;
        for (int nu = 0; nu <= cm_[k]; ++nu) {
            const double xk = 0.5 * (child.box().lo[k] + child.box().hi[k]) +
                              0.5 * (child.box().hi[k] - child.box().lo[k]) * cx[nu];
            lagrange_values(pm_[k], parent.pullback(k, xk), buf);
            for (int mu = 0; mu <= pm_[k]; ++mu)
                factor_[k](nu, mu) = buf[mu];
        }
    }
}

double TransferMatrix::operator()(std::size_t mu, std::size_t nu) const {
    double v = 1.0;
    for (int k = 0; k < 3; ++k) {
        const int pm = pm_[k] + 1, cm = cm_[k] + 1;
        v *= factor_[k](int(nu % cm), int(mu % pm));
        mu /= pm;
        nu /= cm;
    }
    return v;
}

Eigen::MatrixXd TransferMatrix::dense() const {
    const std::size_t np = std::size_t(pm_[0] + 1) * (pm_[1] + 1) * (pm_[2] + 1);
    const std::size_t nc = std::size_t(cm_[0] + 1) * (cm_[1] + 1) * (cm_[2] + 1);
    Eigen::MatrixXd q(nc, np);
    for (std::size_t nu = 0; nu < nc; ++nu)
        for (std::size_t mu = 0; mu < np; ++mu)
            q(nu, mu) = (*this)(mu, nu);
    return q;
}

namespace {

// out = (F2 x F1 x F0) in, F_k of size rows[k] x cols[k], first index fastest
void tensor_apply(const std::array<Eigen::MatrixXd, 3>& F, bool transpose, const complex* in, complex* out) {
    std::array<int, 3> rows, cols;
    for (int k = 0; k < 3; ++k) {
        rows[k] = transpose ? int(F[k].cols()) : int(F[k].rows());
        cols[k] = transpose ? int(F[k].rows()) : int(F[k].cols());
    }
    auto f = [&](int k, int r, int c) { return transpose ? F[k](c, r) : F[k](r, c); };

    // axis 0
    std::vector<complex> t0(std::size_t(rows[0]) * cols[1] * cols[2]);
    for (int c2 = 0; c2 < cols[2]; ++c2)
        for (int c1 = 0; c1 < cols[1]; ++c1) {
            const complex* src = in + std::size_t(cols[0]) * (c1 + cols[1] * c2);
            complex* dst = t0.data() + std::size_t(rows[0]) * (c1 + cols[1] * c2);
            for (int r = 0; r < rows[0]; ++r) {
                complex s = 0.0;
                for (int c = 0; c < cols[0]; ++c)
                    s += f(0, r, c) * src[c];
                dst[r] = s;
            }
        }
    // axis 1
    std::vector<complex> t1(std::size_t(rows[0]) * rows[1] * cols[2]);
    for (int c2 = 0; c2 < cols[2]; ++c2)
        for (int r1 = 0; r1 < rows[1]; ++r1)
            for (int r0 = 0; r0 < rows[0]; ++r0) {
                complex s = 0.0;
                for (int c1 = 0; c1 < cols[1]; ++c1)
                    s += f(1, r1, c1) * t0[r0 + std::size_t(rows[0]) * (c1 + cols[1] * c2)];
                t1[r0 + std::size_t(rows[0]) * (r1 + rows[1] * c2)] = s;
            }
    // axis 2
    const std::size_t plane = std::size_t(rows[0]) * rows[1];
    for (int r2 = 0; r2 < rows[2]; ++r2)
        for (std::size_t p = 0; p < plane; ++p) {
            complex s = 0.0;
            for (int c2 = 0; c2 < cols[2]; ++c2)
                s += f(2, r2, c2) * t1[p + plane * c2];
            out[p + plane * r2] = s;
        }
}

}  // namespace

void TransferMatrix::apply(const complex* in, complex* out) const {
    tensor_apply(factor_, false, in, out);
}

void TransferMatrix::apply_transpose(const complex* in, complex* out) const {
    tensor_apply(factor_, true, in, out);
}

}  // namespace dh2
