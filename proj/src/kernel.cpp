#include "dh2/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace dh2 {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

complex green(const ComplexFrequency& zeta, const Vec3& z) {
    const double r = z.norm();
    if (!(r > 0))
        throw std::domain_error("green: z = 0");
    return std::exp(-zeta.value() * r) / (four_pi * r);
}

complex green_modulated(const ComplexFrequency& zeta, const Vec3& z, const Vec3& c) {
    const double r = z.norm();
    if (!(r > 0))
        throw std::domain_error("green_modulated: z = 0");
    const double phase = -zeta.im * (r - z.dot(c));
    return std::exp(-zeta.re * r) * complex(std::cos(phase), std::sin(phase)) / (four_pi * r);
}

double lebesgue_constant_exact(int m) {
    if (m < 0)
        throw std::invalid_argument("lebesgue_constant_exact: negative order");
    const double n1 = m + 1.0;
    double s = 0.0;
    for (int i = 0; i <= m; ++i)
        s += 1.0 / std::tan((2.0 * i + 1.0) * std::numbers::pi / (4.0 * n1));
    return s / n1;
}

namespace {

struct SupResult {
    double value = 0.0;
    long long argmax = 0;
};

// sup over m >= 1 of g(Lambda_m) / alpha^{m/2} for increasing g
SupResult sup_over_orders(const std::function<double(double)>& g, double alpha) {
    std::unordered_map<long long, double> cache;
    auto lambda = [&](long long m) {
        auto it = cache.find(m);
        if (it != cache.end())
            return it->second;
        const double v = lebesgue_constant_exact(int(m));
        cache.emplace(m, v);
        return v;
    };
    const double la = std::log(alpha);
    auto f = [&](long long m) { return g(lambda(m)) * std::exp(-0.5 * la * double(m)); };

    SupResult best;
    for (long long m = 1; m <= 64; ++m)
        if (double v = f(m); v > best.value)
            best = {v, m};

    // tail cut-off from Lambda_m <= (2/pi) log(m+1) + 1
    auto upper = [&](double m) { return g(2.0 / std::numbers::pi * std::log(m + 1.0) + 1.0) * std::exp(-0.5 * la * m); };
    long long M = 128;
    while (!(upper(double(M)) < best.value && upper(double(M) + 1.0) < upper(double(M)))) {
        M *= 2;
        if (M > (1LL << 40))
            throw std::runtime_error("error bound constants: supremum search did not terminate");
    }

    std::vector<std::pair<long long, long long>> stack{{65, M}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        if (g(lambda(b)) * std::exp(-0.5 * la * double(a)) <= best.value)
            continue;
        if (b - a <= 8) {
            for (long long m = a; m <= b; ++m)
                if (double v = f(m); v > best.value)
                    best = {v, m};
            continue;
        }
        const long long mid = a + (b - a) / 2;
        if (double v = f(mid); v > best.value)
            best = {v, mid};
        stack.emplace_back(a, mid);
        stack.emplace_back(mid + 1, b);
    }
    return best;
}

}  // namespace

ErrorBoundConstants ErrorBoundConstants::compute(double eta1, double eta2, double eta3) {
    if (!(eta1 > 0 && eta2 > 0 && eta3 > 0 && eta3 < 1))
        throw std::invalid_argument("ErrorBoundConstants: need eta1, eta2 > 0 and 0 < eta3 < 1");
    ErrorBoundConstants k;
    k.eta1 = eta1;
    k.eta2 = eta2;
    k.eta3 = eta3;
    k.beta_hat = std::min({1.0, (std::sqrt(1.5) - 1.0) * 2.0 / eta2,
                           2.0 * (1.0 - eta3) / (eta2 * eta2 * (2.0 * std::sqrt(6.0) + 5.0))});
    k.rho0 = 1.0 + k.beta_hat;
    k.alpha = (std::sqrt(k.beta_hat * k.beta_hat + 1.0) + k.beta_hat) / (k.beta_hat + 1.0);
    k.sigma = 0.5 * (1.0 - eta3);

    const double rho_m1 = k.rho0 - 1.0;
    const auto s1 = sup_over_orders([&](double L) { return 8.0 * (L + 1.0) / rho_m1; }, k.alpha);
    k.C1 = std::exp(eta1) * s1.value;
    k.C1_argmax = s1.argmax;
    const auto s0 = sup_over_orders([](double L) { return 6.0 * std::pow(L, 5); }, k.alpha);
    k.C0 = s0.value * k.C1;
    k.C0_argmax = s0.argmax;
    return k;
}

double local_error_bound(double dist, const ErrorBoundConstants& k, int m, const ComplexFrequency& zeta) {
    return k.C0 * std::exp(-k.sigma * zeta.re * dist) / (four_pi * dist) * std::pow(k.rho0, -double(m));
}

int OrderSchedule::max_order() const {
    int m = -1;
    for (int l : level_orders)
        m = std::max(m, l);
    return m;
}

OrderSchedule fixed_schedule(const BlockPartition& P, const ClusterTree& tree, int degree) {
    if (degree < -1)
        throw std::invalid_argument("fixed_schedule: degree below -1");
    OrderSchedule s;
    s.mode = OrderMode::fixed;
    s.level_orders.assign(tree.depth() + 1, degree);
    s.block_orders.resize(P.size());
    for (std::size_t i = 0; i < P.size(); ++i)
        s.block_orders[i] = P.blocks[i].is_far() ? degree : -1;
    return s;
}

int base_order(double c0, double epsilon, double sigma_tilde, double re_zeta, double dist) {
    const double v = c0 * std::log(1.0 / epsilon) - sigma_tilde * re_zeta * dist;
    if (v < 0)
        return -1;
    // absorb rounding in log so that exact integers stay exact
    return int(std::ceil(v - 1e-9 * (1.0 + v)));
}

double max_epsilon(double h_min, double eta2) {
    return std::min(std::exp(-1.0), h_min / eta2);
}

OrderParameters default_order_parameters(const ErrorBoundConstants& k, double h_min, double epsilon) {
    if (!(h_min > 0))
        throw std::invalid_argument("default_order_parameters: h_min must be positive");
    OrderParameters p;
    p.epsilon = epsilon > 0 ? epsilon : std::min(std::exp(-5.0), max_epsilon(h_min, k.eta2));
    const double delta_min = h_min / k.eta2;
    const double lr = std::log(k.rho0);
    p.c0 = std::log(k.C0 / (four_pi * p.epsilon * delta_min)) / (lr * std::log(1.0 / p.epsilon));
    p.sigma_tilde = k.sigma / lr;
    return p;
}

OrderSchedule select_orders(const BlockPartition& P, const ClusterTree& tree, const AdmissibilityParams& params,
                            double h_min, double epsilon, double c0, double sigma_tilde) {
    const double eps_max = max_epsilon(h_min, params.eta2);
    if (!(epsilon > 0 && epsilon <= eps_max))
        throw std::invalid_argument("select_orders: epsilon must lie in (0, min{1/e, h_min/eta2}]");
    if (!(c0 > 0 && sigma_tilde > 0))
        throw std::invalid_argument("select_orders: c0 and sigma_tilde must be positive");

    OrderSchedule s;
    s.mode = OrderMode::variable;
    s.epsilon = epsilon;
    s.c0 = c0;
    s.sigma_tilde = sigma_tilde;
    std::vector<int> tilde(tree.depth() + 1, -1);
    s.block_orders.assign(P.size(), -1);
    for (std::size_t i = 0; i < P.size(); ++i) {
        const Block& b = P.blocks[i];
        if (!b.is_far())
            continue;
        s.block_orders[i] = base_order(c0, epsilon, sigma_tilde, params.zeta.re, b.dist);
        tilde[b.level] = std::max(tilde[b.level], s.block_orders[i]);
    }
    s.level_orders.resize(tilde.size());
    int prev = -1;
    for (std::size_t l = 0; l < tilde.size(); ++l)
        s.level_orders[l] = prev = std::max(prev, tilde[l]);
    return s;
}

double nearfield_only_threshold(const MeshMetrics& metrics, double epsilon, double c0, double sigma_tilde,
                                double eta2) {
    return c0 * eta2 / sigma_tilde * std::log(1.0 / epsilon) / metrics.h_min;
}

Eigen::MatrixXcd coupling_matrix(const ChebGrid& gt, const ChebGrid& gs, const ComplexFrequency& zeta,
                                 const Vec3& c) {
    const auto xt = gt.points();
    const auto xs = gs.points();
    Eigen::MatrixXcd g(xt.size(), xs.size());
    for (std::size_t nu = 0; nu < xs.size(); ++nu)
        for (std::size_t mu = 0; mu < xt.size(); ++mu) {
            const Vec3 z = xt[mu] - xs[nu];
            if (!(z.squaredNorm() > 0))
                throw std::domain_error("coupling_matrix: coincident interpolation points");
            g(mu, nu) = green_modulated(zeta, z, c);
        }
    return g;
}

InterpolatedKernel::InterpolatedKernel(const Box& bt, const Box& bs, int degree, const ComplexFrequency& zeta,
                                       const Vec3& c)
    : gt_(bt, degree), gs_(bs, degree), zeta_(zeta), c_(c), gamma_(coupling_matrix(gt_, gs_, zeta, c)) {}

complex InterpolatedKernel::operator()(const Vec3& x, const Vec3& y) const {
    Eigen::VectorXd lx(gt_.size()), ly(gs_.size());
    gt_.lagrange_all(x, lx.data());
    gs_.lagrange_all(y, ly.data());
    const complex v = lx.cast<complex>().dot(gamma_ * ly.cast<complex>());
    const double phase = -zeta_.im * (x - y).dot(c_);
    return complex(std::cos(phase), std::sin(phase)) * v;
}

double sampled_interpolation_error(const Box& bt, const Box& bs, int degree, const ComplexFrequency& zeta,
                                   const Vec3& c, int samples, std::uint64_t seed) {
    const InterpolatedKernel gk(bt, bs, degree, zeta, c);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&](const Box& b) {
        Vec3 p;
        for (int k = 0; k < 3; ++k)
            p[k] = b.lo[k] + u(rng) * (b.hi[k] - b.lo[k]);
        return p;
    };
    double err = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vec3 x = draw(bt), y = draw(bs);
        err = std::max(err, std::abs(green(zeta, x - y) - gk(x, y)));
    }
    return err;
}

}  // namespace dh2
