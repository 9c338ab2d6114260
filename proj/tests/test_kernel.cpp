#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dh2/kernel.hpp"

using namespace dh2;

namespace {

constexpr double pi = std::numbers::pi;

// Chebyshev points and Lagrange values written out from the product formula
double lagrange_1d(int m, int i, double t) {
    auto node = [m](int j) { return std::cos((2.0 * j + 1.0) * pi / (2.0 * m + 2.0)); };
    double v = 1.0;
    for (int j = 0; j <= m; ++j)
        if (j != i)
            v *= (t - node(j)) / (node(i) - node(j));
    return v;
}

Vec3 box_point(const Box& b, int m, int i, int j, int k) {
    auto node = [m](int a) { return std::cos((2.0 * a + 1.0) * pi / (2.0 * m + 2.0)); };
    const Vec3 c = b.center(), h = 0.5 * b.width();
    return Vec3(c[0] + h[0] * node(i), c[1] + h[1] * node(j), c[2] + h[2] * node(k));
}

double box_lagrange(const Box& b, int m, int i, int j, int k, const Vec3& x) {
    const Vec3 c = b.center(), h = 0.5 * b.width();
    return lagrange_1d(m, i, (x[0] - c[0]) / h[0]) * lagrange_1d(m, j, (x[1] - c[1]) / h[1]) *
           lagrange_1d(m, k, (x[2] - c[2]) / h[2]);
}

Vec3 random_in(const Box& b, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return Vec3(b.lo[0] + u(rng) * b.width()[0], b.lo[1] + u(rng) * b.width()[1], b.lo[2] + u(rng) * b.width()[2]);
}

const Box unit_box{Vec3(0, 0, 0), Vec3(1, 1, 1)};
const Box far_box{Vec3(4, 0, 0), Vec3(5, 1, 1)};

}  // namespace

TEST_CASE("green: closed-form values") {
    CHECK(green(ComplexFrequency(1, 0), Vec3(1, 0, 0)).real() == doctest::Approx(0.02927491).epsilon(1e-7));
    CHECK(std::abs(green(ComplexFrequency(1, 0), Vec3(1, 0, 0)).imag()) == 0.0);
    const complex v = green(ComplexFrequency(0, pi), Vec3(0, 0.6, 0.8));
    CHECK(std::abs(v - complex(-1.0 / (4 * pi), 0.0)) < 1e-16);
    CHECK_THROWS_AS(green(ComplexFrequency(1, 1), Vec3::Zero()), std::domain_error);
    CHECK_THROWS_AS(green_modulated(ComplexFrequency(1, 1), Vec3::Zero(), Vec3(1, 0, 0)), std::domain_error);
}

TEST_CASE("green: modulus and factorization identities") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.0, 10.0);
    std::normal_distribution<double> g;
    for (int i = 0; i < 2000; ++i) {
        const ComplexFrequency zeta(pos(rng), u(rng) * 5);
        const Vec3 z(u(rng), u(rng), u(rng));
        const Vec3 c = Vec3(g(rng), g(rng), g(rng)).normalized();
        const double r = z.norm();
        const complex G = green(zeta, z);
        CHECK(std::abs(G) == doctest::Approx(std::exp(-zeta.re * r) / (4 * pi * r)).epsilon(1e-14));
        // the phases are rounded to a few ulps of their size |Im zeta| |z|
        const double ulp = std::numeric_limits<double>::epsilon();
        const double ph = -zeta.im * z.dot(c);
        CHECK(std::abs(G - complex(std::cos(ph), std::sin(ph)) * green_modulated(zeta, z, c)) <=
              8 * ulp * (1 + std::abs(zeta.im) * r) * std::abs(G));
        // c parallel to z removes the oscillation up to that rounding
        const complex par = green_modulated(zeta, z, z / r);
        CHECK(std::abs(par.imag()) <= 8 * ulp * (1 + std::abs(zeta.im) * r) * std::abs(par));
        CHECK(par.real() == doctest::Approx(std::exp(-zeta.re * r) / (4 * pi * r)).epsilon(1e-14));
        // c orthogonal to z leaves green unchanged
        const Vec3 perp = z.unitOrthogonal();
        CHECK(std::abs(green_modulated(zeta, z, perp) - G) <= 8 * ulp * (1 + std::abs(zeta.im) * r) * std::abs(G));
    }
}

TEST_CASE("coupling matrix") {
    const ComplexFrequency zeta(2, 4);
    const Vec3 c(-1, 0, 0);
    const Eigen::MatrixXcd g0 = coupling_matrix(ChebGrid(unit_box, 0), ChebGrid(far_box, 0), zeta, c);
    REQUIRE(g0.rows() == 1);
    REQUIRE(g0.cols() == 1);
    CHECK(std::abs(g0(0, 0) - green_modulated(zeta, unit_box.center() - far_box.center(), c)) < 1e-16);

    const Eigen::MatrixXcd g = coupling_matrix(ChebGrid(unit_box, 4), ChebGrid(far_box, 4), zeta, c);
    CHECK(g.rows() == 125);
    const double dist = box_distance(unit_box, far_box);
    CHECK(g.cwiseAbs().maxCoeff() <= std::exp(-zeta.re * dist) / (4 * pi * dist));
    // argument order xi_t - xi_s
    const ChebGrid gt(unit_box, 4), gs(far_box, 4);
    CHECK(std::abs(g(7, 31) - green_modulated(zeta, gt.point(7) - gs.point(31), c)) < 1e-17);
}

TEST_CASE("interpolated kernel equals the directly written tensor interpolant") {
    const ComplexFrequency zeta(4, 4);
    const Vec3 c = Vec3(-1, 0.1, 0).normalized();
    const int m = 4;
    const InterpolatedKernel gk(unit_box, far_box, m, zeta, c);
    std::mt19937_64 rng(9);
    for (int s = 0; s < 100; ++s) {
        const Vec3 x = random_in(unit_box, rng), y = random_in(far_box, rng);
        complex ref = 0.0;
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j)
                for (int k = 0; k <= m; ++k) {
                    const double lx = box_lagrange(unit_box, m, i, j, k, x);
                    const Vec3 xi = box_point(unit_box, m, i, j, k);
                    for (int a = 0; a <= m; ++a)
                        for (int b = 0; b <= m; ++b)
                            for (int d = 0; d <= m; ++d)
                                ref += lx * box_lagrange(far_box, m, a, b, d, y) *
                                       green_modulated(zeta, xi - box_point(far_box, m, a, b, d), c);
                }
        const double ph = -zeta.im * (x - y).dot(c);
        ref *= complex(std::cos(ph), std::sin(ph));
        CHECK(std::abs(gk(x, y) - ref) <= 1e-12 * std::abs(ref));
    }
}

TEST_CASE("error bound constants") {
    const auto k = ErrorBoundConstants::compute(10, 2, 0.5);
    CHECK(k.rho0 > 1.0);
    CHECK(k.alpha > 1.0);
    CHECK(k.sigma == doctest::Approx(0.25));
    CHECK(k.sigma > 0.0);
    CHECK(k.sigma < 0.5);
    CHECK(std::isfinite(k.C0));
    CHECK(std::isfinite(k.C1));
    CHECK(k.C0 > 0.0);
    // the scan finds the supremum at small m
    CHECK(k.C1_argmax >= 1);
    CHECK_THROWS_AS(ErrorBoundConstants::compute(10, 2, 1.0), std::invalid_argument);

    const ComplexFrequency z0(0, 4), z1(3, 4);
    for (int m = 0; m < 8; ++m) {
        CHECK(local_error_bound(3.0, k, m, z1) / local_error_bound(3.0, k, m + 1, z1) ==
              doctest::Approx(k.rho0).epsilon(1e-13));
        CHECK(local_error_bound(3.0, k, m, z0) ==
              doctest::Approx(k.C0 / (4 * pi * 3.0) * std::pow(k.rho0, -m)).epsilon(1e-13));
    }
}

TEST_CASE("Rivlin's formula matches the sampled Lebesgue constant") {
    for (int m = 0; m <= 15; ++m)
        CHECK(lebesgue_constant_exact(m) == doctest::Approx(lebesgue_constant(m, 200001)).epsilon(1e-6));
}

TEST_CASE("sampled interpolation error stays below the bound and decays") {
    const auto k = ErrorBoundConstants::compute(10, 2, 0.5);
    const ComplexFrequency zeta(4, 4);
    const Vec3 c(-1, 0, 0);
    const double dist = box_distance(unit_box, far_box);
    double prev = 1e300;
    for (int m = 2; m <= 8; ++m) {
        const double e = sampled_interpolation_error(unit_box, far_box, m, zeta, c, 1000, 3);
        CHECK(e <= local_error_bound(dist, k, m, zeta));
        if (m > 2)
            CHECK(e / prev <= 1.0 / k.rho0 + 0.15);
        prev = e;
    }
    // decay in the real part at fixed order
    double last = 1e300;
    for (int nu = 0; nu <= 24; nu += 4) {
        const double e = sampled_interpolation_error(unit_box, far_box, 4, ComplexFrequency(nu, 4), c, 1000, 3);
        CHECK(e <= 1.1 * last);
        last = e;
    }
}

TEST_CASE("base orders") {
    CHECK(base_order(1.0, std::exp(-5.0), 1.0, 2.0, 3.0) == -1);
    CHECK(base_order(1.0, std::exp(-5.0), 1.0, 0.0, 3.0) == 5);
    CHECK(base_order(1.0, std::exp(-5.0), 1.0, 0.0, 1e6) == 5);
    CHECK(base_order(1.0, std::exp(-5.0), 1.0, 1.0, 2.5) == 3);
    CHECK(base_order(1.0, std::exp(-5.0), 1.0, 1.0, 5.0) == 0);
}

TEST_CASE("order schedules") {
    const SurfaceMesh mesh = build_sphere_mesh(4);
    const MeshMetrics mm = mesh_metrics(mesh);
    const ClusterTree tree = build_cluster_tree(mesh, 16);
    AdmissibilityParams p;
    p.zeta = ComplexFrequency(4, 4);
    const auto dirs = build_direction_sets(tree, p.zeta, p.eta1);
    const BlockPartition P = divide(tree, dirs, p);

    const OrderSchedule f = fixed_schedule(P, tree, 3);
    for (int l = 0; l <= tree.depth(); ++l)
        CHECK(f.order(l) == 3);
    CHECK(f.max_order() == 3);

    const double eps = std::exp(-5.0);
    const OrderSchedule v = select_orders(P, tree, p, mm.h_min, eps, 1.0, 1.0);
    for (std::size_t l = 1; l < v.level_orders.size(); ++l)
        CHECK(v.level_orders[l] >= v.level_orders[l - 1]);
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (!P.blocks[i].is_far())
            CHECK(v.block_orders[i] == -1);
        else {
            CHECK(v.block_orders[i] == base_order(1.0, eps, 1.0, 4.0, P.blocks[i].dist));
            CHECK(v.block_orders[i] <= v.order(P.blocks[i].level));
        }
    }
    // no real part: every far block gets the same order
    AdmissibilityParams q = p;
    q.zeta = ComplexFrequency(0, 4);
    const auto dq = build_direction_sets(tree, q.zeta, q.eta1);
    const BlockPartition Q = divide(tree, dq, q);
    const OrderSchedule w = select_orders(Q, tree, q, mm.h_min, eps, 1.0, 1.0);
    for (std::size_t i = 0; i < Q.size(); ++i)
        if (Q.blocks[i].is_far())
            CHECK(w.block_orders[i] == 5);

    CHECK_THROWS_AS(select_orders(P, tree, p, mm.h_min, 0.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(select_orders(P, tree, p, mm.h_min, 0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(select_orders(P, tree, p, mm.h_min, eps, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("default order parameters meet the target epsilon") {
    const auto k = ErrorBoundConstants::compute(10, 2, 0.5);
    const double h_min = 0.03;
    const OrderParameters op = default_order_parameters(k, h_min);
    CHECK(op.epsilon == doctest::Approx(std::exp(-5.0)));
    CHECK(op.sigma_tilde == doctest::Approx(k.sigma / std::log(k.rho0)));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ud(h_min / 2.0, 5.0), ur(0.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const double dist = ud(rng);
        const ComplexFrequency zeta(ur(rng), 1.0);
        const int m = base_order(op.c0, op.epsilon, op.sigma_tilde, zeta.re, dist);
        if (m >= 0)
            CHECK(local_error_bound(dist, k, m, zeta) <= op.epsilon * (1 + 1e-9));
    }
    CHECK(max_epsilon(0.01, 2.0) == doctest::Approx(0.005));
    CHECK(max_epsilon(10.0, 2.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("nearfield-only threshold") {
    const SurfaceMesh mesh = build_sphere_mesh(4);
    const MeshMetrics mm = mesh_metrics(mesh);
    const double eps = std::exp(-5.0);
    const double thr = nearfield_only_threshold(mm, eps, 1.0, 1.0, 2.0);
    CHECK(thr == doctest::Approx(2.0 * 5.0 / mm.h_min));
    MeshMetrics coarse = mm;
    coarse.h_min *= 2;
    CHECK(nearfield_only_threshold(coarse, eps, 1.0, 1.0, 2.0) == doctest::Approx(thr / 2));
    CHECK(nearfield_only_threshold(mm, 2 * eps, 1.0, 1.0, 2.0) < thr);

    const ClusterTree tree = build_cluster_tree(mesh, 16);
    AdmissibilityParams p;
    p.zeta = ComplexFrequency(1.01 * thr, 4);
    const auto dirs = build_direction_sets(tree, p.zeta, p.eta1);
    const BlockPartition P = divide(tree, dirs, p);
    REQUIRE(P.far_count > 0);
    const OrderSchedule s = select_orders(P, tree, p, mm.h_min, eps, 1.0, 1.0);
    for (int o : s.block_orders)
        CHECK(o == -1);
    CHECK(s.max_order() == -1);
}
