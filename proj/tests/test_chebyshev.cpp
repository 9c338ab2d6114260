#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dh2/chebyshev.hpp"

using namespace dh2;

namespace {

double chebyshev_t(int n, double x) { return std::cos(n * std::acos(std::clamp(x, -1.0, 1.0))); }

Vec3 random_in(const Box& b, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec3 x;
    for (int k = 0; k < 3; ++k)
        x[k] = b.lo[k] + u(rng) * (b.hi[k] - b.lo[k]);
    return x;
}

}  // namespace

TEST_CASE("Chebyshev nodes") {
    const auto n0 = cheb_nodes(0);
    REQUIRE(n0.size() == 1);
    CHECK(std::abs(n0[0]) < 1e-15);
    const auto n1 = cheb_nodes(1);
    REQUIRE(n1.size() == 2);
    CHECK(n1[0] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(n1[1] == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));
    // the m+1 nodes are the roots of T_{m+1}, in descending order
    for (int m = 0; m <= 12; ++m) {
        const auto x = cheb_nodes(m);
        REQUIRE(x.size() == std::size_t(m + 1));
        for (int i = 0; i <= m; ++i) {
            CHECK(std::abs(chebyshev_t(m + 1, x[i])) < 1e-13);
            if (i > 0)
                CHECK(x[i] < x[i - 1]);
        }
    }
    CHECK_THROWS_AS(cheb_nodes(-1), std::invalid_argument);
}

TEST_CASE("Lagrange polynomials: Kronecker property and partition of unity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int m = 0; m <= 10; ++m) {
        const auto x = cheb_nodes(m);
        std::vector<double> L(m + 1);
        for (int i = 0; i <= m; ++i) {
            lagrange_values(m, x[i], L.data());
            for (int j = 0; j <= m; ++j)
                CHECK(L[j] == doctest::Approx(i == j ? 1.0 : 0.0));
        }
        for (int s = 0; s < 20; ++s) {
            lagrange_values(m, u(rng), L.data());
            double sum = 0.0;
            for (double v : L)
                sum += v;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("tensor grid reproduces polynomials of its degree") {
    const Box b{Vec3(-1, 0.5, 2), Vec3(1, 2, 3)};
    const ChebGrid g(b, 3);
    CHECK(g.size() == 64);
    auto f = [](const Vec3& x) { return x[0] * x[0] * x[2]; };
    std::vector<double> L(g.size());
    std::mt19937_64 rng(5);
    for (int s = 0; s < 50; ++s) {
        const Vec3 x = random_in(b, rng);
        g.lagrange_all(x, L.data());
        double v = 0.0;
        for (std::size_t mu = 0; mu < g.size(); ++mu) {
            v += L[mu] * f(g.point(mu));
            CHECK(L[mu] == doctest::Approx(g.lagrange(mu, x)).epsilon(1e-13));
        }
        CHECK(v == doctest::Approx(f(x)).epsilon(1e-13));
    }
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        const auto mi = g.multi_index(lin);
        CHECK(g.index(mi[0], mi[1], mi[2]) == lin);
        CHECK(b.contains(g.point(lin), 1e-14));
    }
}

TEST_CASE("degenerate axes collapse to one point") {
    const ChebGrid g(Box{Vec3(0, 0, 1), Vec3(1, 1, 1)}, 4);
    CHECK(g.axis_orders()[2] == 0);
    CHECK(g.size() == 25);
    for (std::size_t mu = 0; mu < g.size(); ++mu)
        CHECK(g.point(mu)[2] == 1.0);
}

TEST_CASE("transfer matrix: parent interpolant equals child interpolant") {
    std::mt19937_64 rng(11);
    const Box parent{Vec3(0, 0, 0), Vec3(2, 1, 1)};
    const Box child{Vec3(0, 0, 0), Vec3(1, 1, 0.6)};
    for (int m : {0, 2, 5}) {
        const ChebGrid gp(parent, m), gc(child, m);
        const TransferMatrix Q(gp, gc);
        // arbitrary parent coefficients
        Eigen::VectorXcd fp(gp.size());
        for (std::size_t i = 0; i < gp.size(); ++i)
            fp[i] = complex(std::sin(1.0 + i), std::cos(2.0 * i));
        Eigen::VectorXcd fc(gc.size());
        Q.apply(fp.data(), fc.data());
        CHECK((Q.dense() * fp - fc).norm() < 1e-13 * fp.norm());
        std::vector<double> Lp(gp.size()), Lc(gc.size());
        for (int s = 0; s < 50; ++s) {
            const Vec3 x = random_in(child, rng);
            gp.lagrange_all(x, Lp.data());
            gc.lagrange_all(x, Lc.data());
            complex vp = 0, vc = 0;
            for (std::size_t i = 0; i < gp.size(); ++i)
                vp += Lp[i] * fp[i];
            for (std::size_t i = 0; i < gc.size(); ++i)
                vc += Lc[i] * fc[i];
            CHECK(std::abs(vp - vc) <= 1e-12 * std::max(1.0, std::abs(vp)));
        }
        // entries agree with L^parent_mu(xi^child_nu); rows sum to one
        const Eigen::MatrixXd D = Q.dense();
        for (std::size_t nu = 0; nu < gc.size(); ++nu) {
            CHECK(D.row(nu).sum() == doctest::Approx(1.0).epsilon(1e-13));
            for (std::size_t mu = 0; mu < gp.size(); mu += 7)
                CHECK(D(nu, mu) == doctest::Approx(gp.lagrange(mu, gc.point(nu))).epsilon(1e-12));
        }
        for (int k = 0; k < 3; ++k)
            CHECK((Q.factor(k).rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-13);
        // transpose application is the adjoint
        Eigen::VectorXcd yc(gc.size()), yp(gp.size());
        for (std::size_t i = 0; i < gc.size(); ++i)
            yc[i] = complex(std::cos(0.3 * i), std::sin(1.7 * i));
        Q.apply_transpose(yc.data(), yp.data());
        CHECK(std::abs(yc.dot(fc) - yp.dot(fp)) < 1e-12 * yc.norm() * fp.norm());
    }
}

TEST_CASE("transfer between identical boxes is the identity") {
    const Box b{Vec3(-1, -1, 0), Vec3(1, 0.5, 2)};
    const ChebGrid g(b, 4);
    const Eigen::MatrixXd D = TransferMatrix(g, g).dense();
    CHECK((D - Eigen::MatrixXd::Identity(D.rows(), D.cols())).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Lebesgue constants") {
    CHECK(lebesgue_constant(0) == doctest::Approx(1.0));
    CHECK(lebesgue_constant(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    double prev = 0.0;
    for (int m = 0; m <= 20; ++m) {
        const double L = lebesgue_constant(m);
        CHECK(L >= prev - 1e-12);
        // classical bound for Chebyshev points
        CHECK(L <= 2.0 / std::numbers::pi * std::log(m + 1.0) + 1.0 + 1e-12);
        prev = L;
    }
}
