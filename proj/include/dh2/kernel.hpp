#pragma once

#include <cstdint>
#include <vector>

#include "dh2/chebyshev.hpp"
#include "dh2/frequency.hpp"
#include "dh2/partition.hpp"

namespace dh2 {

// e^{-zeta |z|} / (4 pi |z|); throws std::domain_error for z = 0.
complex green(const ComplexFrequency& zeta, const Vec3& z);

// Kernel with the plane wave e^{-i Im zeta <z,c>} factored out:
//   e^{-Re zeta |z|} e^{-i Im zeta (|z| - <z,c>)} / (4 pi |z|)
complex green_modulated(const ComplexFrequency& zeta, const Vec3& z, const Vec3& c);

// Lebesgue constant of Chebyshev interpolation with m+1 points, exact
// (Rivlin): (1/(m+1)) sum_i cot((2i+1) pi / (4(m+1))).
double lebesgue_constant_exact(int m);

struct ErrorBoundConstants {
    double eta1 = 10.0, eta2 = 2.0, eta3 = 0.5;
    double beta_hat = 0.0;
    double rho0 = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
    double C1 = 0.0, C0 = 0.0;
    long long C1_argmax = 0, C0_argmax = 0;  // m attaining the suprema

    // Suprema over m are located by interval bisection with the monotone
    // Lebesgue constant, no fixed scan range.
    static ErrorBoundConstants compute(double eta1, double eta2, double eta3);
};

// C0 e^{-sigma Re zeta dist} / (4 pi dist) rho0^{-m}
double local_error_bound(double dist, const ErrorBoundConstants& k, int m, const ComplexFrequency& zeta);
inline double local_error_bound(const Block& b, const ErrorBoundConstants& k, int m, const ComplexFrequency& zeta) {
    return local_error_bound(b.dist, k, m, zeta);
}

enum class OrderMode { fixed, variable };

//
// Interpolation degrees per level (-1: no expansion). Degrees, not points:
// "m points per coordinate" corresponds to degree m - 1.
//
struct OrderSchedule {
    OrderMode mode = OrderMode::fixed;
    std::vector<int> level_orders;  // m_l
    std::vector<int> block_orders;  // m~_b per block of the partition, -1 for near blocks
    double epsilon = 0.0, c0 = 0.0, sigma_tilde = 0.0;

    int order(int level) const { return level_orders[level]; }
    int max_order() const;
};

OrderSchedule fixed_schedule(const BlockPartition& P, const ClusterTree& tree, int degree);

// ceil(c0 log(1/eps) - sigma_tilde Re zeta dist), or -1 if that quantity is negative
int base_order(double c0, double epsilon, double sigma_tilde, double re_zeta, double dist);

// Largest admissible epsilon: min{e^{-1}, h_min / eta2}.
double max_epsilon(double h_min, double eta2);

struct OrderParameters {
    double epsilon = 0.0, c0 = 0.0, sigma_tilde = 0.0;
};

// c0 and sigma~ chosen so that the local error bound stays below epsilon:
//   c0 = log(C0 / (4 pi eps delta_min)) / (log rho0 log(1/eps)), sigma~ = sigma / log rho0,
// delta_min = h_min / eta2. epsilon <= 0 selects min{e^{-5}, max_epsilon}.
OrderParameters default_order_parameters(const ErrorBoundConstants& k, double h_min, double epsilon = 0.0);

OrderSchedule select_orders(const BlockPartition& P, const ClusterTree& tree, const AdmissibilityParams& params,
                            double h_min, double epsilon, double c0, double sigma_tilde);

// Re zeta above which every far block gets m~_b = -1.
double nearfield_only_threshold(const MeshMetrics& metrics, double epsilon, double c0, double sigma_tilde,
                                double eta2);

// gamma(mu, nu) = G_c(zeta, xi_mu^t - xi_nu^s)
Eigen::MatrixXcd coupling_matrix(const ChebGrid& gt, const ChebGrid& gs, const ComplexFrequency& zeta,
                                 const Vec3& c);

// Directional interpolant of G on B_t x B_s:
//   e^{-i Im zeta <x - y, c>} sum_{mu,nu} L^t_mu(x) gamma(mu,nu) L^s_nu(y)
class InterpolatedKernel {
public:
    InterpolatedKernel(const Box& bt, const Box& bs, int degree, const ComplexFrequency& zeta, const Vec3& c);

    complex operator()(const Vec3& x, const Vec3& y) const;
    const Eigen::MatrixXcd& coupling() const { return gamma_; }

private:
    ChebGrid gt_, gs_;
    ComplexFrequency zeta_;
    Vec3 c_;
    Eigen::MatrixXcd gamma_;
};

// max |G - G~| over uniformly random pairs (x, y) in B_t x B_s
double sampled_interpolation_error(const Box& bt, const Box& bs, int degree, const ComplexFrequency& zeta,
                                   const Vec3& c, int samples = 1000, std::uint64_t seed = 1);

}  // namespace dh2
