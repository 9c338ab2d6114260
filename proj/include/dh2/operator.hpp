#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <unordered_map>
#include <vector>

#include "dh2/kernel.hpp"
#include "dh2/quadrature.hpp"

namespace dh2 {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

//
// Galerkin entries K_ij = int_{tau_i} int_{tau_j} G(zeta, x - y) for
// piecewise-constant basis functions. Entries are evaluated with the panel
// indices ordered (min, max), so K is exactly complex-symmetric.
//
class GalerkinAssembler {
public:
    GalerkinAssembler(const SurfaceMesh& mesh, const ComplexFrequency& zeta, int q);

    complex entry(std::size_t i, std::size_t j) const;

    // K restricted to rows x cols
    CMatrix block(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const;

    const SurfaceMesh& mesh() const { return mesh_; }
    const ComplexFrequency& zeta() const { return zeta_; }
    int order() const { return quad_.order(); }

    // quadrature points and weights (including the Jacobian) of panel i
    const Eigen::Matrix3Xd& points(std::size_t i) const { return points_[i]; }
    const Eigen::VectorXd& weights(std::size_t i) const { return weights_[i]; }

private:
    complex regular(std::size_t i, std::size_t j) const;

    const SurfaceMesh& mesh_;
    ComplexFrequency zeta_;
    PanelPairQuadrature quad_;
    std::vector<Eigen::Matrix3Xd> points_;
    std::vector<Eigen::VectorXd> weights_;
};

constexpr std::size_t default_dense_limit = 16384;

// Full Galerkin matrix; refuses n > limit.
CMatrix assemble_dense(const SurfaceMesh& mesh, const ComplexFrequency& zeta, int q,
                       std::size_t limit = default_dense_limit);

struct OperatorOptions {
    int quad_order = 5;
    int max_degree = 24;                          // guard against runaway variable orders
    std::size_t coupling_budget = std::size_t(2) << 30;  // bytes of stored coupling matrices
    bool share_couplings = true;                  // reuse coupling matrices of translated blocks (regular trees)
};

struct LevelStats {
    int level = 0;
    int order = -1;
    std::size_t directions = 0;
    std::size_t far_blocks = 0, near_blocks = 0;
    std::size_t near_entries = 0;
    std::size_t active_far_blocks = 0;  // far blocks with an expansion
    std::size_t basis_slots = 0;        // (cluster, direction) pairs carrying coefficients
    std::size_t coupling_entries = 0;   // complex scalars of sum_b |N_t| |N_s|
    std::size_t stored_coupling_entries = 0;
};

struct OperatorStats {
    std::vector<LevelStats> levels;
    std::size_t near_entries = 0;
    std::size_t leaf_coefficients = 0;
    std::size_t transfer_phases = 0;
    std::size_t coupling_entries = 0, stored_coupling_entries = 0;
    std::size_t on_the_fly_blocks = 0;
    double setup_seconds = 0.0;
};

//
// Directional H2 approximation of the Galerkin matrix:
//   K~ = K_near + sum_{far b} V_{t,c} gamma_b V_{s,c}^H,
// with V_{t,c}[i, mu] = int e^{-i Im zeta <x,c>} L^t_mu(x) b_i(x) at leaves and
// V_{t,c} = sum_{t'} V_{t',c'} diag(e^{-i Im zeta <xi^{t'}, c - c'>}) Q_{t',t}
// for inner clusters, c' = sd(c).
//
class DH2Operator {
public:
    DH2Operator(const SurfaceMesh& mesh, const ClusterTree& tree, const std::vector<DirectionSet>& dirs,
                const BlockPartition& P, const OrderSchedule& schedule, const ComplexFrequency& zeta,
                const OperatorOptions& options = {});

    std::size_t size() const { return tree_.dof_count(); }

    // y = K~ x and y = K~^H x, original index order
    CVector matvec(const CVector& x) const;
    CVector matvec_adjoint(const CVector& x) const;

    // y = K_near x
    CVector near_matvec(const CVector& x) const;

    // per-slot coefficient vectors, laid out in one buffer
    struct Slot {
        int cluster = 0;
        int direction = 0;
        int level = 0;
        std::size_t offset = 0, size = 0;
    };
    const std::vector<Slot>& slots() const { return slots_; }
    std::size_t coefficient_count() const { return coeff_size_; }
    int slot(int cluster, int direction) const;

    // forward: xhat_{t,c} = V_{t,c}^H x; backward: y += sum V_{t,c} yhat_{t,c}
    CVector forward(const CVector& x) const;
    CVector backward(const CVector& yhat) const;

    // explicit V_{t,c} (rows in label order of t), built by the recursion
    CMatrix basis_matrix(int slot) const;

    const ChebGrid& grid(int cluster) const { return grids_[cluster]; }
    const OperatorStats& stats() const { return stats_; }
    const OrderSchedule& schedule() const { return schedule_; }
    const BlockPartition& partition() const { return P_; }
    const ClusterTree& tree() const { return tree_; }

    // dense coupling matrix of far block i (empty if the block carries no expansion)
    CMatrix coupling(std::size_t block) const;

    void write_stats_csv(std::ostream& os) const;

private:
    void far_apply(const CVector& xhat, CVector& yhat, bool adjoint) const;
    void forward_perm(const complex* xp, CVector& xhat) const;
    void backward_perm(const CVector& yhat, complex* yp) const;

    const SurfaceMesh& mesh_;
    const ClusterTree& tree_;
    const std::vector<DirectionSet>& dirs_;
    const BlockPartition& P_;
    OrderSchedule schedule_;
    ComplexFrequency zeta_;
    OperatorOptions options_;

    std::vector<CMatrix> near_;  // per block index, empty for far blocks

    std::vector<ChebGrid> grids_;
    std::vector<Slot> slots_;
    std::vector<std::unordered_map<int, int>> slot_of_;  // cluster -> direction -> slot
    std::size_t coeff_size_ = 0;

    std::vector<CMatrix> leaf_basis_;  // per slot (leaves only): #t x |N_t|

    struct SonLink {
        int son_slot = -1;
        int transfer = -1;             // index into transfers_
        std::vector<complex> phase;    // empty if c' = c
    };
    std::vector<std::vector<SonLink>> links_;  // per slot
    std::vector<TransferMatrix> transfers_;

    struct FarLink {
        std::size_t block = 0;
        int row_slot = -1, col_slot = -1;
        int coupling = -1;  // index into couplings_, -1: evaluate on the fly
    };
    std::vector<FarLink> far_;
    std::vector<CMatrix> couplings_;
    std::vector<int> level_order_of_slot_;

    OperatorStats stats_;
};

//
// Power iteration for the largest singular value of A, given A and A^H.
// Start vector: seeded complex normal. Returns sqrt of the final Rayleigh
// quotient of A^H A.
//
using LinearMap = std::function<CVector(const CVector&)>;

struct PowerIterationResult {
    double norm = 0.0;
    double residual = 0.0;  // |A^H A v - lambda v| / lambda at the last step
    int iterations = 0;
};

PowerIterationResult power_iteration(const LinearMap& A, const LinearMap& AH, std::size_t n, int iters = 30,
                                     std::uint64_t seed = 1);

struct SpectralError {
    double relative = 0.0;  // |K - K~|_2 / |K|_2
    double error_norm = 0.0;
    double matrix_norm = 0.0;
    double residual = 0.0;
};

SpectralError spectral_error(const DH2Operator& op, const CMatrix& dense, int iters = 30, std::uint64_t seed = 1);

}  // namespace dh2
