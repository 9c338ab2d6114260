#include "dh2/operator.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

namespace dh2 {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

// sin and cos of an array of moderate arguments (|t| < 2^20), written with
// array expressions so that they vectorize
void sincos_array(const Eigen::ArrayXd& t, Eigen::ArrayXd& s, Eigen::ArrayXd& c) {
    constexpr double magic = 6755399441055744.0;  // 1.5 * 2^52, rounds to nearest integer
    constexpr double pio2_1 = 1.57079632673412561417e+00;
    constexpr double pio2_1t = 6.07710050650619224932e-11;
    const Eigen::ArrayXd k = (t * (2.0 / std::numbers::pi) + magic) - magic;
    const Eigen::ArrayXd x = (t - k * pio2_1) - k * pio2_1t;
    const Eigen::ArrayXd z = x * x;
    const Eigen::ArrayXd ps =
        x + x * z *
                (-1.66666666666666307295e-1 +
                 z * (8.33333333332211858878e-3 +
                      z * (-1.98412698295895385996e-4 +
                           z * (2.75573136213857245213e-6 +
                                z * (-2.50507477628578072866e-8 + z * 1.58962301576546568060e-10)))));
    const Eigen::ArrayXd pc =
        1.0 - 0.5 * z +
        z * z *
            (4.16666666666665929218e-2 +
             z * (-1.38888888888730564116e-3 +
                  z * (2.48015872888517045348e-5 +
                       z * (-2.75573141792967388112e-7 +
                            z * (2.08757008419747316778e-9 + z * -1.13585365213876817300e-11)))));
    const Eigen::ArrayXd q = k - 4.0 * ((k * 0.25 + magic) - magic - ((k * 0.25 + magic) - magic > k * 0.25).cast<double>());
    s = (q == 0.0).select(ps, (q == 1.0).select(pc, (q == 2.0).select(-ps, -pc)));
    c = (q == 0.0).select(pc, (q == 1.0).select(-ps, (q == 2.0).select(-pc, ps)));
}

}  // namespace

GalerkinAssembler::GalerkinAssembler(const SurfaceMesh& mesh, const ComplexFrequency& zeta, int q)
    : mesh_(mesh), zeta_(zeta), quad_(q) {
    const auto& rule = quad_.triangle();
    const std::size_t nq = rule.points.size();
    points_.resize(mesh.size());
    weights_.resize(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const Panel& p = mesh.panel(i);
        points_[i].resize(3, Eigen::Index(nq));
        weights_[i].resize(Eigen::Index(nq));
        for (std::size_t k = 0; k < nq; ++k) {
            points_[i].col(Eigen::Index(k)) = p.map(rule.points[k][0], rule.points[k][1]);
            weights_[i][Eigen::Index(k)] = 2.0 * p.area * rule.weights[k];
        }
    }
}

complex GalerkinAssembler::regular(std::size_t i, std::size_t j) const {
    const auto& X = points_[i];
    const auto& Y = points_[j];
    const Eigen::Index nx = X.cols(), ny = Y.cols();
    thread_local Eigen::ArrayXd r, w;
    r.resize(nx * ny);
    w.resize(nx * ny);
    for (Eigen::Index a = 0; a < nx; ++a) {
        r.segment(a * ny, ny) = (Y.colwise() - X.col(a)).colwise().norm().transpose().array();
        w.segment(a * ny, ny) = weights_[i][a] * weights_[j].array();
    }
    thread_local Eigen::ArrayXd sn, cs;
    const Eigen::ArrayXd amp = (-zeta_.re * r).exp() * w / r;
    if (zeta_.im == 0.0)
        return complex(amp.sum() / four_pi, 0.0);
    sincos_array(zeta_.im * r, sn, cs);
    return complex((amp * cs).sum(), -(amp * sn).sum()) / four_pi;
}

complex GalerkinAssembler::entry(std::size_t i, std::size_t j) const {
    if (i > j)
        std::swap(i, j);
    // pairs without a common vertex get the plain tensor rule, same as in the singular path
    const auto& ti = mesh_.triangles()[i];
    const auto& tj = mesh_.triangles()[j];
    bool touch = false;
    for (auto a : ti)
        for (auto b : tj)
            touch = touch || a == b;
    if (!touch)
        return regular(i, j);
    const complex z = zeta_.value();
    return quad_.integrate(
        [z](const Vec3& x, const Vec3& y) {
            const double r = (x - y).norm();
            return std::exp(-z * r) / (four_pi * r);
        },
        mesh_.panel(i), mesh_.panel(j));
}

CMatrix GalerkinAssembler::block(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
    CMatrix K(rows.size(), cols.size());
    for (std::size_t b = 0; b < cols.size(); ++b)
        for (std::size_t a = 0; a < rows.size(); ++a)
            K(Eigen::Index(a), Eigen::Index(b)) = entry(rows[a], cols[b]);
    return K;
}

CMatrix assemble_dense(const SurfaceMesh& mesh, const ComplexFrequency& zeta, int q, std::size_t limit) {
    const std::size_t n = mesh.size();
    if (n > limit)
        throw std::length_error("assemble_dense: n = " + std::to_string(n) + " exceeds the dense limit " +
                                std::to_string(limit));
    const GalerkinAssembler A(mesh, zeta, q);
    CMatrix K(n, n);
    const long long nn = (long long)n;
#pragma omp parallel for schedule(dynamic, 8)
    for (long long j = 0; j < nn; ++j)
        for (long long i = 0; i <= j; ++i) {
            const complex v = A.entry(std::size_t(i), std::size_t(j));
            K(i, j) = v;
            K(j, i) = v;
        }
    return K;
}

namespace {

std::vector<std::size_t> index_range(const ClusterTree& tree, const Cluster& t) {
    return {tree.permutation().begin() + long(t.begin), tree.permutation().begin() + long(t.end)};
}

}  // namespace

DH2Operator::DH2Operator(const SurfaceMesh& mesh, const ClusterTree& tree, const std::vector<DirectionSet>& dirs,
                         const BlockPartition& P, const OrderSchedule& schedule, const ComplexFrequency& zeta,
                         const OperatorOptions& options)
    : mesh_(mesh), tree_(tree), dirs_(dirs), P_(P), schedule_(schedule), zeta_(zeta), options_(options) {
    const auto t0 = std::chrono::steady_clock::now();
    const int L = tree.depth();
    if (int(schedule.level_orders.size()) != L + 1 || schedule.block_orders.size() != P.size())
        throw std::invalid_argument("DH2Operator: schedule does not match tree/partition");
    if (int(dirs.size()) != L + 1)
        throw std::invalid_argument("DH2Operator: one direction set per level required");
    if (schedule.max_order() > options.max_degree)
        throw std::invalid_argument("DH2Operator: interpolation degree " + std::to_string(schedule.max_order()) +
                                    " exceeds max_degree " + std::to_string(options.max_degree));
    const double kappa = zeta.im;

    const GalerkinAssembler assembler(mesh, zeta, options.quad_order);

    // nearfield
    // K is complex-symmetric, so (s,t) is the transpose of (t,s)
    near_.resize(P.size());
    std::map<std::pair<int, int>, std::size_t> near_of;
    for (std::size_t b = 0; b < P.size(); ++b)
        if (!P.blocks[b].is_far())
            near_of.emplace(std::make_pair(P.blocks[b].t, P.blocks[b].s), b);
    std::vector<std::size_t> near_ids, mirrored;
    for (const auto& [ts, b] : near_of) {
        if (ts.first > ts.second && near_of.count({ts.second, ts.first}))
            mirrored.push_back(b);
        else
            near_ids.push_back(b);
    }
#pragma omp parallel for schedule(dynamic, 1)
    for (long long k = 0; k < (long long)near_ids.size(); ++k) {
        const Block& b = P.blocks[near_ids[k]];
        near_[near_ids[k]] = assembler.block(index_range(tree, tree.cluster(b.t)), index_range(tree, tree.cluster(b.s)));
    }
    for (std::size_t b : mirrored)
        near_[b] = near_[near_of.at({P.blocks[b].s, P.blocks[b].t})].transpose();

    // interpolation grids
    grids_.resize(tree.cluster_count());
    for (const auto& t : tree.clusters())
        if (schedule.order(t.level) >= 0)
            grids_[t.id] = ChebGrid(t.box, schedule.order(t.level));

    // active (cluster, direction) pairs, closed under sd(c) towards the leaves
    std::vector<std::set<std::pair<int, int>>> active(L + 1);
    for (const auto& b : P.blocks)
        if (b.is_far() && schedule.order(b.level) >= 0) {
            active[b.level].emplace(b.t, b.direction);
            active[b.level].emplace(b.s, b.direction);
        }
    for (int l = 0; l < L; ++l)
        for (const auto& [t, c] : active[l])
            for (int son : tree.cluster(t).sons)
                active[l + 1].emplace(son, son_direction(dirs[l].directions[c], dirs[l + 1]));

    slot_of_.resize(tree.cluster_count());
    for (int l = 0; l <= L; ++l)
        for (const auto& [t, c] : active[l]) {
            Slot s;
            s.cluster = t;
            s.direction = c;
            s.level = l;
            s.offset = coeff_size_;
            s.size = grids_[t].size();
            coeff_size_ += s.size;
            slot_of_[t][c] = int(slots_.size());
            slots_.push_back(s);
        }

    // leaf bases
    leaf_basis_.resize(slots_.size());
    links_.resize(slots_.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long si = 0; si < (long long)slots_.size(); ++si) {
        const Slot& s = slots_[si];
        const Cluster& t = tree.cluster(s.cluster);
        if (!t.is_leaf())
            continue;
        const ChebGrid& g = grids_[t.id];
        const Vec3& c = dirs[s.level].directions[s.direction];
        CMatrix V = CMatrix::Zero(Eigen::Index(t.size()), Eigen::Index(g.size()));
        Eigen::VectorXd l(g.size());
        for (std::size_t r = 0; r < t.size(); ++r) {
            const std::size_t i = tree.permutation()[t.begin + r];
            const auto& X = assembler.points(i);
            const auto& w = assembler.weights(i);
            for (Eigen::Index p = 0; p < X.cols(); ++p) {
                g.lagrange_all(X.col(p), l.data());
                const double ph = -kappa * X.col(p).dot(c);
                V.row(Eigen::Index(r)) += (w[p] * complex(std::cos(ph), std::sin(ph))) * l.transpose().cast<complex>();
            }
        }
        leaf_basis_[si] = std::move(V);
    }

    // transfers
    std::map<std::pair<int, int>, int> transfer_of;  // (father, son) -> index
    for (std::size_t si = 0; si < slots_.size(); ++si) {
        const Slot& s = slots_[si];
        const Cluster& t = tree.cluster(s.cluster);
        const Vec3& c = dirs[s.level].directions[s.direction];
        for (int son : t.sons) {
            SonLink link;
            const int cs = son_direction(c, dirs[s.level + 1]);
            link.son_slot = slot_of_[son].at(cs);
            auto [it, fresh] = transfer_of.emplace(std::make_pair(t.id, son), int(transfers_.size()));
            if (fresh)
                transfers_.emplace_back(grids_[t.id], grids_[son]);
            link.transfer = it->second;
            const Vec3 dc = c - dirs[s.level + 1].directions[cs];
            if (kappa != 0 && dc.squaredNorm() > 0) {
                const ChebGrid& gs = grids_[son];
                link.phase.resize(gs.size());
                for (std::size_t nu = 0; nu < gs.size(); ++nu) {
                    const double ph = -kappa * gs.point(nu).dot(dc);
                    link.phase[nu] = complex(std::cos(ph), std::sin(ph));
                }
                stats_.transfer_phases += gs.size();
            }
            links_[si].push_back(std::move(link));
        }
    }

    // couplings
    const bool share = options.share_couplings && tree.mode() == TreeMode::regular;
    std::map<std::tuple<int, int, int, int, int>, int> shared;
    std::vector<std::size_t> to_compute;  // block index per stored coupling
    std::size_t stored_bytes = 0;
    for (std::size_t bi = 0; bi < P.size(); ++bi) {
        const Block& b = P.blocks[bi];
        if (!b.is_far() || schedule.order(b.level) < 0)
            continue;
        FarLink f;
        f.block = bi;
        f.row_slot = slot_of_[b.t].at(b.direction);
        f.col_slot = slot_of_[b.s].at(b.direction);
        const std::size_t bytes = grids_[b.t].size() * grids_[b.s].size() * sizeof(complex);
        if (share) {
            const Eigen::Vector3i d = tree.cluster(b.t).grid - tree.cluster(b.s).grid;
            const auto key = std::make_tuple(b.level, d[0], d[1], d[2], b.direction);
            if (auto it = shared.find(key); it != shared.end()) {
                f.coupling = it->second;
            } else if (stored_bytes + bytes <= options.coupling_budget) {
                f.coupling = int(to_compute.size());
                shared.emplace(key, f.coupling);
                to_compute.push_back(bi);
                stored_bytes += bytes;
            }
        } else if (stored_bytes + bytes <= options.coupling_budget) {
            f.coupling = int(to_compute.size());
            to_compute.push_back(bi);
            stored_bytes += bytes;
        }
        far_.push_back(f);
    }
    couplings_.resize(to_compute.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long k = 0; k < (long long)to_compute.size(); ++k) {
        const Block& b = P.blocks[to_compute[k]];
        couplings_[k] = coupling_matrix(grids_[b.t], grids_[b.s], zeta, dirs[b.level].directions[b.direction]);
    }

    // statistics
    stats_.levels.resize(L + 1);
    for (int l = 0; l <= L; ++l) {
        stats_.levels[l].level = l;
        stats_.levels[l].order = schedule.order(l);
        stats_.levels[l].directions = dirs[l].size();
    }
    for (std::size_t bi = 0; bi < P.size(); ++bi) {
        const Block& b = P.blocks[bi];
        auto& ls = stats_.levels[b.level];
        if (b.is_far()) {
            ++ls.far_blocks;
        } else {
            ++ls.near_blocks;
            ls.near_entries += std::size_t(near_[bi].size());
        }
    }
    for (const auto& f : far_) {
        const Block& b = P.blocks[f.block];
        auto& ls = stats_.levels[b.level];
        ++ls.active_far_blocks;
        ls.coupling_entries += grids_[b.t].size() * grids_[b.s].size();
        if (f.coupling < 0)
            ++stats_.on_the_fly_blocks;
    }
    for (std::size_t k = 0; k < to_compute.size(); ++k)
        stats_.levels[P.blocks[to_compute[k]].level].stored_coupling_entries += std::size_t(couplings_[k].size());
    for (const auto& s : slots_)
        ++stats_.levels[s.level].basis_slots;
    for (const auto& V : leaf_basis_)
        stats_.leaf_coefficients += std::size_t(V.size());
    for (const auto& ls : stats_.levels) {
        stats_.near_entries += ls.near_entries;
        stats_.coupling_entries += ls.coupling_entries;
        stats_.stored_coupling_entries += ls.stored_coupling_entries;
    }
    stats_.setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int DH2Operator::slot(int cluster, int direction) const {
    const auto& m = slot_of_[cluster];
    auto it = m.find(direction);
    return it == m.end() ? -1 : it->second;
}

void DH2Operator::forward_perm(const complex* xp, CVector& xhat) const {
    xhat.setZero(Eigen::Index(coeff_size_));
    std::vector<complex> tmp;
    for (std::size_t k = slots_.size(); k-- > 0;) {
        const Slot& s = slots_[k];
        const Cluster& t = tree_.cluster(s.cluster);
        auto out = xhat.segment(Eigen::Index(s.offset), Eigen::Index(s.size));
        if (t.is_leaf()) {
            const Eigen::Map<const CVector> x(xp + t.begin, Eigen::Index(t.size()));
            out.noalias() = leaf_basis_[k].adjoint() * x;
            continue;
        }
        std::vector<complex> acc(s.size);
        for (const auto& link : links_[k]) {
            const Slot& ss = slots_[link.son_slot];
            tmp.assign(xhat.data() + ss.offset, xhat.data() + ss.offset + ss.size);
            for (std::size_t nu = 0; nu < link.phase.size(); ++nu)
                tmp[nu] *= std::conj(link.phase[nu]);
            std::vector<complex> part(s.size);
            transfers_[link.transfer].apply_transpose(tmp.data(), part.data());
            for (std::size_t mu = 0; mu < s.size; ++mu)
                acc[mu] += part[mu];
        }
        for (std::size_t mu = 0; mu < s.size; ++mu)
            out[Eigen::Index(mu)] = acc[mu];
    }
}

void DH2Operator::backward_perm(const CVector& yhat_in, complex* yp) const {
    CVector yhat = yhat_in;
    std::vector<complex> tmp;
    for (std::size_t k = 0; k < slots_.size(); ++k) {
        const Slot& s = slots_[k];
        const Cluster& t = tree_.cluster(s.cluster);
        const complex* in = yhat.data() + s.offset;
        if (t.is_leaf()) {
            Eigen::Map<CVector> y(yp + t.begin, Eigen::Index(t.size()));
            y.noalias() += leaf_basis_[k] * Eigen::Map<const CVector>(in, Eigen::Index(s.size));
            continue;
        }
        for (const auto& link : links_[k]) {
            const Slot& ss = slots_[link.son_slot];
            tmp.assign(ss.size, 0.0);
            transfers_[link.transfer].apply(in, tmp.data());
            complex* dst = yhat.data() + ss.offset;
            if (link.phase.empty())
                for (std::size_t nu = 0; nu < ss.size; ++nu)
                    dst[nu] += tmp[nu];
            else
                for (std::size_t nu = 0; nu < ss.size; ++nu)
                    dst[nu] += link.phase[nu] * tmp[nu];
        }
    }
}

void DH2Operator::far_apply(const CVector& xhat, CVector& yhat, bool adjoint) const {
    for (const auto& f : far_) {
        const Slot& rs = slots_[f.row_slot];
        const Slot& cs = slots_[f.col_slot];
        CMatrix onfly;
        const CMatrix* g = nullptr;
        if (f.coupling >= 0) {
            g = &couplings_[f.coupling];
        } else {
            const Block& b = P_.blocks[f.block];
            onfly = coupling_matrix(grids_[b.t], grids_[b.s], zeta_, dirs_[b.level].directions[b.direction]);
            g = &onfly;
        }
        if (!adjoint)
            yhat.segment(Eigen::Index(rs.offset), Eigen::Index(rs.size)).noalias() +=
                *g * xhat.segment(Eigen::Index(cs.offset), Eigen::Index(cs.size));
        else
            yhat.segment(Eigen::Index(cs.offset), Eigen::Index(cs.size)).noalias() +=
                g->adjoint() * xhat.segment(Eigen::Index(rs.offset), Eigen::Index(rs.size));
    }
}

namespace {

CVector to_perm(const ClusterTree& tree, const CVector& x) {
    if (std::size_t(x.size()) != tree.dof_count())
        throw std::invalid_argument("vector length does not match the operator size");
    CVector xp(x.size());
    const auto& perm = tree.permutation();
    for (std::size_t k = 0; k < perm.size(); ++k)
        xp[Eigen::Index(k)] = x[Eigen::Index(perm[k])];
    return xp;
}

CVector from_perm(const ClusterTree& tree, const CVector& yp) {
    CVector y(yp.size());
    const auto& perm = tree.permutation();
    for (std::size_t k = 0; k < perm.size(); ++k)
        y[Eigen::Index(perm[k])] = yp[Eigen::Index(k)];
    return y;
}

}  // namespace

CVector DH2Operator::near_matvec(const CVector& x) const {
    const CVector xp = to_perm(tree_, x);
    CVector yp = CVector::Zero(xp.size());
    for (std::size_t bi = 0; bi < P_.size(); ++bi) {
        const Block& b = P_.blocks[bi];
        if (b.is_far())
            continue;
        const Cluster& t = tree_.cluster(b.t);
        const Cluster& s = tree_.cluster(b.s);
        yp.segment(Eigen::Index(t.begin), Eigen::Index(t.size())).noalias() +=
            near_[bi] * xp.segment(Eigen::Index(s.begin), Eigen::Index(s.size()));
    }
    return from_perm(tree_, yp);
}

CVector DH2Operator::matvec(const CVector& x) const {
    const CVector xp = to_perm(tree_, x);
    CVector yp = CVector::Zero(xp.size());
    for (std::size_t bi = 0; bi < P_.size(); ++bi) {
        const Block& b = P_.blocks[bi];
        if (b.is_far())
            continue;
        const Cluster& t = tree_.cluster(b.t);
        const Cluster& s = tree_.cluster(b.s);
        yp.segment(Eigen::Index(t.begin), Eigen::Index(t.size())).noalias() +=
            near_[bi] * xp.segment(Eigen::Index(s.begin), Eigen::Index(s.size()));
    }
    if (!far_.empty()) {
        CVector xhat, yhat = CVector::Zero(Eigen::Index(coeff_size_));
        forward_perm(xp.data(), xhat);
        far_apply(xhat, yhat, false);
        backward_perm(yhat, yp.data());
    }
    return from_perm(tree_, yp);
}

CVector DH2Operator::matvec_adjoint(const CVector& x) const {
    const CVector xp = to_perm(tree_, x);
    CVector yp = CVector::Zero(xp.size());
    for (std::size_t bi = 0; bi < P_.size(); ++bi) {
        const Block& b = P_.blocks[bi];
        if (b.is_far())
            continue;
        const Cluster& t = tree_.cluster(b.t);
        const Cluster& s = tree_.cluster(b.s);
        yp.segment(Eigen::Index(s.begin), Eigen::Index(s.size())).noalias() +=
            near_[bi].adjoint() * xp.segment(Eigen::Index(t.begin), Eigen::Index(t.size()));
    }
    if (!far_.empty()) {
        CVector xhat, yhat = CVector::Zero(Eigen::Index(coeff_size_));
        forward_perm(xp.data(), xhat);
        far_apply(xhat, yhat, true);
        backward_perm(yhat, yp.data());
    }
    return from_perm(tree_, yp);
}

CVector DH2Operator::forward(const CVector& x) const {
    const CVector xp = to_perm(tree_, x);
    CVector xhat;
    forward_perm(xp.data(), xhat);
    return xhat;
}

CVector DH2Operator::backward(const CVector& yhat) const {
    if (std::size_t(yhat.size()) != coeff_size_)
        throw std::invalid_argument("backward: coefficient vector has the wrong length");
    CVector yp = CVector::Zero(Eigen::Index(size()));
    backward_perm(yhat, yp.data());
    return from_perm(tree_, yp);
}

CMatrix DH2Operator::basis_matrix(int k) const {
    const Slot& s = slots_.at(std::size_t(k));
    const Cluster& t = tree_.cluster(s.cluster);
    if (t.is_leaf())
        return leaf_basis_[k];
    CMatrix V(Eigen::Index(t.size()), Eigen::Index(s.size));
    Eigen::Index row = 0;
    for (const auto& link : links_[k]) {
        const CMatrix Vs = basis_matrix(link.son_slot);
        CMatrix E = transfers_[link.transfer].dense().cast<complex>();
        for (std::size_t nu = 0; nu < link.phase.size(); ++nu)
            E.row(Eigen::Index(nu)) *= link.phase[nu];
        V.middleRows(row, Vs.rows()) = Vs * E;
        row += Vs.rows();
    }
    return V;
}

CMatrix DH2Operator::coupling(std::size_t block) const {
    for (const auto& f : far_)
        if (f.block == block) {
            if (f.coupling >= 0)
                return couplings_[f.coupling];
            const Block& b = P_.blocks[block];
            return coupling_matrix(grids_[b.t], grids_[b.s], zeta_, dirs_[b.level].directions[b.direction]);
        }
    return {};
}

void DH2Operator::write_stats_csv(std::ostream& os) const {
    os << "level,order,directions,far_blocks,active_far_blocks,near_blocks,near_entries,basis_slots,coupling_entries,"
          "stored_coupling_entries\n";
    for (const auto& l : stats_.levels)
        os << l.level << ',' << l.order << ',' << l.directions << ',' << l.far_blocks << ',' << l.active_far_blocks
           << ',' << l.near_blocks << ',' << l.near_entries << ',' << l.basis_slots << ',' << l.coupling_entries << ','
           << l.stored_coupling_entries << '\n';
}

PowerIterationResult power_iteration(const LinearMap& A, const LinearMap& AH, std::size_t n, int iters,
                                     std::uint64_t seed) {
    if (iters < 1)
        throw std::invalid_argument("power_iteration: need at least one iteration");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    CVector v(static_cast<Eigen::Index>(n));
    for (auto& z : v)
        z = complex(nd(rng), nd(rng));
    v.normalize();
    PowerIterationResult res;
    for (int k = 0; k < iters; ++k) {
        const CVector u = AH(A(v));
        const double lambda = v.dot(u).real();
        const double nu = u.norm();
        res.iterations = k + 1;
        if (!(nu > 0)) {
            res.norm = 0.0;
            res.residual = 0.0;
            return res;
        }
        res.norm = std::sqrt(std::max(lambda, 0.0));
        res.residual = (u - lambda * v).norm() / std::max(lambda, std::numeric_limits<double>::min());
        v = u / nu;
    }
    return res;
}

SpectralError spectral_error(const DH2Operator& op, const CMatrix& dense, int iters, std::uint64_t seed) {
    const std::size_t n = op.size();
    if (std::size_t(dense.rows()) != n || std::size_t(dense.cols()) != n)
        throw std::invalid_argument("spectral_error: dense matrix does not match the operator");
    SpectralError e;
    const auto err = power_iteration([&](const CVector& x) -> CVector { return dense * x - op.matvec(x); },
                                     [&](const CVector& x) -> CVector { return dense.adjoint() * x - op.matvec_adjoint(x); },
                                     n, iters, seed);
    const auto nrm = power_iteration([&](const CVector& x) -> CVector { return dense * x; },
                                     [&](const CVector& x) -> CVector { return dense.adjoint() * x; }, n, iters, seed);
    e.error_norm = err.norm;
    e.matrix_norm = nrm.norm;
    e.residual = err.residual;
    e.relative = nrm.norm > 0 ? err.norm / nrm.norm : 0.0;
    return e;
}

}  // namespace dh2
