#include "dh2/cluster_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace dh2 {

std::vector<std::size_t> ClusterTree::label(int id) const {
    const auto& t = clusters_[id];
    std::vector<std::size_t> l(perm_.begin() + t.begin, perm_.begin() + t.end);
    std::sort(l.begin(), l.end());
    return l;
}

namespace {

constexpr int max_depth = 48;

struct Builder {
    const SurfaceMesh& mesh;
    std::size_t leaf_size;
    TreeMode mode;
    std::vector<Cluster>& clusters;
    std::vector<std::size_t>& perm;

    int build(std::size_t begin, std::size_t end, Box cell, int level, int father) {
        const int id = int(clusters.size());
        clusters.emplace_back();
        {
            Cluster& t = clusters.back();
            t.id = id;
            t.level = level;
            t.father = father;
            t.begin = begin;
            t.end = end;
        }

        std::vector<std::pair<std::size_t, Box>> parts;
        while (end - begin > leaf_size && level < max_depth) {
            const Vec3 w = cell.width();
            int axis = 0;
            for (int k = 1; k < 3; ++k)
                if (w[k] > w[axis])
                    axis = k;
            if (w[axis] <= 0)
                break;
            const double mid = 0.5 * (cell.lo[axis] + cell.hi[axis]);
            auto split = std::partition(perm.begin() + begin, perm.begin() + end,
                                        [&](std::size_t i) { return mesh.panel(i).barycenter[axis] < mid; });
            const std::size_t m = std::size_t(split - perm.begin());
            Box left = cell, right = cell;
            left.hi[axis] = mid;
            right.lo[axis] = mid;

            if (mode == TreeMode::tight && (m == begin || m == end)) {
                // contract the single-son chain: keep bisecting at this level
                cell = (m == begin) ? right : left;
                continue;
            }
            if (m > begin)
                parts.emplace_back(m, left);
            if (m < end)
                parts.emplace_back(end, right);
            break;
        }
        clusters[id].cell = cell;

        std::size_t lo = begin;
        std::vector<int> sons;
        for (const auto& [hi, box] : parts) {
            sons.push_back(build(lo, hi, box, level + 1, id));
            lo = hi;
        }
        if (sons.empty())
            std::sort(perm.begin() + begin, perm.begin() + end);
        clusters[id].sons = std::move(sons);
        return id;
    }
};

}  // namespace

ClusterTree build_cluster_tree(const SurfaceMesh& mesh, std::size_t leaf_size, TreeMode mode) {
    if (leaf_size == 0)
        throw std::invalid_argument("build_cluster_tree: leaf_size must be positive");
    if (mesh.size() == 0)
        throw std::invalid_argument("build_cluster_tree: empty mesh");

    ClusterTree tree;
    tree.mode_ = mode;
    tree.leaf_size_ = leaf_size;
    tree.perm_.resize(mesh.size());
    std::iota(tree.perm_.begin(), tree.perm_.end(), 0);

    // bounding cube of the surface
    const Box bb = mesh.bounding_box();
    const double side = bb.width().maxCoeff();
    const Vec3 c = bb.center();
    const Box root{c - Vec3::Constant(0.5 * side), c + Vec3::Constant(0.5 * side)};

    Builder b{mesh, leaf_size, mode, tree.clusters_, tree.perm_};
    b.build(0, mesh.size(), root, 0, -1);

    int depth = 0;
    for (const auto& t : tree.clusters_)
        depth = std::max(depth, t.level);
    tree.levels_.assign(depth + 1, {});
    for (const auto& t : tree.clusters_)
        tree.levels_[t.level].push_back(t.id);

    tree.padding_.assign(depth + 1, Vec3::Zero());
    for (auto& t : tree.clusters_) {
        const Vec3 w = t.cell.width();
        for (int k = 0; k < 3; ++k)
            t.grid[k] = w[k] > 0 ? int(std::lround((t.cell.lo[k] - root.lo[k]) / w[k])) : 0;
    }

    if (mode == TreeMode::regular) {
        // uniform per-level padding: the smallest one that restores containment
        for (const auto& t : tree.clusters_) {
            Vec3& pad = tree.padding_[t.level];
            for (std::size_t k = t.begin; k < t.end; ++k)
                for (const auto& p : mesh.panel(tree.perm_[k]).corner)
                    pad = pad.cwiseMax((t.cell.lo - p).cwiseMax(p - t.cell.hi));
        }
        for (auto& t : tree.clusters_)
            t.box = Box{t.cell.lo - tree.padding_[t.level], t.cell.hi + tree.padding_[t.level]};
    } else {
        for (auto& t : tree.clusters_) {
            t.box = Box::empty();
            for (std::size_t k = t.begin; k < t.end; ++k)
                for (const auto& p : mesh.panel(tree.perm_[k]).corner)
                    t.box.include(p);
        }
    }

    tree.delta_.assign(depth + 1, 0.0);
    for (auto& t : tree.clusters_) {
        t.center = t.box.center();
        tree.delta_[t.level] = std::max(tree.delta_[t.level], t.box.diameter());
    }
    return tree;
}

void ClusterTree::dump(std::ostream& os) const {
    auto rec = [&](auto&& self, int id) -> void {
        const Cluster& t = clusters_[id];
        os << std::string(2 * t.level, ' ') << "level " << t.level << "  [" << t.box.lo.transpose() << "] - ["
           << t.box.hi.transpose() << "]  #dofs " << t.size() << '\n';
        for (int s : t.sons)
            self(self, s);
    };
    rec(rec, 0);
}

TreeDiagnostics check_tree_assumptions(const ClusterTree& tree, const SurfaceMesh& mesh) {
    TreeDiagnostics d;
    const int L = tree.depth();
    d.congruence_defect.assign(L + 1, 0.0);
    d.delta.resize(L + 1);
    d.min_leaf_size = std::numeric_limits<std::size_t>::max();
    d.c_vol = std::numeric_limits<double>::infinity();

    for (int l = 0; l <= L; ++l) {
        d.delta[l] = tree.delta(l);
        const auto& ids = tree.level(l);
        const Vec3 ref = tree.cluster(ids.front()).box.width();
        for (int id : ids)
            d.congruence_defect[l] =
                std::max(d.congruence_defect[l], (tree.cluster(id).box.width() - ref).cwiseAbs().maxCoeff());

        // overlap: how many same-level boxes contain a sample point
        std::vector<Vec3> samples;
        for (int id : ids) {
            const Box& b = tree.cluster(id).box;
            samples.push_back(b.center());
            for (int c = 0; c < 8; ++c)
                samples.emplace_back((c & 1) ? b.hi[0] : b.lo[0], (c & 2) ? b.hi[1] : b.lo[1],
                                     (c & 4) ? b.hi[2] : b.lo[2]);
        }
        for (const auto& p : samples) {
            int cnt = 0;
            for (int id : ids)
                cnt += tree.cluster(id).box.contains(p) ? 1 : 0;
            d.overlap = std::max(d.overlap, cnt);
        }
    }

    for (const auto& t : tree.clusters()) {
        d.max_sons = std::max<int>(d.max_sons, int(t.sons.size()));
        if (t.sons.size() == 1)
            ++d.single_son_clusters;
        for (int s : t.sons) {
            const double ds = tree.cluster(s).box.diameter();
            if (ds > 0)
                d.son_diameter_ratio = std::max(d.son_diameter_ratio, t.box.diameter() / ds);
        }
        if (t.is_leaf()) {
            d.min_leaf_size = std::min(d.min_leaf_size, t.size());
            d.max_leaf_size = std::max(d.max_leaf_size, t.size());
        }
        double area = 0.0;
        for (std::size_t k = t.begin; k < t.end; ++k) {
            const Panel& p = mesh.panel(tree.permutation()[k]);
            area += p.area;
            for (const auto& c : p.corner)
                if (!t.box.contains(c, 1e-12))
                    d.containment = false;
        }
        const double r = t.box.diameter() * t.box.diameter() / area;
        d.c_vol = std::min(d.c_vol, r);
        d.C_vol = std::max(d.C_vol, r);
    }

    double sum = 0.0;
    int cnt = 0;
    for (int l = 0; l + 3 <= L; ++l) {
        sum += d.delta[l] / d.delta[l + 3];
        ++cnt;
    }
    d.decay_ratio = cnt ? sum / cnt : 0.0;
    return d;
}

}  // namespace dh2
