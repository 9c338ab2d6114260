#include "dh2/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace dh2 {

void AdmissibilityParams::validate() const {
    if (!(eta1 > 0 && eta2 > 0 && eta3 > 0))
        throw std::invalid_argument("admissibility parameters must be positive");
    if (!(eta3 < 1))
        throw std::invalid_argument("eta3 must lie in (0,1)");
}

AdmissibilityCheck check_admissibility(const Box& bt, const Box& bs, const Vec3& c,
                                       const AdmissibilityParams& params) {
    AdmissibilityCheck r;
    const double dist = box_distance(bt, bs);
    if (!(dist > 0))
        return r;
    const double k = std::abs(params.zeta.im);
    const double diam2 = std::max(bt.width().squaredNorm(), bs.width().squaredNorm());
    const double diam = std::sqrt(diam2);

    r.distance = diam <= params.eta2 * dist;
    r.parabolic = k * diam2 <= std::max(params.eta2, params.eta3 * params.zeta.re * dist) * dist;

    const Vec3 d = bt.center() - bs.center();
    const double len = d.norm();
    if (len > 0)
        r.direction = k * (d / len - c).norm() * diam <= params.eta1;
    return r;
}

bool is_admissible(const Box& bt, const Box& bs, const Vec3& c, const AdmissibilityParams& params) {
    return check_admissibility(bt, bs, c, params).admissible();
}

bool is_admissible(const Cluster& t, const Cluster& s, const Vec3& c, const AdmissibilityParams& params) {
    return is_admissible(t.box, s.box, c, params);
}

BlockPartition divide(const ClusterTree& tree, const std::vector<DirectionSet>& dirs,
                      const AdmissibilityParams& params) {
    params.validate();
    if (int(dirs.size()) != tree.depth() + 1)
        throw std::invalid_argument("divide: one direction set per level required");

    BlockPartition P;
    const double k = std::abs(params.zeta.im);
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [ti, si] = stack.back();
        stack.pop_back();
        const Cluster& t = tree.cluster(ti);
        const Cluster& s = tree.cluster(si);

        Block b;
        b.t = ti;
        b.s = si;
        b.level = t.level;
        b.dist = box_distance(t.box, s.box);

        if (t.is_leaf() || s.is_leaf()) {
            P.blocks.push_back(b);
            continue;
        }

        bool admissible = false;
        if (b.dist > 0) {
            const double diam2 = std::max(t.box.width().squaredNorm(), s.box.width().squaredNorm());
            const double diam = std::sqrt(diam2);
            if (diam <= params.eta2 * b.dist &&
                k * diam2 <= std::max(params.eta2, params.eta3 * params.zeta.re * b.dist) * b.dist) {
                const int c = assign_direction(t, s, dirs[t.level]);
                const Vec3 e = (t.center - s.center).normalized();
                if (k * (e - dirs[t.level].directions[c]).norm() * diam <= params.eta1) {
                    admissible = true;
                    b.kind = BlockKind::far;
                    b.direction = c;
                } else {
                    ++P.direction_misses;
                }
            }
        }
        if (admissible) {
            P.blocks.push_back(b);
            continue;
        }
        for (auto it = t.sons.rbegin(); it != t.sons.rend(); ++it)
            for (auto jt = s.sons.rbegin(); jt != s.sons.rend(); ++jt)
                stack.emplace_back(*it, *jt);
    }

    const std::size_t nc = tree.cluster_count();
    P.left_near.assign(nc, {});
    P.right_near.assign(nc, {});
    P.left_far.assign(nc, {});
    P.right_far.assign(nc, {});
    for (std::size_t i = 0; i < P.blocks.size(); ++i) {
        const Block& b = P.blocks[i];
        if (b.is_far()) {
            ++P.far_count;
            P.right_far[b.t].push_back(int(i));
            P.left_far[b.s].push_back(int(i));
        } else {
            ++P.near_count;
            P.right_near[b.t].push_back(int(i));
            P.left_near[b.s].push_back(int(i));
        }
    }
    return P;
}

SparsityDiagnostics sparsity_diagnostics(const BlockPartition& P, const ClusterTree& tree,
                                         const AdmissibilityParams& params) {
    SparsityDiagnostics d;
    const std::size_t nc = tree.cluster_count();
    d.left.resize(nc);
    d.right.resize(nc);
    d.r.resize(nc);
    d.R.resize(nc);
    const double k = std::abs(params.zeta.im);
    for (std::size_t t = 0; t < nc; ++t) {
        d.left[t] = P.left_near[t].size() + P.left_far[t].size();
        d.right[t] = P.right_near[t].size() + P.right_far[t].size();
        d.max_left = std::max(d.max_left, d.left[t]);
        d.max_right = std::max(d.max_right, d.right[t]);
        double r = k / params.eta2 * tree.cluster(int(t)).box.diameter();
        if (params.zeta.re > 0)
            r = std::min(r, std::sqrt(k / (params.eta3 * params.zeta.re)));
        d.r[t] = r;
        d.R[t] = 1.5 + std::max(1.0 / params.eta2, r);
    }
    d.near_count = P.near_count;
    d.far_count = P.far_count;
    d.blocks_per_dof = double(P.size()) / double(tree.dof_count());
    return d;
}

bool tiles_exactly(const BlockPartition& P, const ClusterTree& tree) {
    const std::size_t n = tree.dof_count();
    std::vector<unsigned char> hit(n * n, 0);
    for (const auto& b : P.blocks) {
        const Cluster& t = tree.cluster(b.t);
        const Cluster& s = tree.cluster(b.s);
        for (std::size_t i = t.begin; i < t.end; ++i)
            for (std::size_t j = s.begin; j < s.end; ++j) {
                auto& h = hit[tree.permutation()[i] * n + tree.permutation()[j]];
                if (h)
                    return false;
                h = 1;
            }
    }
    return std::all_of(hit.begin(), hit.end(), [](unsigned char h) { return h == 1; });
}

void write_blocks_csv(std::ostream& os, const BlockPartition& P, const ClusterTree& tree,
                      const std::vector<int>& level_orders) {
    os << "level,t_id,s_id,kind,order,dist,diam_t,diam_s\n";
    for (const auto& b : P.blocks) {
        int order = -1;
        if (b.is_far() && b.level < int(level_orders.size()))
            order = level_orders[b.level];
        os << b.level << ',' << b.t << ',' << b.s << ',' << (b.is_far() ? "far" : "near") << ',' << order << ','
           << b.dist << ',' << tree.cluster(b.t).box.diameter() << ',' << tree.cluster(b.s).box.diameter() << '\n';
    }
}

double Image::fraction(unsigned char r, unsigned char g, unsigned char b) const {
    std::size_t cnt = 0;
    for (std::size_t i = 0; i + 2 < rgb.size(); i += 3)
        if (rgb[i] == r && rgb[i + 1] == g && rgb[i + 2] == b)
            ++cnt;
    return double(cnt) / double(width * height);
}

Image render_pattern(const BlockPartition& P, const ClusterTree& tree, int side) {
    const std::size_t n = tree.dof_count();
    if (side <= 0)
        side = int(std::min<std::size_t>(n, 1024));
    Image img;
    img.width = img.height = side;
    img.rgb.assign(std::size_t(side) * side * 3, 0);
    auto px = [&](std::size_t i) { return int((i * std::size_t(side)) / n); };
    auto set = [&](int x, int y, unsigned char r, unsigned char g, unsigned char b) {
        auto* p = &img.rgb[(std::size_t(y) * side + x) * 3];
        p[0] = r;
        p[1] = g;
        p[2] = b;
    };
    for (const auto& b : P.blocks) {
        const Cluster& t = tree.cluster(b.t);
        const Cluster& s = tree.cluster(b.s);
        const int y0 = px(t.begin), y1 = std::max(px(t.end), y0 + 1);
        const int x0 = px(s.begin), x1 = std::max(px(s.end), x0 + 1);
        const unsigned char r = b.is_far() ? 0 : 255, bl = b.is_far() ? 255 : 0;
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) {
                const bool border = (y == y0 || y == y1 - 1 || x == x0 || x == x1 - 1) && (y1 - y0 > 2) &&
                                    (x1 - x0 > 2);
                if (border)
                    set(x, y, 0, 0, 0);
                else
                    set(x, y, r, 0, bl);
            }
    }
    return img;
}

void write_ppm(std::ostream& os, const Image& img) {
    os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()), std::streamsize(img.rgb.size()));
}

void write_ppm(const std::string& path, const Image& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path);
    write_ppm(f, img);
}

}  // namespace dh2
