#include "dh2/directions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dh2 {

std::vector<Vec3> cube_face_directions(int p) {
    if (p < 0)
        throw std::invalid_argument("cube_face_directions: negative resolution");
    if (p == 0)
        return {Vec3(1, 0, 0)};
    std::vector<Vec3> dirs;
    dirs.reserve(6 * p * p);
    for (int axis = 0; axis < 3; ++axis)
        for (double sign : {1.0, -1.0})
            for (int j = 0; j < p; ++j)
                for (int i = 0; i < p; ++i) {
                    Vec3 v;
                    v[axis] = sign;
                    v[(axis + 1) % 3] = -1.0 + (2.0 * i + 1.0) / p;
                    v[(axis + 2) % 3] = -1.0 + (2.0 * j + 1.0) / p;
                    dirs.push_back(v.normalized());
                }
    return dirs;
}

double covering_radius(const std::vector<Vec3>& dirs, int p, int samples) {
    std::vector<Vec3> pts;
    pts.reserve(samples + 6 * (p + 1) * (p + 1));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < samples; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / samples;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
    }
    for (int axis = 0; axis < 3 && p > 0; ++axis)
        for (double sign : {1.0, -1.0})
            for (int j = 0; j <= p; ++j)
                for (int i = 0; i <= p; ++i) {
                    Vec3 v;
                    v[axis] = sign;
                    v[(axis + 1) % 3] = -1.0 + 2.0 * i / p;
                    v[(axis + 2) % 3] = -1.0 + 2.0 * j / p;
                    pts.push_back(v.normalized());
                }
    double worst = 0.0;
    for (const auto& e : pts) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : dirs)
            best = std::min(best, (e - c).squaredNorm());
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

namespace {

double cached_covering(int p) {
    static std::map<int, double> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    auto it = cache.find(p);
    if (it != cache.end())
        return it->second;
    const double r = p == 0 ? 2.0 : covering_radius(cube_face_directions(p), p);
    cache.emplace(p, r);
    return r;
}

}  // namespace

std::vector<DirectionSet> build_direction_sets(const ClusterTree& tree, const ComplexFrequency& zeta, double eta1) {
    if (!(eta1 > 0))
        throw std::invalid_argument("build_direction_sets: eta1 must be positive");
    const double k = std::abs(zeta.im);
    std::vector<DirectionSet> sets(tree.depth() + 1);
    for (int l = 0; l <= tree.depth(); ++l) {
        DirectionSet& d = sets[l];
        d.level = l;
        const double delta = tree.delta(l);
        // a single direction covers the sphere with radius 2
        if (k * delta * 2.0 <= eta1) {
            d.p = 0;
        } else {
            const double target = eta1 / (k * delta);
            int p = 1;
            while (cached_covering(p) > target)
                ++p;
            d.p = p;
        }
        d.directions = cube_face_directions(d.p);
        d.covering_radius = cached_covering(d.p);
    }
    return sets;
}

int nearest_direction(const DirectionSet& dirs, const Vec3& e) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dirs.directions.size(); ++i) {
        const double d = (e - dirs.directions[i]).squaredNorm();
        if (d < bd) {
            bd = d;
            best = int(i);
        }
    }
    return best;
}

int assign_direction(const Cluster& t, const Cluster& s, const DirectionSet& dirs) {
    const Vec3 d = t.center - s.center;
    const double len = d.norm();
    if (!(len > 0))
        throw std::domain_error("assign_direction: coincident cluster centers");
    return nearest_direction(dirs, d / len);
}

}  // namespace dh2
