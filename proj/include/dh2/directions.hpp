#pragma once

#include <vector>

#include "dh2/cluster_tree.hpp"
#include "dh2/frequency.hpp"

namespace dh2 {

struct DirectionSet {
    int level = 0;
    int p = 0;  // cube-face grid resolution, 0 = single direction
    std::vector<Vec3> directions;
    double covering_radius = 2.0;  // sampled sup_e min_c |e - c|

    std::size_t size() const { return directions.size(); }
};

// p x p cell centers on each face of [-1,1]^3 projected to the sphere;
// faces ordered +x, -x, +y, -y, +z, -z. p = 0 gives {(1,0,0)}.
std::vector<Vec3> cube_face_directions(int p);

// Sampled covering radius of a direction set: Fibonacci points plus the
// projected cube-cell corners of resolution p (if p > 0).
double covering_radius(const std::vector<Vec3>& dirs, int p, int samples = 20000);

// Per-level direction sets satisfying |Im zeta| * covering radius <= eta1 / delta_l.
std::vector<DirectionSet> build_direction_sets(const ClusterTree& tree, const ComplexFrequency& zeta, double eta1);

// Index of the direction closest to the unit vector e (ties: lowest index).
int nearest_direction(const DirectionSet& dirs, const Vec3& e);

// c(b) for the ideal direction (M_t - M_s) / |M_t - M_s|.
int assign_direction(const Cluster& t, const Cluster& s, const DirectionSet& dirs);

// sd(c): closest direction of the next level.
inline int son_direction(const Vec3& c, const DirectionSet& next) { return nearest_direction(next, c); }

}  // namespace dh2
