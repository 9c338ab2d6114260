#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dh2/cluster_tree.hpp"
#include "dh2/directions.hpp"
#include "dh2/frequency.hpp"

namespace dh2 {

struct AdmissibilityParams {
    double eta1 = 10.0;
    double eta2 = 2.0;
    double eta3 = 0.5;
    ComplexFrequency zeta{0.0, 1.0};

    void validate() const;
};

// Outcome of the three directional admissibility conditions.
struct AdmissibilityCheck {
    bool direction = false;  // (a) alignment of c with M_t - M_s
    bool distance = false;   // (b) max diam <= eta2 dist
    bool parabolic = false;  // (c) |Im zeta| max diam^2 <= max{eta2, eta3 Re zeta dist} dist

    bool admissible() const { return direction && distance && parabolic; }
};

AdmissibilityCheck check_admissibility(const Box& bt, const Box& bs, const Vec3& c, const AdmissibilityParams& params);

bool is_admissible(const Box& bt, const Box& bs, const Vec3& c, const AdmissibilityParams& params);
bool is_admissible(const Cluster& t, const Cluster& s, const Vec3& c, const AdmissibilityParams& params);

enum class BlockKind { near, far };

struct Block {
    int t = 0, s = 0;
    int level = 0;
    BlockKind kind = BlockKind::near;
    int direction = -1;  // index into the level's direction set (far only)
    double dist = 0.0;   // dist(B_t, B_s)

    bool is_far() const { return kind == BlockKind::far; }
};

struct BlockPartition {
    std::vector<Block> blocks;
    std::size_t near_count = 0, far_count = 0;

    // block indices per cluster: P_left(t) = {(s,t)}, P_right(t) = {(t,s)}
    std::vector<std::vector<int>> left_near, right_near, left_far, right_far;

    // far candidates whose assigned direction violated (a); they were refined instead
    std::size_t direction_misses = 0;

    std::size_t size() const { return blocks.size(); }
};

// Minimal admissible block partition of I x I, recursing from (root, root).
BlockPartition divide(const ClusterTree& tree, const std::vector<DirectionSet>& dirs,
                      const AdmissibilityParams& params);

struct SparsityDiagnostics {
    std::vector<std::size_t> left, right;  // #P_left(t), #P_right(t)
    std::vector<double> r, R;              // radii r_t, R_t
    std::size_t max_left = 0, max_right = 0;
    std::size_t near_count = 0, far_count = 0;
    double blocks_per_dof = 0.0;
};

SparsityDiagnostics sparsity_diagnostics(const BlockPartition& P, const ClusterTree& tree,
                                         const AdmissibilityParams& params);

// True iff the blocks tile I x I exactly once (bitmap check).
bool tiles_exactly(const BlockPartition& P, const ClusterTree& tree);

// CSV: level,t_id,s_id,kind,order,dist,diam_t,diam_s
void write_blocks_csv(std::ostream& os, const BlockPartition& P, const ClusterTree& tree,
                      const std::vector<int>& level_orders = {});

//
// Block pattern image: DOFs in leaf order, near blocks red, far blocks blue,
// one-pixel black borders.
//
struct Image {
    int width = 0, height = 0;
    std::vector<unsigned char> rgb;

    double fraction(unsigned char r, unsigned char g, unsigned char b) const;
};

Image render_pattern(const BlockPartition& P, const ClusterTree& tree, int side = 0);
void write_ppm(std::ostream& os, const Image& img);
void write_ppm(const std::string& path, const Image& img);

}  // namespace dh2
