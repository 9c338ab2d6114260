#pragma once

#include <iosfwd>
#include <vector>

#include "dh2/geometry.hpp"

namespace dh2 {

enum class TreeMode {
    regular,  // same-level boxes are translates of each other
    tight     // minimal box around the supports of the cluster
};

struct Cluster {
    int id = 0;
    int level = 0;
    int father = -1;
    std::vector<int> sons;

    // label = perm[begin, end) of the owning tree
    std::size_t begin = 0, end = 0;

    Box box;               // B_t, contains all owned panels
    Vec3 center;           // M_t
    Box cell;              // bisection cell before padding
    Eigen::Vector3i grid;  // integer position of the cell on its level (regular mode)

    std::size_t size() const { return end - begin; }
    bool is_leaf() const { return sons.empty(); }
};

class ClusterTree {
public:
    const Cluster& root() const { return clusters_.front(); }
    const Cluster& cluster(int id) const { return clusters_[id]; }
    const std::vector<Cluster>& clusters() const { return clusters_; }
    std::size_t cluster_count() const { return clusters_.size(); }

    // leaf-traversal order of the degrees of freedom
    const std::vector<std::size_t>& permutation() const { return perm_; }

    // sorted index set of a cluster
    std::vector<std::size_t> label(int id) const;

    int depth() const { return int(levels_.size()) - 1; }
    const std::vector<int>& level(int l) const { return levels_[l]; }

    // maximal box diameter per level
    double delta(int l) const { return delta_[l]; }

    std::size_t dof_count() const { return perm_.size(); }
    TreeMode mode() const { return mode_; }
    std::size_t leaf_size() const { return leaf_size_; }

    // per-axis padding added to the bisection cells of a level (regular mode)
    const Vec3& padding(int l) const { return padding_[l]; }

    void dump(std::ostream& os) const;

private:
    friend ClusterTree build_cluster_tree(const SurfaceMesh&, std::size_t, TreeMode);

    std::vector<Cluster> clusters_;
    std::vector<std::size_t> perm_;
    std::vector<std::vector<int>> levels_;
    std::vector<double> delta_;
    std::vector<Vec3> padding_;
    TreeMode mode_ = TreeMode::regular;
    std::size_t leaf_size_ = 16;
};

// Binary geometric bisection of the panels (one DOF per panel) until
// clusters hold at most `leaf_size` panels.
ClusterTree build_cluster_tree(const SurfaceMesh& mesh, std::size_t leaf_size = 16,
                               TreeMode mode = TreeMode::regular);

// Euclidean diagonal of the bounding box.
inline double cluster_diameter(const Cluster& t) { return t.box.diameter(); }

struct TreeDiagnostics {
    std::vector<double> congruence_defect;  // per level, max deviation of box widths
    double son_diameter_ratio = 0.0;        // C_sb
    int max_sons = 0;
    int single_son_clusters = 0;
    int overlap = 0;  // C_ov, sampled at box centers and corners
    std::size_t min_leaf_size = 0, max_leaf_size = 0;
    std::vector<double> delta;       // delta_l
    double decay_ratio = 0.0;        // mean delta_l / delta_{l+3}
    double c_vol = 0.0, C_vol = 0.0;  // bounds of diam^2(B_t) / |omega_t|
    bool containment = true;         // every owned panel inside B_t
};

TreeDiagnostics check_tree_assumptions(const ClusterTree& tree, const SurfaceMesh& mesh);

}  // namespace dh2
