#ifndef HIERSAL_HIERARCHY_HPP
#define HIERSAL_HIERARCHY_HPP

#include <vector>

#include "hiersal/partition.hpp"

namespace hiersal {

struct HierarchyNode {
    int id = -1;
    int left = -1;   // children, -1 for leaves
    int right = -1;
    int parent = -1; // -1 for the root
    long long area = 0;
    long long sum_x = 0;
    long long sum_y = 0;
    Lab sum_lab;
    long long perimeter = 0;
    long long border_len = 0;
    double center_dist_sum = 0.0; // sum over pixels of distance to image center

    double centroid_x() const { return static_cast<double>(sum_x) / area; }
    double centroid_y() const { return static_cast<double>(sum_y) / area; }
    Lab mean_lab() const {
        double inv = 1.0 / area;
        return {sum_lab.L * inv, sum_lab.a * inv, sum_lab.b * inv};
    }
};

struct Merge {
    int left = -1;
    int right = -1;
    int node = -1; // id of the created region
};

// Binary merge tree over an initial partition. Leaves are nodes 0..N-1 in
// initial-partition order; merge t creates node N+t. 2N-1 nodes total.
struct Hierarchy {
    int width = 0;
    int height = 0;
    int n_leaves = 0;
    std::vector<int> leaf_labels; // per pixel -> leaf id
    std::vector<HierarchyNode> nodes;
    std::vector<Merge> merges;

    int root() const { return static_cast<int>(nodes.size()) - 1; }
    int n_nodes() const { return static_cast<int>(nodes.size()); }
};

// Iterative pairwise merging of the most similar neighboring regions.
// Similarity of (Ri,Rj) = min(|Ri|,|Rj|) * ||mean_lab(Ri) - mean_lab(Rj)||,
// ties broken toward the lowest (id_i,id_j) pair.
Hierarchy build_bpt(const Partition& p0);

// Similarity used by the merge queue; exposed so tests can reuse the exact
// floating-point expression.
double merge_similarity(long long area_i, const Lab& mean_i, long long area_j, const Lab& mean_j);

// Partition after exactly (n_leaves - n_regions) merges. Geometry descriptors
// are recomputed from the label map; Lab sums come from the node aggregates.
Partition partition_at(const Hierarchy& h, int n_regions);

// New hierarchy whose leaves are the regions of partition_at(h, n_regions),
// keeping the remaining merge sequence.
Hierarchy cut_subhierarchy(const Hierarchy& h, int n_regions);

// Connected components of sub-threshold strength. Accepts a map at image
// resolution (boundary pixels joined to the lowest-id adjacent region) or at
// (2w+1)x(2h+1) contour-grid resolution (labels sampled at pixel cells).
// The two-argument form treats odd-sized maps as contour grids.
Partition ucm_partition(const GrayMap& ucm, double threshold);
Partition ucm_partition(const GrayMap& ucm, double threshold, bool contour_grid);

struct PartitionStackSource {
    const Hierarchy* bpt = nullptr;
    const GrayMap* ucm = nullptr;
};

// Geometric schedule of region-count targets from n_first down to n_last,
// duplicates collapsed.
std::vector<int> geometric_targets(int k_levels, int n_first, int n_last);

// Nested partitions, finest first. BPT targets are hit exactly; UCM targets
// pick the threshold whose region count is the closest one >= target.
std::vector<Partition> extract_partition_stack(const PartitionStackSource& source, int k_levels,
                                               int n_first, int n_last);
std::vector<Partition> extract_partition_stack(const PartitionStackSource& source,
                                               const std::vector<int>& targets);

} // namespace hiersal

#endif
