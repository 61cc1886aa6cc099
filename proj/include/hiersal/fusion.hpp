#ifndef HIERSAL_FUSION_HPP
#define HIERSAL_FUSION_HPP

#include <vector>

#include "hiersal/level_saliency.hpp"
#include "hiersal/partition.hpp"
#include "hiersal/region_model.hpp"

namespace hiersal {

enum class FusionStrategy {
    Mean,
    Max,
    Bp,  // hierarchical inference, inclusion edges only
    Lbp, // adds intra-level adjacency edges
};

struct FusionParams {
    double sigma_c2 = 0.1; // intra-level color falloff, distances normalized per level
    double lambda = 1.0;   // pairwise vs data term trade-off
    bool root_data_term = true;
    // exact quadratic solve is the default; discrete selects min-sum message
    // passing over uniformly spaced labels
    bool discrete = false;
    int n_labels = 64;
    int max_iterations = 200;
    double cg_tolerance = 1e-8;
};

// Nested partitions (finest first) with one saliency layer per level.
// Models are only needed by the lbp strategy.
struct LevelStack {
    int width = 0;
    int height = 0;
    std::vector<Partition> partitions;
    std::vector<LevelSaliency> levels;
    std::vector<std::vector<RegionModel>> models;

    std::size_t n_levels() const { return partitions.size(); }
};

// Joint affine map of every level onto [0,1] using the global min and max;
// an all-equal stack maps to zero.
void normalize_stack(LevelStack& stack);

GrayMap fuse_mean(const LevelStack& stack);
GrayMap fuse_max(const LevelStack& stack);

struct GraphEdge {
    int u, v;
    double weight;
};

// One node per region per level plus a root over the coarsest level.
// Inter-level edges follow region inclusion; intra-level edges adjacency.
struct InferenceGraph {
    int n_nodes = 0;
    int root = -1;
    std::vector<double> s0;
    std::vector<GraphEdge> edges;
    std::vector<int> level_offset; // node id of each level's first region
    std::vector<int> level_size;
    int n_inter_edges = 0; // inclusion + root links; intra edges follow in `edges`
    bool root_data_term = true;
};

InferenceGraph build_graph(const LevelStack& stack, bool with_intra_level, double sigma_c2);

struct InferResult {
    std::vector<double> values;
    bool converged = true;
    double energy = 0.0;
    int iterations = 0;
};

// E = sum_i D(s_i) + lambda * sum_(i,j) w_ij (s_i - s_j)^2 with
// D(s_i) = (s_i - s0_i)^2; convex quadratic.
double graph_energy(const InferenceGraph& g, const std::vector<double>& s, double lambda);

// Exact minimizer via conjugate gradient on the normal equations.
InferResult infer_exact(const InferenceGraph& g, const FusionParams& params);

// Min-sum message passing over n_labels uniform labels in [0,1]; exact on
// trees, loopy (synchronous, best-energy iterate kept) otherwise.
InferResult infer_message_passing(const InferenceGraph& g, const FusionParams& params);

InferResult infer(const InferenceGraph& g, const FusionParams& params);

// Dispatch on strategy. bp/lbp refine and project the finest level.
GrayMap fuse(const LevelStack& stack, FusionStrategy strategy, const FusionParams& params = {});

} // namespace hiersal

#endif
