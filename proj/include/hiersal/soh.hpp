#ifndef HIERSAL_SOH_HPP
#define HIERSAL_SOH_HPP

#include <vector>

#include "hiersal/hierarchy.hpp"
#include "hiersal/region_model.hpp"

namespace hiersal {

struct SohParams {
    ModelKind model = ModelKind::Histogram;
    double sigma_s2 = 4.0;
    double sigma_b2 = 0.5;
    double sigma_c2 = 0.4; // center-prior falloff
    bool squared_spatial = false;
};

// One value per hierarchy node (2N-1 for N leaves).
struct NodeSaliency {
    std::vector<double> values;
    std::vector<double> boundary_w;
    std::vector<double> center_w;
    long long evaluations = 0; // number of node scorings performed
};

// exp(-dbar^2/sigma_c2) with dbar the mean pixel distance to the image
// center over half the image diagonal.
double center_weight(const HierarchyNode& node, int width, int height, double sigma_c2);

// Scores every node against the live partition at its creation point:
// S(Ri) = wb(Ri) wc(Ri) sum_j ws(Ri,Rj) |Rj| wb(Rj) d(Mi,Mj).
// Leaves are scored against the full initial partition; descriptors of merged
// regions are updated incrementally.
NodeSaliency node_saliency(const Hierarchy& h, const LabImage& img, const SohParams& params);

// S(x) = mean of S(Ri) over the nodes containing x, then rescaled to [0,1].
// Single root-to-leaf accumulation pass.
GrayMap integrate(const Hierarchy& h, const NodeSaliency& ns);

// Same averages without the final rescale.
GrayMap integrate_raw(const Hierarchy& h, const NodeSaliency& ns);

} // namespace hiersal

#endif
