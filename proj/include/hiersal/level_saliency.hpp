#ifndef HIERSAL_LEVEL_SALIENCY_HPP
#define HIERSAL_LEVEL_SALIENCY_HPP

#include <vector>

#include "hiersal/partition.hpp"
#include "hiersal/region_model.hpp"

namespace hiersal {

enum class ContrastKind {
    Local,
    Global,
};

struct SaliencyParams {
    ContrastKind contrast = ContrastKind::Global;
    ModelKind model = ModelKind::Histogram;
    double sigma_s2 = 4.0; // spatial falloff, centroid distances over the image diagonal
    double sigma_b2 = 0.5; // boundary falloff
    bool boundary_prior = true;
    // Spatial weight follows the printed form exp(-dist/sigma_s2); the
    // squared-distance variant is selectable for ablations.
    bool squared_spatial = false;
};

// Per-region saliency values, parallel to partition.regions.
struct LevelSaliency {
    int level = 0;
    std::vector<double> values;
};

// exp(-(border/perimeter)/sigma_b2), in (0,1]
double boundary_weight(const Region& r, double sigma_b2);

double spatial_weight(double centroid_dist, double diagonal, const SaliencyParams& params);

// S(Ri) = sum over neighbors of (shared contour / perimeter) * d(Mi,Mj)
LevelSaliency local_contrast(const Partition& p, const std::vector<RegionModel>& models,
                             const SaliencyParams& params);

// S(Ri) = [wb(Ri)] * sum over all j != i of |Rj| * ws(i,j) * d(Mi,Mj)
LevelSaliency global_contrast(const Partition& p, const std::vector<RegionModel>& models,
                              const SaliencyParams& params);

LevelSaliency level_saliency(const Partition& p, const std::vector<RegionModel>& models,
                             const SaliencyParams& params);

} // namespace hiersal

#endif
