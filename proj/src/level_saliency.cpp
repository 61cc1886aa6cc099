#include "hiersal/level_saliency.hpp"

#include <cmath>

#include "hiersal/errors.hpp"

namespace hiersal {

double boundary_weight(const Region& r, double sigma_b2) {
    return std::exp(-(static_cast<double>(r.border_len) / r.perimeter) / sigma_b2);
}

double spatial_weight(double centroid_dist, double diagonal, const SaliencyParams& params) {
    double d = centroid_dist / diagonal;
    if (params.squared_spatial) d *= d;
    return std::exp(-d / params.sigma_s2);
}

LevelSaliency local_contrast(const Partition& p, const std::vector<RegionModel>& models,
                             const SaliencyParams& params) {
    if (models.size() != p.regions.size()) throw DimensionError("one model per region required");
    LevelSaliency out;
    out.values.resize(p.regions.size());
    for (std::size_t i = 0; i < p.regions.size(); ++i) {
        const Region& r = p.regions[i];
        double s = 0.0;
        for (const auto& [j, contact] : r.neighbor_contact) {
            double w = static_cast<double>(contact) / r.perimeter;
            s += w * region_distance(models[i], models[j]);
        }
        // border-touching regions are already damped through the contour
        // fractions; the explicit prior stays available for ablations
        if (params.boundary_prior) s *= boundary_weight(r, params.sigma_b2);
        out.values[i] = s;
    }
    return out;
}

LevelSaliency global_contrast(const Partition& p, const std::vector<RegionModel>& models,
                              const SaliencyParams& params) {
    if (models.size() != p.regions.size()) throw DimensionError("one model per region required");
    const std::size_t n = p.regions.size();
    const double diagonal =
        std::sqrt(static_cast<double>(p.width) * p.width + static_cast<double>(p.height) * p.height);

    // symmetric model-distance matrix, filled once
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i * n + j] = dist[j * n + i] = region_distance(models[i], models[j]);

    LevelSaliency out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Region& ri = p.regions[i];
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const Region& rj = p.regions[j];
            double dx = ri.centroid_x() - rj.centroid_x();
            double dy = ri.centroid_y() - rj.centroid_y();
            double ws = spatial_weight(std::sqrt(dx * dx + dy * dy), diagonal, params);
            s += static_cast<double>(rj.area) * ws * dist[i * n + j];
        }
        if (params.boundary_prior) s *= boundary_weight(ri, params.sigma_b2);
        out.values[i] = s;
    }
    return out;
}

LevelSaliency level_saliency(const Partition& p, const std::vector<RegionModel>& models,
                             const SaliencyParams& params) {
    return params.contrast == ContrastKind::Local ? local_contrast(p, models, params)
                                                  : global_contrast(p, models, params);
}

} // namespace hiersal
