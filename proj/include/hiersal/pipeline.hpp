#ifndef HIERSAL_PIPELINE_HPP
#define HIERSAL_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "hiersal/config.hpp"
#include "hiersal/fusion.hpp"
#include "hiersal/hierarchy.hpp"
#include "hiersal/image.hpp"

namespace hiersal {

struct PipelineResult {
    GrayMap map;
    std::vector<int> levels; // resolved region counts (hp only)
    bool inference_converged = true;
};

// Nested partition stack for an image under the configured hierarchy source.
// BPT targets clamp to the leaf count; UCM strength maps may come at image
// or contour-grid resolution.
std::vector<Partition> build_stack(const LabImage& lab, const RunConfig& cfg, const GrayMap* ucm);

PipelineResult run_hp(const LabImage& lab, const RunConfig& cfg, const GrayMap* ucm);
PipelineResult run_soh(const LabImage& lab, const RunConfig& cfg);

// Dispatches on cfg.model; ucm required iff hierarchy == ucm-import.
PipelineResult run_pipeline(const RgbImage& img, const RunConfig& cfg,
                            const GrayMap* ucm = nullptr);

// Per-level maps (each rescaled to [0,1]) for the multi-level comparison.
std::vector<GrayMap> hp_level_maps(const LabImage& lab, const RunConfig& cfg, const GrayMap* ucm);

} // namespace hiersal

#endif
