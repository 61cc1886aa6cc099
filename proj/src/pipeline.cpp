#include "hiersal/pipeline.hpp"

#include <algorithm>

#include "hiersal/errors.hpp"
#include "hiersal/level_saliency.hpp"
#include "hiersal/soh.hpp"

namespace hiersal {

namespace {

std::vector<int> resolve_targets(const RunConfig& cfg, int max_regions) {
    std::vector<int> targets = cfg.region_targets.empty()
                                   ? geometric_targets(cfg.levels, cfg.regions_first, cfg.regions_last)
                                   : cfg.region_targets;
    std::vector<int> clamped;
    for (int t : targets) {
        int v = std::min(t, max_regions);
        if (clamped.empty() || clamped.back() != v) clamped.push_back(v);
    }
    return clamped;
}

void check_ucm(const LabImage& lab, const GrayMap& ucm) {
    bool image_res = ucm.width == lab.width && ucm.height == lab.height;
    bool grid_res = ucm.width == 2 * lab.width + 1 && ucm.height == 2 * lab.height + 1;
    if (!image_res && !grid_res)
        throw DimensionError("ucm must match the image or its (2w+1)x(2h+1) contour grid");
}

SaliencyParams saliency_params(const RunConfig& cfg) {
    SaliencyParams sp;
    sp.contrast = cfg.contrast;
    sp.model = cfg.region_model;
    sp.sigma_s2 = cfg.sigma_s2;
    sp.sigma_b2 = cfg.sigma_b2;
    sp.boundary_prior = cfg.boundary_prior_resolved();
    sp.squared_spatial = cfg.squared_spatial;
    return sp;
}

FusionParams fusion_params(const RunConfig& cfg) {
    FusionParams fp;
    fp.sigma_c2 = cfg.fusion_sigma_c2;
    fp.lambda = cfg.fusion_lambda;
    fp.root_data_term = cfg.root_data_term;
    fp.discrete = cfg.fusion_discrete;
    fp.n_labels = cfg.fusion_labels;
    fp.max_iterations = cfg.fusion_max_iters;
    fp.cg_tolerance = cfg.fusion_tol;
    return fp;
}

LevelStack build_level_stack(const LabImage& lab, const RunConfig& cfg, const GrayMap* ucm) {
    LevelStack stack;
    stack.width = lab.width;
    stack.height = lab.height;
    stack.partitions = build_stack(lab, cfg, ucm);

    SaliencyParams sp = saliency_params(cfg);
    bool need_models_kept = cfg.fusion == FusionStrategy::Lbp;
    for (std::size_t l = 0; l < stack.partitions.size(); ++l) {
        std::vector<RegionModel> models = build_models(stack.partitions[l], lab, cfg.region_model);
        LevelSaliency ls = level_saliency(stack.partitions[l], models, sp);
        ls.level = static_cast<int>(l);
        stack.levels.push_back(std::move(ls));
        if (need_models_kept) stack.models.push_back(std::move(models));
    }
    normalize_stack(stack);
    return stack;
}

} // namespace

std::vector<Partition> build_stack(const LabImage& lab, const RunConfig& cfg, const GrayMap* ucm) {
    if (cfg.hierarchy == HierarchySource::UcmImport) {
        if (!ucm) throw IoError("ucm-import requires a ucm file per image");
        check_ucm(lab, *ucm);
        PartitionStackSource source;
        source.ucm = ucm;
        // UCM targets are not clamped: counts adapt to the available levels
        std::vector<int> targets = cfg.region_targets.empty()
                                       ? geometric_targets(cfg.levels, cfg.regions_first,
                                                           cfg.regions_last)
                                       : cfg.region_targets;
        return extract_partition_stack(source, targets);
    }

    Partition p0 = initial_partition(lab, cfg.initial_partition);
    Hierarchy bpt = build_bpt(p0);
    PartitionStackSource source;
    source.bpt = &bpt;
    return extract_partition_stack(source, resolve_targets(cfg, bpt.n_leaves));
}

PipelineResult run_hp(const LabImage& lab, const RunConfig& cfg, const GrayMap* ucm) {
    LevelStack stack = build_level_stack(lab, cfg, ucm);

    PipelineResult result;
    for (const Partition& p : stack.partitions)
        result.levels.push_back(static_cast<int>(p.regions.size()));

    if (cfg.fusion == FusionStrategy::Bp || cfg.fusion == FusionStrategy::Lbp) {
        InferenceGraph g = build_graph(stack, cfg.fusion == FusionStrategy::Lbp,
                                       cfg.fusion_sigma_c2);
        InferResult inf = infer(g, fusion_params(cfg));
        result.inference_converged = inf.converged;
        GrayMap map(stack.width, stack.height);
        const Partition& finest = stack.partitions.front();
        for (std::size_t p = 0; p < map.pixel_count(); ++p)
            map.data[p] = inf.values[g.level_offset[0] + finest.labels[p]];
        rescale_to_unit(map);
        result.map = std::move(map);
    } else {
        result.map = fuse(stack, cfg.fusion, fusion_params(cfg));
    }
    return result;
}

PipelineResult run_soh(const LabImage& lab, const RunConfig& cfg) {
    Partition p0 = initial_partition(lab, cfg.initial_partition);
    Hierarchy bpt = build_bpt(p0);
    Hierarchy cut = cfg.soh_initial_regions < bpt.n_leaves
                        ? cut_subhierarchy(bpt, cfg.soh_initial_regions)
                        : std::move(bpt);

    SohParams sp;
    sp.model = cfg.region_model;
    sp.sigma_s2 = cfg.sigma_s2;
    sp.sigma_b2 = cfg.sigma_b2;
    sp.sigma_c2 = cfg.soh_sigma_c2;
    sp.squared_spatial = cfg.squared_spatial;

    NodeSaliency ns = node_saliency(cut, lab, sp);
    PipelineResult result;
    result.map = integrate(cut, ns);
    result.levels = {cut.n_leaves};
    return result;
}

PipelineResult run_pipeline(const RgbImage& img, const RunConfig& cfg, const GrayMap* ucm) {
    LabImage lab = rgb_to_lab(img);
    if (cfg.model == SaliencyModel::Soh) {
        if (cfg.hierarchy == HierarchySource::UcmImport)
            throw RangeError("soh runs on bpt hierarchies only");
        return run_soh(lab, cfg);
    }
    return run_hp(lab, cfg, ucm);
}

std::vector<GrayMap> hp_level_maps(const LabImage& lab, const RunConfig& cfg, const GrayMap* ucm) {
    LevelStack stack = build_level_stack(lab, cfg, ucm);
    std::vector<GrayMap> maps;
    for (std::size_t l = 0; l < stack.partitions.size(); ++l) {
        GrayMap map(stack.width, stack.height);
        for (std::size_t p = 0; p < map.pixel_count(); ++p)
            map.data[p] = stack.levels[l].values[stack.partitions[l].labels[p]];
        rescale_to_unit(map);
        maps.push_back(std::move(map));
    }
    return maps;
}

} // namespace hiersal
