#ifndef HIERSAL_CONFIG_HPP
#define HIERSAL_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "hiersal/fusion.hpp"
#include "hiersal/level_saliency.hpp"
#include "hiersal/partition.hpp"
#include "hiersal/region_model.hpp"

namespace hiersal {

enum class SaliencyModel {
    Hp,  // hierarchy of partitions
    Soh, // saliency over the hierarchy
};

enum class HierarchySource {
    Bpt,
    UcmImport,
};

enum class BoundaryPriorMode {
    Auto, // off for local contrast, on for global
    On,
    Off,
};

struct RunConfig {
    SaliencyModel model = SaliencyModel::Soh;
    HierarchySource hierarchy = HierarchySource::Bpt;
    InitialPartitionMode initial_partition = InitialPartitionMode::FlatZones;

    int levels = 6;
    int regions_first = 100;
    int regions_last = 3;
    std::vector<int> region_targets; // explicit override of the schedule

    ContrastKind contrast = ContrastKind::Global;
    ModelKind region_model = ModelKind::Histogram;
    BoundaryPriorMode boundary_prior = BoundaryPriorMode::Auto;
    FusionStrategy fusion = FusionStrategy::Mean;

    double sigma_s2 = 4.0;
    double sigma_b2 = 0.5;
    bool squared_spatial = false;

    double fusion_sigma_c2 = 0.1;
    double fusion_lambda = 1.0;
    bool fusion_discrete = false;
    int fusion_labels = 64;
    int fusion_max_iters = 200;
    double fusion_tol = 1e-8;
    bool root_data_term = true;

    int soh_initial_regions = 300;
    double soh_sigma_c2 = 0.4;

    std::string out_dir = "out";
    int jobs = 1;
    unsigned seed = 0;

    bool boundary_prior_resolved() const {
        if (boundary_prior == BoundaryPriorMode::Auto) return contrast == ContrastKind::Global;
        return boundary_prior == BoundaryPriorMode::On;
    }
    void validate() const;
};

RunConfig config_from_json_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json_text(const RunConfig& cfg); // fully resolved, round-trippable

} // namespace hiersal

#endif
