#include "hiersal/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hiersal/errors.hpp"

namespace hiersal {

using nlohmann::json;

namespace {

template <typename T>
struct EnumName {
    T value;
    const char* name;
};

constexpr EnumName<SaliencyModel> kModels[] = {{SaliencyModel::Hp, "hp"},
                                               {SaliencyModel::Soh, "soh"}};
constexpr EnumName<HierarchySource> kSources[] = {{HierarchySource::Bpt, "bpt"},
                                                  {HierarchySource::UcmImport, "ucm-import"}};
constexpr EnumName<InitialPartitionMode> kInitModes[] = {
    {InitialPartitionMode::PerPixel, "per-pixel"}, {InitialPartitionMode::FlatZones, "flat-zones"}};
constexpr EnumName<ContrastKind> kContrasts[] = {{ContrastKind::Local, "local"},
                                                 {ContrastKind::Global, "global"}};
constexpr EnumName<ModelKind> kModelKinds[] = {{ModelKind::MeanColor, "mean"},
                                               {ModelKind::Histogram, "hist"}};
constexpr EnumName<BoundaryPriorMode> kBoundaryModes[] = {{BoundaryPriorMode::Auto, "auto"},
                                                          {BoundaryPriorMode::On, "on"},
                                                          {BoundaryPriorMode::Off, "off"}};
constexpr EnumName<FusionStrategy> kFusions[] = {{FusionStrategy::Mean, "mean"},
                                                 {FusionStrategy::Max, "max"},
                                                 {FusionStrategy::Bp, "bp"},
                                                 {FusionStrategy::Lbp, "lbp"}};

template <typename T, std::size_t N>
const char* to_name(const EnumName<T> (&table)[N], T value) {
    for (const auto& e : table)
        if (e.value == value) return e.name;
    throw RangeError("unknown enum value");
}

template <typename T, std::size_t N>
T from_name(const EnumName<T> (&table)[N], const std::string& name, const char* field) {
    for (const auto& e : table)
        if (name == e.name) return e.value;
    throw RangeError(std::string("invalid value '") + name + "' for " + field);
}

template <typename T>
void get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T, std::size_t N>
void get_enum(const json& j, const char* key, const EnumName<T> (&table)[N], T& out) {
    if (j.contains(key)) out = from_name(table, j.at(key).get<std::string>(), key);
}

} // namespace

void RunConfig::validate() const {
    if (levels < 2) throw RangeError("levels must be >= 2");
    if (regions_last < 1 || regions_first < regions_last)
        throw RangeError("need regions_first >= regions_last >= 1");
    for (std::size_t i = 0; i + 1 < region_targets.size(); ++i)
        if (region_targets[i] <= region_targets[i + 1])
            throw RangeError("region_targets must strictly decrease");
    if (sigma_s2 <= 0.0 || sigma_b2 <= 0.0 || fusion_sigma_c2 <= 0.0 || soh_sigma_c2 <= 0.0)
        throw RangeError("sigma parameters must be positive");
    if (soh_initial_regions < 1) throw RangeError("soh_initial_regions must be >= 1");
    if (fusion_labels < 2) throw RangeError("fusion_labels must be >= 2");
    if (jobs < 1) throw RangeError("jobs must be >= 1");
    if (model == SaliencyModel::Soh && hierarchy == HierarchySource::UcmImport)
        throw RangeError("soh runs on bpt hierarchies only");
}

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("config parse failure: ") + e.what());
    }
    RunConfig cfg;
    try {
        get_enum(j, "model", kModels, cfg.model);
        get_enum(j, "hierarchy", kSources, cfg.hierarchy);
        get_enum(j, "initial_partition", kInitModes, cfg.initial_partition);
        get(j, "levels", cfg.levels);
        get(j, "regions_first", cfg.regions_first);
        get(j, "regions_last", cfg.regions_last);
        get(j, "region_targets", cfg.region_targets);
        get_enum(j, "contrast", kContrasts, cfg.contrast);
        get_enum(j, "region_model", kModelKinds, cfg.region_model);
        get_enum(j, "boundary_prior", kBoundaryModes, cfg.boundary_prior);
        get_enum(j, "fusion", kFusions, cfg.fusion);
        get(j, "sigma_s2", cfg.sigma_s2);
        get(j, "sigma_b2", cfg.sigma_b2);
        get(j, "squared_spatial", cfg.squared_spatial);
        get(j, "fusion_sigma_c2", cfg.fusion_sigma_c2);
        get(j, "fusion_lambda", cfg.fusion_lambda);
        get(j, "fusion_discrete", cfg.fusion_discrete);
        get(j, "fusion_labels", cfg.fusion_labels);
        get(j, "fusion_max_iters", cfg.fusion_max_iters);
        get(j, "fusion_tol", cfg.fusion_tol);
        get(j, "root_data_term", cfg.root_data_term);
        get(j, "soh_initial_regions", cfg.soh_initial_regions);
        get(j, "soh_sigma_c2", cfg.soh_sigma_c2);
        get(j, "out_dir", cfg.out_dir);
        get(j, "jobs", cfg.jobs);
        get(j, "seed", cfg.seed);
    } catch (const json::exception& e) {
        throw FormatError(std::string("config field error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_to_json_text(const RunConfig& cfg) {
    json j;
    j["model"] = to_name(kModels, cfg.model);
    j["hierarchy"] = to_name(kSources, cfg.hierarchy);
    j["initial_partition"] = to_name(kInitModes, cfg.initial_partition);
    j["levels"] = cfg.levels;
    j["regions_first"] = cfg.regions_first;
    j["regions_last"] = cfg.regions_last;
    j["region_targets"] = cfg.region_targets;
    j["contrast"] = to_name(kContrasts, cfg.contrast);
    j["region_model"] = to_name(kModelKinds, cfg.region_model);
    j["boundary_prior"] = to_name(kBoundaryModes, cfg.boundary_prior);
    j["boundary_prior_resolved"] = cfg.boundary_prior_resolved();
    j["fusion"] = to_name(kFusions, cfg.fusion);
    j["sigma_s2"] = cfg.sigma_s2;
    j["sigma_b2"] = cfg.sigma_b2;
    j["squared_spatial"] = cfg.squared_spatial;
    j["fusion_sigma_c2"] = cfg.fusion_sigma_c2;
    j["fusion_lambda"] = cfg.fusion_lambda;
    j["fusion_discrete"] = cfg.fusion_discrete;
    j["fusion_labels"] = cfg.fusion_labels;
    j["fusion_max_iters"] = cfg.fusion_max_iters;
    j["fusion_tol"] = cfg.fusion_tol;
    j["root_data_term"] = cfg.root_data_term;
    j["soh_initial_regions"] = cfg.soh_initial_regions;
    j["soh_sigma_c2"] = cfg.soh_sigma_c2;
    j["out_dir"] = cfg.out_dir;
    j["jobs"] = cfg.jobs;
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

} // namespace hiersal
