#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "hiersal/config.hpp"
#include "hiersal/errors.hpp"
#include "hiersal/eval.hpp"
#include "hiersal/image_io.hpp"
#include "hiersal/log.hpp"
#include "hiersal/pipeline.hpp"
#include "hiersal/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hiersal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

struct CliOverrides {
    std::string config_path;
    std::string model, fusion, contrast, region_model, boundary_prior;
    int levels = -1;
    std::string regions; // FIRST,LAST
    std::string out_dir;
    int jobs = -1;
    long long seed = -1;
};

void add_config_flags(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--model", o.model, "hp|soh")->check(CLI::IsMember({"hp", "soh"}));
    cmd->add_option("--fusion", o.fusion, "mean|max|bp|lbp")
        ->check(CLI::IsMember({"mean", "max", "bp", "lbp"}));
    cmd->add_option("--levels", o.levels, "number of hierarchy levels");
    cmd->add_option("--regions", o.regions, "FIRST,LAST region schedule");
    cmd->add_option("--contrast", o.contrast, "local|global")
        ->check(CLI::IsMember({"local", "global"}));
    cmd->add_option("--region-model", o.region_model, "mean|hist")
        ->check(CLI::IsMember({"mean", "hist"}));
    cmd->add_option("--boundary-prior", o.boundary_prior, "on|off|auto")
        ->check(CLI::IsMember({"on", "off", "auto"}));
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--jobs", o.jobs, "worker count");
    cmd->add_option("--seed", o.seed, "generator seed");
}

RunConfig resolve_config(const CliOverrides& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);

    json patch = json::object();
    if (!o.model.empty()) patch["model"] = o.model;
    if (!o.fusion.empty()) patch["fusion"] = o.fusion;
    if (!o.contrast.empty()) patch["contrast"] = o.contrast;
    if (!o.region_model.empty()) patch["region_model"] = o.region_model;
    if (!o.boundary_prior.empty()) patch["boundary_prior"] = o.boundary_prior;
    if (o.levels >= 0) patch["levels"] = o.levels;
    if (!o.regions.empty()) {
        auto comma = o.regions.find(',');
        if (comma == std::string::npos)
            throw RangeError("--regions expects FIRST,LAST");
        patch["regions_first"] = std::stoi(o.regions.substr(0, comma));
        patch["regions_last"] = std::stoi(o.regions.substr(comma + 1));
    }
    if (!o.out_dir.empty()) patch["out_dir"] = o.out_dir;
    if (o.jobs >= 1) patch["jobs"] = o.jobs;
    if (o.seed >= 0) patch["seed"] = static_cast<unsigned>(o.seed);

    if (!patch.empty()) {
        json full = json::parse(config_to_json_text(cfg));
        full.merge_patch(patch);
        cfg = config_from_json_text(full.dump());
    }
    cfg.validate();
    return cfg;
}

// ---- run ----

struct ImageTask {
    std::string input;
    std::string stem;
    std::string output;
    double seconds = 0.0;
    bool ok = false;
    std::string error;
};

int cmd_run(const CliOverrides& overrides, const std::vector<std::string>& inputs,
            const std::string& ucm_dir) {
    RunConfig cfg = resolve_config(overrides);
    if (inputs.empty()) {
        HIERSAL_LOG_ERROR("run: no input images");
        return kExitUsage;
    }
    fs::create_directories(cfg.out_dir);

    std::vector<ImageTask> tasks;
    for (const std::string& input : inputs) {
        ImageTask t;
        t.input = input;
        t.stem = fs::path(input).stem().string();
        t.output = (fs::path(cfg.out_dir) / (t.stem + ".png")).string();
        tasks.push_back(std::move(t));
    }

    auto find_ucm = [&](const std::string& stem) -> std::string {
        for (const char* ext : {".png", ".pgm"}) {
            fs::path p = fs::path(ucm_dir) / (stem + ext);
            if (fs::exists(p)) return p.string();
        }
        return {};
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            ImageTask& t = tasks[i];
            auto start = std::chrono::steady_clock::now();
            try {
                RgbImage img = load_image(t.input);
                GrayMap ucm;
                const GrayMap* ucm_ptr = nullptr;
                if (cfg.hierarchy == HierarchySource::UcmImport) {
                    std::string ucm_path = ucm_dir.empty() ? "" : find_ucm(t.stem);
                    if (ucm_path.empty()) throw IoError("no ucm file for " + t.stem);
                    ucm = load_gray(ucm_path);
                    ucm_ptr = &ucm;
                }
                PipelineResult res = run_pipeline(img, cfg, ucm_ptr);
                save_gray_png(res.map, t.output);
                t.ok = true;
                if (!res.inference_converged)
                    HIERSAL_LOG_WARN("%s: inference stopped before convergence", t.stem.c_str());
            } catch (const std::exception& e) {
                t.error = e.what();
                HIERSAL_LOG_ERROR("%s: %s", t.input.c_str(), e.what());
            }
            t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count();
        }
    };
    std::vector<std::thread> pool;
    int n_workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    json manifest;
    manifest["config"] = json::parse(config_to_json_text(cfg));
    if (cfg.model == SaliencyModel::Hp) {
        // resolved level schedule, recorded once (image-independent for bpt
        // sources whenever the initial partition is fine enough)
        manifest["config"]["resolved_levels"] =
            cfg.region_targets.empty()
                ? geometric_targets(cfg.levels, cfg.regions_first, cfg.regions_last)
                : cfg.region_targets;
    }
    json images = json::array();
    int failures = 0;
    for (const ImageTask& t : tasks) {
        json e;
        e["input"] = t.input;
        e["output"] = t.ok ? t.output : "";
        e["seconds"] = t.seconds;
        e["ok"] = t.ok;
        if (!t.ok) {
            e["error"] = t.error;
            ++failures;
        }
        images.push_back(std::move(e));
    }
    manifest["images"] = std::move(images);
    std::ofstream mf(fs::path(cfg.out_dir) / "run_manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";

    if (failures > 0) {
        HIERSAL_LOG_WARN("%d of %zu images failed", failures, tasks.size());
        return kExitPartial;
    }
    return kExitOk;
}

// ---- eval ----

int cmd_eval(const std::string& map_dir, const std::string& gt_dir, const std::string& out_dir) {
    fs::create_directories(out_dir);
    DatasetReport report = dataset_report(map_dir, gt_dir);
    write_scores_csv(report, (fs::path(out_dir) / "scores.csv").string());
    write_curve_csv(report, (fs::path(out_dir) / "pr_curve.csv").string());
    std::printf("F1 = %.6f, MAE = %.6f, precision = %.6f, recall = %.6f, images = %zu\n",
                report.mean.f1, report.mean.mae, report.mean.precision, report.mean.recall,
                report.rows.size());
    for (const std::string& failure : report.failures)
        HIERSAL_LOG_WARN("skipped %s", failure.c_str());
    return report.failures.empty() ? kExitOk : kExitPartial;
}

// ---- synth ----

int cmd_synth(const SyntheticSpec& spec, const std::string& out_dir) {
    fs::create_directories(out_dir);
    for (int i = 0; i < spec.count; ++i) {
        SyntheticImage si = generate_one(spec, static_cast<std::uint64_t>(i));
        char name[32];
        std::snprintf(name, sizeof(name), "%04d", i);
        save_rgb_png(si.image, (fs::path(out_dir) / (std::string(name) + ".png")).string());
        save_gray_png(si.mask, (fs::path(out_dir) / (std::string(name) + "_gt.png")).string());
    }
    return kExitOk;
}

// ---- ablate ----

json default_grid() {
    json grid = json::array();
    for (const char* contrast : {"local", "global"})
        for (const char* model : {"mean", "hist"})
            for (const char* boundary : {"off", "on"}) {
                json cell;
                cell["contrast"] = contrast;
                cell["region_model"] = model;
                cell["boundary_prior"] = boundary;
                grid.push_back(std::move(cell));
            }
    return grid;
}

std::string grid_label(const json& cell) {
    if (cell.contains("name")) return cell.at("name").get<std::string>();
    std::string label;
    for (const auto& [key, value] : cell.items()) {
        if (!label.empty()) label += " ";
        label += key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
    }
    return label;
}

int cmd_ablate(const CliOverrides& overrides, const std::string& grid_path,
               const std::string& image_dir, const std::string& gt_dir) {
    RunConfig base = resolve_config(overrides);
    json grid;
    if (grid_path.empty()) {
        grid = default_grid();
    } else {
        std::ifstream in(grid_path, std::ios::binary);
        if (!in) throw IoError("cannot open grid: " + grid_path);
        grid = json::parse(in, nullptr, true);
        if (!grid.is_array()) throw FormatError("grid must be a JSON array of overrides");
    }

    std::vector<std::string> inputs;
    for (const auto& entry : fs::directory_iterator(image_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string stem = entry.path().stem().string();
        std::string ext = entry.path().extension().string();
        if (stem.size() >= 3 && stem.substr(stem.size() - 3) == "_gt") continue;
        if (ext == ".png" || ext == ".ppm" || ext == ".pgm") inputs.push_back(entry.path().string());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
        HIERSAL_LOG_ERROR("ablate: no images in %s", image_dir.c_str());
        return kExitUsage;
    }

    fs::path out_root(base.out_dir);
    fs::create_directories(out_root);
    std::ofstream csv(out_root / "ablation.csv", std::ios::binary);
    csv << "config,precision,recall,f1,mae\n";

    int exit_code = kExitOk;
    int cell_index = 0;
    for (const json& cell : grid) {
        std::string label = grid_label(cell);
        json full = json::parse(config_to_json_text(base));
        json patch = cell;
        patch.erase("name");
        full.merge_patch(patch);
        RunConfig cfg = config_from_json_text(full.dump());
        cfg.out_dir = (out_root / ("grid_" + std::to_string(cell_index))).string();
        fs::create_directories(cfg.out_dir);

        int failures = 0;
        for (const std::string& input : inputs) {
            try {
                RgbImage img = load_image(input);
                PipelineResult res = run_pipeline(img, cfg, nullptr);
                save_gray_png(res.map,
                              (fs::path(cfg.out_dir) / (fs::path(input).stem().string() + ".png"))
                                  .string());
            } catch (const std::exception& e) {
                HIERSAL_LOG_ERROR("%s [%s]: %s", input.c_str(), label.c_str(), e.what());
                ++failures;
            }
        }
        try {
            DatasetReport report = dataset_report(cfg.out_dir, gt_dir);
            char row[256];
            std::snprintf(row, sizeof(row), "%.6f,%.6f,%.6f,%.6f", report.mean.precision,
                          report.mean.recall, report.mean.f1, report.mean.mae);
            csv << '"' << label << "\"," << row << "\n";
        } catch (const std::exception& e) {
            HIERSAL_LOG_ERROR("eval [%s]: %s", label.c_str(), e.what());
            csv << '"' << label << "\",,,,\n";
            exit_code = kExitPartial;
        }
        if (failures > 0) exit_code = kExitPartial;
        ++cell_index;
    }
    std::printf("ablation grid written: %s\n", (out_root / "ablation.csv").string().c_str());
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical saliency models: batch driver"};
    app.require_subcommand(1);

    CliOverrides run_overrides;
    std::vector<std::string> run_inputs;
    std::string run_ucm_dir;
    CLI::App* run = app.add_subcommand("run", "compute saliency maps");
    add_config_flags(run, run_overrides);
    run->add_option("images", run_inputs, "input images");
    run->add_option("--ucm-dir", run_ucm_dir, "directory of ucm files matching image stems");

    std::string eval_maps, eval_gt, eval_out = "eval_out";
    CLI::App* eval = app.add_subcommand("eval", "score saliency maps against ground truth");
    eval->add_option("--maps", eval_maps, "directory of saliency maps")->required();
    eval->add_option("--gt", eval_gt, "directory of ground-truth masks")->required();
    eval->add_option("--out", eval_out, "report directory");

    SyntheticSpec synth_spec;
    std::string synth_out = "synth_out";
    long long synth_seed = 0;
    CLI::App* synth = app.add_subcommand("synth", "generate benchmark images + masks");
    synth->add_option("--count", synth_spec.count, "number of images");
    synth->add_option("--width", synth_spec.width, "image width");
    synth->add_option("--height", synth_spec.height, "image height");
    synth->add_option("--noise", synth_spec.noise_amplitude, "8-bit noise amplitude");
    synth->add_option("--min-area", synth_spec.min_area_fraction, "min object fraction");
    synth->add_option("--max-area", synth_spec.max_area_fraction, "max object fraction");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output directory");

    CliOverrides ablate_overrides;
    std::string ablate_grid, ablate_images, ablate_gt;
    CLI::App* ablate = app.add_subcommand("ablate", "score a grid of configurations");
    add_config_flags(ablate, ablate_overrides);
    ablate->add_option("--grid", ablate_grid, "JSON array of config overrides");
    ablate->add_option("--images", ablate_images, "directory of input images")->required();
    ablate->add_option("--gt", ablate_gt, "directory of ground-truth masks")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_overrides, run_inputs, run_ucm_dir);
        if (eval->parsed()) return cmd_eval(eval_maps, eval_gt, eval_out);
        if (synth->parsed()) {
            synth_spec.seed = static_cast<std::uint64_t>(synth_seed);
            return cmd_synth(synth_spec, synth_out);
        }
        if (ablate->parsed()) return cmd_ablate(ablate_overrides, ablate_grid, ablate_images,
                                                ablate_gt);
    } catch (const RangeError& e) {
        HIERSAL_LOG_ERROR("%s", e.what());
        return kExitUsage;
    } catch (const FormatError& e) {
        HIERSAL_LOG_ERROR("%s", e.what());
        return kExitUsage;
    } catch (const MissingPair& e) {
        HIERSAL_LOG_ERROR("%s", e.what());
        return kExitPartial;
    } catch (const std::exception& e) {
        HIERSAL_LOG_ERROR("%s", e.what());
        return kExitPartial;
    }
    return kExitUsage;
}
