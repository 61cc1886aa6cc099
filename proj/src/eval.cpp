#include "hiersal/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>

#include "hiersal/errors.hpp"
#include "hiersal/image_io.hpp"

namespace fs = std::filesystem;

namespace hiersal {

namespace {

void check_dims(const GrayMap& map, const GrayMap& gt) {
    if (map.width != gt.width || map.height != gt.height)
        throw DimensionError("map/ground-truth size mismatch");
}

inline bool gt_positive(double v) { return v >= 0.5; }

} // namespace

PrCurve pr_sweep(const GrayMap& map, const GrayMap& gt) {
    check_dims(map, gt);
    const std::size_t n = map.pixel_count();

    // v >= t/255 for integer t exactly when floor(255 v) >= t; bucket pixels
    // by floor(255 v) once, then accumulate from the top threshold down
    std::array<long long, 256> selected{};
    std::array<long long, 256> positive{};
    long long gt_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::clamp(map.data[i], 0.0, 1.0) * 255.0;
        int cell = std::min(255, static_cast<int>(std::floor(v)));
        selected[cell] += 1;
        if (gt_positive(gt.data[i])) {
            positive[cell] += 1;
            gt_count += 1;
        }
    }
    if (gt_count == 0) throw EmptyGroundTruth("ground truth has no positive pixels");

    PrCurve curve;
    long long tp = 0, sel = 0;
    for (int t = 255; t >= 0; --t) {
        sel += selected[t];
        tp += positive[t];
        curve.precision[t] = sel == 0 ? 1.0 : static_cast<double>(tp) / sel;
        curve.recall[t] = static_cast<double>(tp) / gt_count;
    }
    return curve;
}

OtsuResult otsu_threshold(const GrayMap& map) {
    std::array<long long, 256> hist{};
    for (double v : map.data) hist[quantize8(v)] += 1;

    const long long total = static_cast<long long>(map.pixel_count());
    double total_sum = 0.0;
    for (int i = 0; i < 256; ++i) total_sum += static_cast<double>(i) * hist[i];

    OtsuResult res;
    double best = -1.0;
    long long w0 = 0;
    double sum0 = 0.0;
    // split k: background bins [0..k], foreground [k+1..255]
    for (int k = 0; k < 255; ++k) {
        w0 += hist[k];
        sum0 += static_cast<double>(k) * hist[k];
        long long w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        double m0 = sum0 / w0;
        double m1 = (total_sum - sum0) / w1;
        double between = static_cast<double>(w0) * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            res.threshold = k + 1;
        }
    }
    if (best < 0.0) {
        res.threshold = 0;
        res.degenerate = true;
    }
    return res;
}

ScalarScores scores(const GrayMap& map, const GrayMap& gt) {
    check_dims(map, gt);
    OtsuResult otsu = otsu_threshold(map);

    long long tp = 0, fp = 0, fn = 0;
    double abs_err = 0.0;
    const std::size_t n = map.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        bool pred = quantize8(map.data[i]) >= otsu.threshold;
        bool truth = gt_positive(gt.data[i]);
        tp += pred && truth;
        fp += pred && !truth;
        fn += !pred && truth;
        abs_err += std::abs(map.data[i] - (truth ? 1.0 : 0.0));
    }

    ScalarScores s;
    s.precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
    s.recall = (tp + fn) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                          : 0.0;
    s.mae = abs_err / static_cast<double>(n);
    return s;
}

namespace {

std::map<std::string, fs::path> stem_index(const std::string& dir) {
    std::map<std::string, fs::path> index;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (char& c : ext) c = static_cast<char>(std::tolower(c));
        if (ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
            index.emplace(entry.path().stem().string(), entry.path());
    }
    return index;
}

} // namespace

DatasetReport dataset_report(const std::string& map_dir, const std::string& gt_dir) {
    auto maps = stem_index(map_dir);
    auto gts = stem_index(gt_dir);
    if (maps.empty()) throw MissingPair("no saliency maps found in " + map_dir);

    // ground truths are often stored as <stem>_gt
    auto find_gt = [&](const std::string& stem) {
        auto it = gts.find(stem);
        if (it == gts.end()) it = gts.find(stem + "_gt");
        return it;
    };

    DatasetReport report;
    std::array<double, 256> psum{}, rsum{};
    ScalarScores acc;
    int n_ok = 0;

    for (const auto& [stem, path] : maps) {
        auto git = find_gt(stem);
        if (git == gts.end()) throw MissingPair("no ground truth for stem: " + stem);
        try {
            GrayMap map = load_gray(path.string());
            GrayMap gt = load_gray(git->second.string());
            PrCurve curve = pr_sweep(map, gt);
            ScalarScores s = scores(map, gt);
            for (int t = 0; t < 256; ++t) {
                psum[t] += curve.precision[t];
                rsum[t] += curve.recall[t];
            }
            acc.precision += s.precision;
            acc.recall += s.recall;
            acc.f1 += s.f1;
            acc.mae += s.mae;
            report.rows.emplace_back(stem, s);
            ++n_ok;
        } catch (const Error& e) {
            report.failures.push_back(stem + ": " + e.what());
        }
    }
    if (n_ok == 0) throw MissingPair("no image pair could be evaluated");

    for (int t = 0; t < 256; ++t) {
        report.curve.precision[t] = psum[t] / n_ok;
        report.curve.recall[t] = rsum[t] / n_ok;
    }
    report.mean.precision = acc.precision / n_ok;
    report.mean.recall = acc.recall / n_ok;
    report.mean.f1 = acc.f1 / n_ok;
    report.mean.mae = acc.mae / n_ok;
    return report;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

std::unique_ptr<std::FILE, FileCloser> open_out(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot write: " + path);
    return f;
}

} // namespace

void write_scores_csv(const DatasetReport& report, const std::string& path) {
    auto f = open_out(path);
    std::fprintf(f.get(), "name,precision,recall,f1,mae\n");
    for (const auto& [name, s] : report.rows)
        std::fprintf(f.get(), "%s,%.6f,%.6f,%.6f,%.6f\n", name.c_str(), s.precision, s.recall,
                     s.f1, s.mae);
}

void write_curve_csv(const DatasetReport& report, const std::string& path) {
    auto f = open_out(path);
    std::fprintf(f.get(), "threshold,precision,recall\n");
    for (int t = 0; t < 256; ++t)
        std::fprintf(f.get(), "%d,%.6f,%.6f\n", t, report.curve.precision[t],
                     report.curve.recall[t]);
}

} // namespace hiersal
