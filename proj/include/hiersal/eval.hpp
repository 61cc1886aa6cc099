#ifndef HIERSAL_EVAL_HPP
#define HIERSAL_EVAL_HPP

#include <array>
#include <string>
#include <vector>

#include "hiersal/image.hpp"

namespace hiersal {

// Precision/recall for the 256 fixed thresholds t/255, t = 0..255.
struct PrCurve {
    std::array<double, 256> precision{};
    std::array<double, 256> recall{};
};

struct ScalarScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mae = 0.0;
};

// Ground truth binarizes at 0.5. Empty prediction or empty intersection
// cases define 0/0 as 1 for precision; an empty ground truth is an error.
PrCurve pr_sweep(const GrayMap& map, const GrayMap& gt);

struct OtsuResult {
    int threshold = 0;   // foreground = quantized value >= threshold
    bool degenerate = false; // constant map
};

// 8-bit histogram threshold maximizing between-class variance, lowest on ties.
OtsuResult otsu_threshold(const GrayMap& map);

// Precision/recall/F1 under the Otsu binarization; MAE from the continuous map.
ScalarScores scores(const GrayMap& map, const GrayMap& gt);

struct DatasetReport {
    PrCurve curve; // per-threshold mean over images
    ScalarScores mean;
    std::vector<std::pair<std::string, ScalarScores>> rows; // per image, sorted by name
    std::vector<std::string> failures;                      // per-image error messages
};

// Pairs files by stem between the two directories.
DatasetReport dataset_report(const std::string& map_dir, const std::string& gt_dir);

// scores.csv: name,precision,recall,f1,mae ; pr_curve.csv: threshold,precision,recall
void write_scores_csv(const DatasetReport& report, const std::string& path);
void write_curve_csv(const DatasetReport& report, const std::string& path);

} // namespace hiersal

#endif
