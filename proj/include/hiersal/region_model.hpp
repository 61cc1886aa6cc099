#ifndef HIERSAL_REGION_MODEL_HPP
#define HIERSAL_REGION_MODEL_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "hiersal/image.hpp"
#include "hiersal/partition.hpp"

namespace hiersal {

enum class ModelKind {
    MeanColor,
    Histogram,
};

struct Signature {
    Lab color;
    double weight; // > 0, sums to 1 over a model
};

// 64 uniform bins per channel over L [0,100], a/b [-128,128); out-of-range
// values clamp into the edge bins.
constexpr int kBinsPerChannel = 64;
constexpr int kMaxSignatures = 256;

std::uint32_t lab_bin_index(const Lab& lab);

struct BinStat {
    long long count = 0;
    Lab sum;
};

// Sparse bin-count table carried so merges stay exact; the <=256 signatures
// are re-derived from it on demand.
struct HistogramModel {
    std::map<std::uint32_t, BinStat> bins;
    std::vector<Signature> signatures;
    long long total = 0;

    void add_pixel(const Lab& lab);
    void rebuild_signatures();
};

struct MeanColorModel {
    Lab sum;
    long long area = 0;

    Lab mean() const {
        double inv = 1.0 / area;
        return {sum.L * inv, sum.a * inv, sum.b * inv};
    }
};

struct RegionModel {
    ModelKind kind = ModelKind::MeanColor;
    MeanColorModel mean;
    HistogramModel hist;
};

// One model per region, built with a single raster scan of the image.
std::vector<RegionModel> build_models(const Partition& p, const LabImage& img, ModelKind kind);

RegionModel build_model_from_pixels(const std::vector<Lab>& pixels, ModelKind kind);

// Exact transportation cost between two normalized signature sets with
// Euclidean ground distance in Lab.
double emd(const std::vector<Signature>& a, const std::vector<Signature>& b);

// euclidean-mean or emd-signatures depending on the models' kind.
double region_distance(const RegionModel& a, const RegionModel& b);

// Model of the union of two regions. Mean models combine area-weighted;
// histogram models sum their bin tables and re-reduce, which equals
// rebuilding from the union's pixels.
RegionModel merge_models(const RegionModel& a, const RegionModel& b);

} // namespace hiersal

#endif
