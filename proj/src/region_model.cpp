#include "hiersal/region_model.hpp"

#include <algorithm>
#include <cmath>

#include "hiersal/errors.hpp"

namespace hiersal {

std::uint32_t lab_bin_index(const Lab& lab) {
    auto bin = [](double v, double lo, double hi) {
        int b = static_cast<int>(std::floor((v - lo) * kBinsPerChannel / (hi - lo)));
        return static_cast<std::uint32_t>(std::clamp(b, 0, kBinsPerChannel - 1));
    };
    std::uint32_t bl = bin(lab.L, 0.0, 100.0);
    std::uint32_t ba = bin(lab.a, -128.0, 128.0);
    std::uint32_t bb = bin(lab.b, -128.0, 128.0);
    return (bl * kBinsPerChannel + ba) * kBinsPerChannel + bb;
}

void HistogramModel::add_pixel(const Lab& lab) {
    BinStat& s = bins[lab_bin_index(lab)];
    s.count += 1;
    s.sum += lab;
    total += 1;
}

void HistogramModel::rebuild_signatures() {
    // most frequent occupied bins win, ties toward the lowest bin index
    std::vector<std::pair<std::uint32_t, const BinStat*>> order;
    order.reserve(bins.size());
    for (const auto& [idx, st] : bins) order.emplace_back(idx, &st);
    auto better = [](const auto& a, const auto& b) {
        if (a.second->count != b.second->count) return a.second->count > b.second->count;
        return a.first < b.first;
    };
    if (order.size() > kMaxSignatures) {
        std::nth_element(order.begin(), order.begin() + kMaxSignatures, order.end(), better);
        order.resize(kMaxSignatures);
    }
    std::sort(order.begin(), order.end(), better);

    long long kept = 0;
    for (const auto& [idx, st] : order) kept += st->count;
    signatures.clear();
    signatures.reserve(order.size());
    for (const auto& [idx, st] : order) {
        double inv = 1.0 / st->count;
        signatures.push_back(
            {{st->sum.L * inv, st->sum.a * inv, st->sum.b * inv}, st->count / static_cast<double>(kept)});
    }
}

std::vector<RegionModel> build_models(const Partition& p, const LabImage& img, ModelKind kind) {
    if (img.width != p.width || img.height != p.height)
        throw DimensionError("partition/image size mismatch");
    std::vector<RegionModel> models(p.regions.size());
    for (auto& m : models) m.kind = kind;
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < p.width; ++x) {
            RegionModel& m = models[p.label(x, y)];
            Lab lab = img.lab(x, y);
            if (kind == ModelKind::MeanColor) {
                m.mean.sum += lab;
                m.mean.area += 1;
            } else {
                m.hist.add_pixel(lab);
            }
        }
    }
    if (kind == ModelKind::Histogram)
        for (auto& m : models) m.hist.rebuild_signatures();
    return models;
}

RegionModel build_model_from_pixels(const std::vector<Lab>& pixels, ModelKind kind) {
    if (pixels.empty()) throw RangeError("model of an empty region");
    RegionModel m;
    m.kind = kind;
    for (const Lab& lab : pixels) {
        if (kind == ModelKind::MeanColor) {
            m.mean.sum += lab;
            m.mean.area += 1;
        } else {
            m.hist.add_pixel(lab);
        }
    }
    if (kind == ModelKind::Histogram) m.hist.rebuild_signatures();
    return m;
}

double region_distance(const RegionModel& a, const RegionModel& b) {
    if (a.kind != b.kind) throw KindMismatch("region models of different kinds");
    if (a.kind == ModelKind::MeanColor) return lab_distance(a.mean.mean(), b.mean.mean());
    return emd(a.hist.signatures, b.hist.signatures);
}

RegionModel merge_models(const RegionModel& a, const RegionModel& b) {
    if (a.kind != b.kind) throw KindMismatch("region models of different kinds");
    RegionModel m;
    m.kind = a.kind;
    if (a.kind == ModelKind::MeanColor) {
        m.mean.sum = a.mean.sum + b.mean.sum;
        m.mean.area = a.mean.area + b.mean.area;
        return m;
    }
    m.hist.bins = a.hist.bins;
    for (const auto& [idx, st] : b.hist.bins) {
        BinStat& dst = m.hist.bins[idx];
        dst.count += st.count;
        dst.sum += st.sum;
    }
    m.hist.total = a.hist.total + b.hist.total;
    m.hist.rebuild_signatures();
    return m;
}

} // namespace hiersal
