#include "hiersal/partition.hpp"

#include <array>

#include "hiersal/errors.hpp"

namespace hiersal {

int connected_components(int width, int height, const std::vector<int>& values,
                         std::vector<int>& out_labels) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    out_labels.assign(n, -1);
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (out_labels[start] != -1) continue;
        int v = values[start];
        out_labels[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            std::size_t p = stack.back();
            stack.pop_back();
            int x = static_cast<int>(p % width);
            int y = static_cast<int>(p / width);
            auto visit = [&](int nx, int ny) {
                std::size_t q = static_cast<std::size_t>(ny) * width + nx;
                if (out_labels[q] == -1 && values[q] == v) {
                    out_labels[q] = next;
                    stack.push_back(q);
                }
            };
            if (x > 0) visit(x - 1, y);
            if (x + 1 < width) visit(x + 1, y);
            if (y > 0) visit(x, y - 1);
            if (y + 1 < height) visit(x, y + 1);
        }
        ++next;
    }
    return next;
}

Partition partition_from_labels(int width, int height, std::vector<int> labels, int n_regions) {
    Partition p;
    p.width = width;
    p.height = height;
    p.labels = std::move(labels);
    p.regions.resize(n_regions);
    for (int i = 0; i < n_regions; ++i) p.regions[i].id = i;

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int a = p.labels[static_cast<std::size_t>(y) * width + x];
            Region& r = p.regions[a];
            r.area += 1;
            r.sum_x += x;
            r.sum_y += y;
            long long border = (x == 0) + (x == width - 1) + (y == 0) + (y == height - 1);
            r.border_len += border;
            r.perimeter += border;
            // right and down neighbors; each mixed pair adds one unit to both sides
            if (x + 1 < width) {
                int b = p.labels[static_cast<std::size_t>(y) * width + x + 1];
                if (a != b) {
                    p.regions[a].perimeter += 1;
                    p.regions[b].perimeter += 1;
                    p.regions[a].neighbor_contact[b] += 1;
                    p.regions[b].neighbor_contact[a] += 1;
                }
            }
            if (y + 1 < height) {
                int b = p.labels[(static_cast<std::size_t>(y) + 1) * width + x];
                if (a != b) {
                    p.regions[a].perimeter += 1;
                    p.regions[b].perimeter += 1;
                    p.regions[a].neighbor_contact[b] += 1;
                    p.regions[b].neighbor_contact[a] += 1;
                }
            }
        }
    }
    return p;
}

void fill_lab_sums(Partition& p, const LabImage& img) {
    if (img.width != p.width || img.height != p.height)
        throw DimensionError("partition/image size mismatch");
    for (Region& r : p.regions) r.sum_lab = Lab{};
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) p.regions[p.label(x, y)].sum_lab += img.lab(x, y);
}

Partition initial_partition(const LabImage& img, InitialPartitionMode mode) {
    const int w = img.width, h = img.height;
    std::vector<int> labels;
    int count = 0;
    if (mode == InitialPartitionMode::PerPixel) {
        labels.resize(static_cast<std::size_t>(w) * h);
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i);
        count = static_cast<int>(labels.size());
    } else {
        // flat zones: group bit-identical Lab triples first, then split into
        // connected components
        std::vector<int> value_ids(static_cast<std::size_t>(w) * h);
        std::map<std::array<double, 3>, int> seen;
        for (std::size_t i = 0; i < value_ids.size(); ++i) {
            std::array<double, 3> key{img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]};
            auto [it, inserted] = seen.try_emplace(key, static_cast<int>(seen.size()));
            value_ids[i] = it->second;
        }
        count = connected_components(w, h, value_ids, labels);
    }
    Partition p = partition_from_labels(w, h, std::move(labels), count);
    fill_lab_sums(p, img);
    return p;
}

bool is_nested(const Partition& fine, const Partition& coarse) {
    if (fine.width != coarse.width || fine.height != coarse.height) return false;
    std::vector<int> parent(fine.regions.size(), -1);
    for (std::size_t i = 0; i < fine.labels.size(); ++i) {
        int f = fine.labels[i];
        int c = coarse.labels[i];
        if (parent[f] == -1)
            parent[f] = c;
        else if (parent[f] != c)
            return false;
    }
    return true;
}

} // namespace hiersal
