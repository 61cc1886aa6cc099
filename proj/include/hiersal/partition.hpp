#ifndef HIERSAL_PARTITION_HPP
#define HIERSAL_PARTITION_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "hiersal/image.hpp"

namespace hiersal {

// Contour lengths are counted in 4-neighbor boundary pixel pairs; every
// pixel side on the image border adds one unit. Under this convention
// sum(neighbor_contact) + border_len == perimeter holds exactly.
struct Region {
    int id = -1;       // index in the owning partition
    int node_id = -1;  // hierarchy node behind this region, -1 if none
    long long area = 0;
    long long sum_x = 0; // sums of integer pixel coordinates
    long long sum_y = 0;
    Lab sum_lab;
    long long perimeter = 0;
    long long border_len = 0;
    std::map<int, long long> neighbor_contact; // region id -> shared contour length

    double centroid_x() const { return static_cast<double>(sum_x) / area; }
    double centroid_y() const { return static_cast<double>(sum_y) / area; }
    Lab mean_lab() const {
        double inv = 1.0 / area;
        return {sum_lab.L * inv, sum_lab.a * inv, sum_lab.b * inv};
    }
};

struct Partition {
    int width = 0;
    int height = 0;
    std::vector<int> labels; // per pixel: region id (index into regions)
    std::vector<Region> regions;

    int label(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return regions.size(); }
};

enum class InitialPartitionMode {
    PerPixel,
    FlatZones, // maximal 4-connected sets of identical Lab triples
};

Partition initial_partition(const LabImage& img, InitialPartitionMode mode);

// Builds the region table for a label map: area, coordinate sums, perimeter,
// border length and neighbor contacts. Labels must be 0..n_regions-1.
Partition partition_from_labels(int width, int height, std::vector<int> labels, int n_regions);

// Accumulates per-region Lab sums with a raster scan.
void fill_lab_sums(Partition& p, const LabImage& img);

// 4-connected components of an arbitrary-valued label seed map; returns
// compacted labels (0-based, raster order of first occurrence) and count.
int connected_components(int width, int height, const std::vector<int>& values,
                         std::vector<int>& out_labels);

// True if every region of fine lies inside exactly one region of coarse.
bool is_nested(const Partition& fine, const Partition& coarse);

} // namespace hiersal

#endif
