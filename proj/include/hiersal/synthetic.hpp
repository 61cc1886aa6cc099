#ifndef HIERSAL_SYNTHETIC_HPP
#define HIERSAL_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "hiersal/image.hpp"

namespace hiersal {

// Single distinct-color object on a plain noisy background; the object never
// touches the image border unless allow_border is set.
struct SyntheticSpec {
    int count = 1;
    int width = 96;
    int height = 96;
    double min_area_fraction = 0.05;
    double max_area_fraction = 0.25;
    int noise_amplitude = 5;      // uniform per-channel noise in 8-bit steps
    double min_color_distance = 60.0; // Lab separation between object and background
    bool allow_border = false;
    std::uint64_t seed = 0;
};

struct SyntheticImage {
    RgbImage image;
    GrayMap mask; // exact object membership, values 0/1
};

// Deterministic for a given spec (raw generator draws, no distribution
// adapters, so results are stable across standard libraries).
std::vector<SyntheticImage> generate_benchmark(const SyntheticSpec& spec);

SyntheticImage generate_one(const SyntheticSpec& spec, std::uint64_t index);

} // namespace hiersal

#endif
