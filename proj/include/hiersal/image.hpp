#ifndef HIERSAL_IMAGE_HPP
#define HIERSAL_IMAGE_HPP

#include <cstdint>
#include <vector>

namespace hiersal {

struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

inline Lab operator+(const Lab& x, const Lab& y) { return {x.L + y.L, x.a + y.a, x.b + y.b}; }
inline Lab& operator+=(Lab& x, const Lab& y) { x.L += y.L; x.a += y.a; x.b += y.b; return x; }

double lab_distance(const Lab& x, const Lab& y);

// Row-major 8-bit sRGB triples.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // 3 * width * height

    std::uint8_t* pixel(int x, int y) { return &data[3 * (static_cast<std::size_t>(y) * width + x)]; }
    const std::uint8_t* pixel(int x, int y) const {
        return &data[3 * (static_cast<std::size_t>(y) * width + x)];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Row-major CIELab triples: L in [0,100], a/b roughly [-128,127].
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<double> data; // 3 * width * height

    Lab lab(int x, int y) const {
        const double* p = &data[3 * (static_cast<std::size_t>(y) * width + x)];
        return {p[0], p[1], p[2]};
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Single-channel real-valued map. Used for saliency maps, ground-truth
// masks (binarized at 0.5) and UCM strength maps.
struct GrayMap {
    int width = 0;
    int height = 0;
    std::vector<double> data; // width * height

    GrayMap() = default;
    GrayMap(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Per-pixel sRGB (D65) -> CIELab. Deterministic total function.
LabImage rgb_to_lab(const RgbImage& img);

Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Affine rescale of map values onto [0,1]; a constant map goes to all zeros.
void rescale_to_unit(GrayMap& map);

} // namespace hiersal

#endif
