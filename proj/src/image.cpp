#include "hiersal/image.hpp"

#include <cmath>

namespace hiersal {

double lab_distance(const Lab& x, const Lab& y) {
    double dL = x.L - y.L;
    double da = x.a - y.a;
    double db = x.b - y.b;
    return std::sqrt(dL * dL + da * da + db * db);
}

namespace {

double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    // CIE threshold (6/29)^3
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kappa = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

} // namespace

Lab srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    double r = srgb_to_linear(r8 / 255.0);
    double g = srgb_to_linear(g8 / 255.0);
    double b = srgb_to_linear(b8 / 255.0);

    // sRGB -> XYZ, D65 white point
    double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    constexpr double xn = 0.4124564 + 0.3575761 + 0.1804375;
    constexpr double yn = 0.2126729 + 0.7151522 + 0.0721750;
    constexpr double zn = 0.0193339 + 0.1191920 + 0.9503041;

    double fx = lab_f(x / xn);
    double fy = lab_f(y / yn);
    double fz = lab_f(z / zn);

    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage rgb_to_lab(const RgbImage& img) {
    LabImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.data.size());
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        Lab lab = srgb_to_lab(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]);
        out.data[3 * i] = lab.L;
        out.data[3 * i + 1] = lab.a;
        out.data[3 * i + 2] = lab.b;
    }
    return out;
}

void rescale_to_unit(GrayMap& map) {
    if (map.data.empty()) return;
    double lo = map.data[0], hi = map.data[0];
    for (double v : map.data) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    if (hi <= lo) {
        for (double& v : map.data) v = 0.0;
        return;
    }
    double inv = 1.0 / (hi - lo);
    for (double& v : map.data) v = (v - lo) * inv;
}

} // namespace hiersal
