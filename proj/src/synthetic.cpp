#include "hiersal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hiersal/errors.hpp"

namespace hiersal {

namespace {

// Raw-draw helpers; std::uniform_* adapters are implementation-defined and
// would break cross-toolchain reproducibility of seeded outputs.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    std::uint64_t bits() { return engine(); }
    int uniform_int(int lo, int hi) { // inclusive
        return lo + static_cast<int>(bits() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double uniform01() { return (bits() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
};

struct Shape {
    bool ellipse = false;
    double cx = 0, cy = 0; // center
    double ax = 0, ay = 0; // half extents
    bool contains(int x, int y) const {
        double dx = (x + 0.5 - cx) / ax;
        double dy = (y + 0.5 - cy) / ay;
        if (ellipse) return dx * dx + dy * dy <= 1.0;
        return std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
    }
};

} // namespace

SyntheticImage generate_one(const SyntheticSpec& spec, std::uint64_t index) {
    if (spec.width < 8 || spec.height < 8) throw RangeError("synthetic image too small");
    Rng rng(spec.seed * 0x9E3779B97F4A7C15ull + index * 0xBF58476D1CE4E5B9ull + 1);

    const int w = spec.width, h = spec.height;
    const double total = static_cast<double>(w) * h;
    const int margin = spec.allow_border ? 0 : 2;

    auto rand_color = [&] {
        return std::array<int, 3>{rng.uniform_int(0, 255), rng.uniform_int(0, 255),
                                  rng.uniform_int(0, 255)};
    };
    std::array<int, 3> bg = rand_color();
    Lab bg_lab = srgb_to_lab(static_cast<std::uint8_t>(bg[0]), static_cast<std::uint8_t>(bg[1]),
                             static_cast<std::uint8_t>(bg[2]));

    std::array<int, 3> obj = bg;
    double best_d = -1.0;
    std::array<int, 3> best = bg;
    for (int tries = 0; tries < 256; ++tries) {
        std::array<int, 3> cand = rand_color();
        Lab cand_lab = srgb_to_lab(static_cast<std::uint8_t>(cand[0]),
                                   static_cast<std::uint8_t>(cand[1]),
                                   static_cast<std::uint8_t>(cand[2]));
        double d = lab_distance(bg_lab, cand_lab);
        if (d > best_d) {
            best_d = d;
            best = cand;
        }
        if (d >= spec.min_color_distance) break;
    }
    obj = best;

    SyntheticImage out;
    out.image.width = w;
    out.image.height = h;
    out.image.data.resize(3 * static_cast<std::size_t>(w) * h);
    out.mask = GrayMap(w, h, 0.0);

    for (int attempt = 0; attempt < 16; ++attempt) {
        double frac = rng.uniform(spec.min_area_fraction, spec.max_area_fraction);
        double area = frac * total;

        Shape s;
        s.ellipse = (rng.bits() & 1) != 0;
        double aspect = rng.uniform(0.6, 1.7);
        constexpr double pi = 3.14159265358979323846;
        // half extents: rectangles cover 4*ax*ay, ellipses pi*ax*ay
        double ax = s.ellipse ? std::sqrt(area * aspect / pi) : std::sqrt(area * aspect) / 2.0;
        double ay = s.ellipse ? std::sqrt(area / (pi * aspect)) : std::sqrt(area / aspect) / 2.0;
        ax = std::min(ax, (w - 2.0 * margin) / 2.0 - 0.5);
        ay = std::min(ay, (h - 2.0 * margin) / 2.0 - 0.5);
        s.ax = ax;
        s.ay = ay;

        double cx_lo = margin + ax, cx_hi = w - margin - ax;
        double cy_lo = margin + ay, cy_hi = h - margin - ay;
        if (cx_lo > cx_hi || cy_lo > cy_hi) continue;
        s.cx = rng.uniform(cx_lo, cx_hi);
        s.cy = rng.uniform(cy_lo, cy_hi);

        long long count = 0;
        std::fill(out.mask.data.begin(), out.mask.data.end(), 0.0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (s.contains(x, y)) {
                    out.mask.at(x, y) = 1.0;
                    ++count;
                }
        double got = count / total;
        if (got < spec.min_area_fraction * 0.8 || got > spec.max_area_fraction * 1.2) continue;
        break;
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::array<int, 3>& c = out.mask.at(x, y) > 0.5 ? obj : bg;
            std::uint8_t* px = out.image.pixel(x, y);
            for (int ch = 0; ch < 3; ++ch) {
                int noise = spec.noise_amplitude > 0
                                ? rng.uniform_int(-spec.noise_amplitude, spec.noise_amplitude)
                                : 0;
                px[ch] = static_cast<std::uint8_t>(std::clamp(c[ch] + noise, 0, 255));
            }
        }
    }
    return out;
}

std::vector<SyntheticImage> generate_benchmark(const SyntheticSpec& spec) {
    std::vector<SyntheticImage> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i)
        out.push_back(generate_one(spec, static_cast<std::uint64_t>(i)));
    return out;
}

} // namespace hiersal
