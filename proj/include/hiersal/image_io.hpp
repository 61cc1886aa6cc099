#ifndef HIERSAL_IMAGE_IO_HPP
#define HIERSAL_IMAGE_IO_HPP

#include <string>

#include "hiersal/image.hpp"

namespace hiersal {

// PNG (8-bit RGB/gray, palette expanded) or binary PPM/PGM.
// Gray and palette sources are expanded to RGB.
RgbImage load_image(const std::string& path);

// PNG (8/16-bit gray, RGB collapsed to luma) or binary PGM.
// Values are scaled to [0,1]: 8-bit by 255, 16-bit by 65535.
GrayMap load_gray(const std::string& path);

// 8-bit gray PNG; values clamped to [0,1] and quantized with round-half-up.
void save_gray_png(const GrayMap& map, const std::string& path);

void save_rgb_png(const RgbImage& img, const std::string& path);

// Quantization used for all 8-bit output and thresholding: [0,1] -> 0..255.
inline int quantize8(double v) {
    if (v <= 0.0) return 0;
    if (v >= 1.0) return 255;
    return static_cast<int>(v * 255.0 + 0.5);
}

} // namespace hiersal

#endif
