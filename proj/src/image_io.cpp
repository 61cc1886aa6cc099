#include "hiersal/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "hiersal/errors.hpp"

namespace hiersal {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open file: " + path);
    return f;
}

// libpng reports errors through longjmp; exceptions must not cross its C frames.
void png_error_fn(png_structp png, png_const_charp) { png_longjmp(png, 1); }
void png_warning_fn(png_structp, png_const_charp) {}

bool has_png_signature(std::FILE* f) {
    unsigned char sig[8];
    std::size_t n = std::fread(sig, 1, 8, f);
    std::rewind(f);
    return n == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

// Decoded image after libpng transforms.
struct PngPixels {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 or 3
    int bit_depth = 0; // 8 or 16
    std::vector<std::uint8_t> bytes;
};

PngPixels read_png(const std::string& path, bool want_gray) {
    FilePtr f = open_file(path, "rb");
    if (!has_png_signature(f.get())) throw FormatError("not a png file: " + path);

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw Error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("png_create_info_struct failed");
    }

    PngPixels out;
    std::vector<png_bytep> rows;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("undecodable png: " + path);
    }

    png_init_io(png, f.get());
    png_read_info(png, info);

    int color_type = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if ((color_type & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);

    if (want_gray) {
        if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
            color_type == PNG_COLOR_TYPE_PALETTE)
            png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    } else {
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        if (depth == 16) png_set_strip_16(png);
    }
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.bit_depth = png_get_bit_depth(png, info);
    out.channels = png_get_channels(png, info);
    if (out.width < 1 || out.height < 1) png_longjmp(png, 1);

    std::size_t rowbytes = png_get_rowbytes(png, info);
    out.bytes.resize(rowbytes * out.height);
    rows.resize(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const std::string& path, int width, int height, int color_type,
               std::vector<png_bytep>& rows) {
    FilePtr f = open_file(path, "wb");
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw Error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png_create_info_struct failed");
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failed: " + path);
    }

    png_init_io(png, f.get());
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);

    png_destroy_write_struct(&png, &info);
}

// ---- binary PNM ----

int pnm_token(std::FILE* f) {
    int c;
    for (;;) {
        c = std::fgetc(f);
        if (c == '#') {
            while (c != '\n' && c != EOF) c = std::fgetc(f);
        } else if (c == EOF || !std::isspace(c)) {
            break;
        }
    }
    if (c == EOF) throw FormatError("truncated pnm header");
    int value = 0;
    bool digit = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        digit = true;
        c = std::fgetc(f);
    }
    if (!digit) throw FormatError("malformed pnm header");
    return value;
}

struct PnmHeader {
    int type = 0; // 5 or 6
    int width = 0;
    int height = 0;
    int maxval = 0;
};

PnmHeader read_pnm_header(std::FILE* f, const std::string& path) {
    int p = std::fgetc(f);
    int t = std::fgetc(f);
    if (p != 'P' || (t != '5' && t != '6')) throw FormatError("not a binary pnm file: " + path);
    PnmHeader h;
    h.type = t - '0';
    h.width = pnm_token(f);
    h.height = pnm_token(f);
    h.maxval = pnm_token(f);
    if (h.width < 1 || h.height < 1 || h.maxval < 1 || h.maxval > 65535)
        throw FormatError("bad pnm dimensions: " + path);
    return h;
}

std::vector<std::uint8_t> read_exact(std::FILE* f, std::size_t n, const std::string& path) {
    std::vector<std::uint8_t> buf(n);
    if (std::fread(buf.data(), 1, n, f) != n) throw FormatError("truncated pnm data: " + path);
    return buf;
}

bool has_extension(const std::string& path, const char* ext) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return false;
    std::string e = path.substr(dot + 1);
    for (char& c : e) c = static_cast<char>(std::tolower(c));
    return e == ext;
}

bool looks_like_pnm(const std::string& path) {
    return has_extension(path, "ppm") || has_extension(path, "pgm") || has_extension(path, "pnm");
}

} // namespace

RgbImage load_image(const std::string& path) {
    if (looks_like_pnm(path)) {
        FilePtr f = open_file(path, "rb");
        PnmHeader h = read_pnm_header(f.get(), path);
        if (h.maxval != 255) throw FormatError("pnm maxval != 255 unsupported: " + path);
        RgbImage img;
        img.width = h.width;
        img.height = h.height;
        std::size_t n = img.pixel_count();
        if (h.type == 6) {
            img.data = read_exact(f.get(), 3 * n, path);
        } else {
            auto gray = read_exact(f.get(), n, path);
            img.data.resize(3 * n);
            for (std::size_t i = 0; i < n; ++i)
                img.data[3 * i] = img.data[3 * i + 1] = img.data[3 * i + 2] = gray[i];
        }
        return img;
    }

    PngPixels px = read_png(path, /*want_gray=*/false);
    if (px.channels != 3 || px.bit_depth != 8)
        throw FormatError("unsupported png layout for color image: " + path);
    RgbImage img;
    img.width = px.width;
    img.height = px.height;
    img.data = std::move(px.bytes);
    return img;
}

GrayMap load_gray(const std::string& path) {
    if (looks_like_pnm(path)) {
        FilePtr f = open_file(path, "rb");
        PnmHeader h = read_pnm_header(f.get(), path);
        GrayMap map(h.width, h.height);
        std::size_t n = map.pixel_count();
        if (h.type == 6) {
            if (h.maxval != 255) throw FormatError("pnm maxval != 255 unsupported: " + path);
            auto rgb = read_exact(f.get(), 3 * n, path);
            for (std::size_t i = 0; i < n; ++i)
                map.data[i] = (rgb[3 * i] + rgb[3 * i + 1] + rgb[3 * i + 2]) / (3.0 * 255.0);
        } else if (h.maxval <= 255) {
            auto raw = read_exact(f.get(), n, path);
            for (std::size_t i = 0; i < n; ++i) map.data[i] = raw[i] / static_cast<double>(h.maxval);
        } else {
            auto raw = read_exact(f.get(), 2 * n, path); // big-endian 16 bit
            for (std::size_t i = 0; i < n; ++i) {
                unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
                map.data[i] = v / static_cast<double>(h.maxval);
            }
        }
        return map;
    }

    PngPixels px = read_png(path, /*want_gray=*/true);
    if (px.channels != 1) throw FormatError("unsupported png layout for gray map: " + path);
    GrayMap map(px.width, px.height);
    std::size_t n = map.pixel_count();
    if (px.bit_depth == 8) {
        for (std::size_t i = 0; i < n; ++i) map.data[i] = px.bytes[i] / 255.0;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            unsigned v = (static_cast<unsigned>(px.bytes[2 * i]) << 8) | px.bytes[2 * i + 1];
            map.data[i] = v / 65535.0;
        }
    }
    return map;
}

void save_gray_png(const GrayMap& map, const std::string& path) {
    std::vector<std::uint8_t> bytes(map.pixel_count());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(quantize8(map.data[i]));
    std::vector<png_bytep> rows(map.height);
    for (int y = 0; y < map.height; ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * map.width;
    write_png(path, map.width, map.height, PNG_COLOR_TYPE_GRAY, rows);
}

void save_rgb_png(const RgbImage& img, const std::string& path) {
    std::vector<std::uint8_t> bytes = img.data;
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = bytes.data() + 3 * static_cast<std::size_t>(y) * img.width;
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, rows);
}

} // namespace hiersal
