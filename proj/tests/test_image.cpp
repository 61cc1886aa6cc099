#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hiersal/errors.hpp"
#include "hiersal/image.hpp"
#include "hiersal/image_io.hpp"
#include "oracles.hpp"

using namespace hiersal;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "hiersal_test_image";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("srgb to lab reference points") {
    Lab white = srgb_to_lab(255, 255, 255);
    CHECK(white.L == doctest::Approx(100.0).epsilon(1e-4));
    CHECK(std::abs(white.a) < 0.01);
    CHECK(std::abs(white.b) < 0.01);

    Lab black = srgb_to_lab(0, 0, 0);
    CHECK(std::abs(black.L) < 0.01);
    CHECK(std::abs(black.a) < 0.01);
    CHECK(std::abs(black.b) < 0.01);

    // frozen from an independent colorimetry implementation
    struct Ref {
        std::uint8_t r, g, b;
        double L, a, bb;
    };
    const Ref refs[] = {
        {255, 0, 0, 53.240588, 80.092308, 67.202751},
        {0, 255, 0, 87.735099, -86.183030, 83.179703},
        {0, 0, 255, 32.295673, 79.185591, -107.857300},
        {128, 64, 200, 41.884782, 53.521302, -60.355010},
        {17, 230, 92, 80.449964, -73.578828, 53.343296},
        {200, 200, 1, 78.223166, -17.940207, 78.582472},
    };
    for (const Ref& r : refs) {
        Lab lab = srgb_to_lab(r.r, r.g, r.b);
        CHECK(std::abs(lab.L - r.L) < 0.1);
        CHECK(std::abs(lab.a - r.a) < 0.1);
        CHECK(std::abs(lab.b - r.bb) < 0.1);
    }
}

TEST_CASE("rgb_to_lab deterministic") {
    oracle::TestRng rng(7);
    RgbImage img = oracle::random_rgb_image(rng, 9, 5);
    LabImage a = rgb_to_lab(img);
    LabImage b = rgb_to_lab(img);
    REQUIRE(a.data.size() == b.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == b.data[i]);
}

TEST_CASE("lab round trip through the inverse oracle") {
    oracle::TestRng rng(11);
    for (int i = 0; i < 1000; ++i) {
        std::uint8_t r = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        std::uint8_t g = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        std::uint8_t b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        auto rgb = oracle::lab_to_srgb(srgb_to_lab(r, g, b));
        CHECK(std::abs(rgb[0] - r) <= 1.0);
        CHECK(std::abs(rgb[1] - g) <= 1.0);
        CHECK(std::abs(rgb[2] - b) <= 1.0);
    }
}

TEST_CASE("png color round trip") {
    auto path = (temp_dir() / "white1.png").string();
    RgbImage img;
    img.width = img.height = 1;
    img.data = {255, 255, 255};
    save_rgb_png(img, path);
    RgbImage back = load_image(path);
    REQUIRE(back.width == 1);
    REQUIRE(back.height == 1);
    CHECK(back.data == std::vector<std::uint8_t>{255, 255, 255});
}

TEST_CASE("pgm gray scaling") {
    auto path = (temp_dir() / "g.pgm").string();
    {
        std::ofstream f(path, std::ios::binary);
        f << "P5\n2 2\n255\n";
        const unsigned char px[4] = {0, 85, 170, 255};
        f.write(reinterpret_cast<const char*>(px), 4);
    }
    GrayMap g = load_gray(path);
    REQUIRE(g.width == 2);
    REQUIRE(g.height == 2);
    CHECK(std::abs(g.data[0] - 0.0) <= 1.0 / 255);
    CHECK(std::abs(g.data[1] - 1.0 / 3) <= 1.0 / 255);
    CHECK(std::abs(g.data[2] - 2.0 / 3) <= 1.0 / 255);
    CHECK(std::abs(g.data[3] - 1.0) <= 1.0 / 255);
}

TEST_CASE("16 bit pgm scales to unit range") {
    auto path = (temp_dir() / "g16.pgm").string();
    {
        std::ofstream f(path, std::ios::binary);
        f << "P5\n2 1\n65535\n";
        const unsigned char px[4] = {0x00, 0x00, 0xff, 0xff}; // 0 and 65535, big endian
        f.write(reinterpret_cast<const char*>(px), 4);
    }
    GrayMap g = load_gray(path);
    CHECK(g.data[0] == doctest::Approx(0.0));
    CHECK(g.data[1] == doctest::Approx(1.0));
}

TEST_CASE("truncated file raises FormatError") {
    auto good = (temp_dir() / "ok.png").string();
    GrayMap map(4, 4, 0.5);
    save_gray_png(map, good);

    auto bad = (temp_dir() / "trunc.png").string();
    {
        std::ifstream in(good, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        std::ofstream out(bad, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(load_gray(bad), FormatError);
    CHECK_THROWS_AS(load_image(bad), FormatError);
}

TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(load_image((temp_dir() / "nope.png").string()), IoError);
}

TEST_CASE("gray png quantization uses round half up") {
    auto path = (temp_dir() / "q.png").string();
    GrayMap map(3, 1);
    map.data = {0.0, 0.5, 1.0};
    save_gray_png(map, path);
    GrayMap back = load_gray(path);
    CHECK(back.data[0] == doctest::Approx(0.0));
    CHECK(back.data[1] == doctest::Approx(128.0 / 255));
    CHECK(back.data[2] == doctest::Approx(1.0));
}

TEST_CASE("rescale_to_unit maps constants to zero") {
    GrayMap m(2, 1);
    m.data = {0.7, 0.7};
    rescale_to_unit(m);
    CHECK(m.data[0] == 0.0);
    CHECK(m.data[1] == 0.0);
}
