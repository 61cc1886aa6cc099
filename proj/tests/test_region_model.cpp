#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hiersal/errors.hpp"
#include "hiersal/region_model.hpp"
#include "oracles.hpp"

using namespace hiersal;

namespace {

std::vector<Lab> repeated(const Lab& color, int count) { return std::vector<Lab>(count, color); }

std::vector<Signature> random_signatures(oracle::TestRng& rng, int count) {
    std::vector<Signature> sigs(count);
    double total = 0.0;
    for (Signature& s : sigs) {
        s.color = {rng.uniform01() * 100.0, rng.uniform01() * 200.0 - 100.0,
                   rng.uniform01() * 200.0 - 100.0};
        s.weight = 0.05 + rng.uniform01();
        total += s.weight;
    }
    for (Signature& s : sigs) s.weight /= total;
    return sigs;
}

} // namespace

TEST_CASE("uniform region gives one signature") {
    RegionModel m = build_model_from_pixels(repeated({50, 10, -20}, 17), ModelKind::Histogram);
    REQUIRE(m.hist.signatures.size() == 1);
    CHECK(m.hist.signatures[0].weight == doctest::Approx(1.0));
    CHECK(m.hist.signatures[0].color.L == doctest::Approx(50.0));
}

TEST_CASE("two balanced colors split the weight") {
    std::vector<Lab> pixels = repeated({20, 0, 0}, 8);
    auto more = repeated({80, 40, 40}, 8);
    pixels.insert(pixels.end(), more.begin(), more.end());
    RegionModel m = build_model_from_pixels(pixels, ModelKind::Histogram);
    REQUIRE(m.hist.signatures.size() == 2);
    CHECK(m.hist.signatures[0].weight == doctest::Approx(0.5));
    CHECK(m.hist.signatures[1].weight == doctest::Approx(0.5));
}

TEST_CASE("signature reduction keeps the most frequent bins") {
    // 300 distinct bins with strictly different counts
    std::vector<Lab> pixels;
    struct BinRef {
        std::uint32_t index;
        long long count;
    };
    std::vector<BinRef> refs;
    int added = 0;
    for (int bl = 0; bl < 16 && added < 300; ++bl)
        for (int ba = 0; ba < 20 && added < 300; ++ba) {
            // center of bin (bl, ba, 7)
            Lab color{(bl + 0.5) * 100.0 / 64, (ba + 0.5) * 4.0 - 128, (7 + 0.5) * 4.0 - 128};
            int count = 1 + ((added * 37) % 300); // varied counts
            for (int c = 0; c < count; ++c) pixels.push_back(color);
            refs.push_back({lab_bin_index(color), static_cast<long long>(count)});
            ++added;
        }
    REQUIRE(added == 300);

    RegionModel m = build_model_from_pixels(pixels, ModelKind::Histogram);
    REQUIRE(m.hist.signatures.size() == kMaxSignatures);

    // independent full sort oracle: count desc, bin index asc
    std::sort(refs.begin(), refs.end(), [](const BinRef& a, const BinRef& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.index < b.index;
    });
    std::set<std::uint32_t> expected;
    for (int i = 0; i < kMaxSignatures; ++i) expected.insert(refs[i].index);
    std::set<std::uint32_t> actual;
    for (const Signature& s : m.hist.signatures) actual.insert(lab_bin_index(s.color));
    CHECK(actual == expected);

    double weight_sum = 0.0;
    for (const Signature& s : m.hist.signatures) weight_sum += s.weight;
    CHECK(weight_sum == doctest::Approx(1.0));
}

TEST_CASE("emd basics") {
    std::vector<Signature> a = {{{10, 0, 0}, 1.0}};
    std::vector<Signature> b = {{{40, 0, 0}, 1.0}};
    CHECK(emd(a, a) == doctest::Approx(0.0));
    CHECK(emd(a, b) == doctest::Approx(30.0));

    std::vector<Signature> c = {{{0, 0, 0}, 0.5}, {{100, 0, 0}, 0.5}};
    std::vector<Signature> d = {{{0, 0, 0}, 0.5}, {{100, 0, 0}, 0.5}};
    CHECK(emd(c, d) == doctest::Approx(0.0));
}

TEST_CASE("emd against the lp oracle") {
    oracle::TestRng rng(321);
    for (int trial = 0; trial < 60; ++trial) {
        int m = rng.uniform_int(1, 3);
        int n = rng.uniform_int(1, 3);
        auto a = random_signatures(rng, m);
        auto b = random_signatures(rng, n);
        double fast = emd(a, b);
        double exact = oracle::emd_lp(a, b);
        CHECK(std::abs(fast - exact) < 1e-6);
    }
}

TEST_CASE("emd metric properties") {
    oracle::TestRng rng(654);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_signatures(rng, rng.uniform_int(1, 5));
        auto b = random_signatures(rng, rng.uniform_int(1, 5));
        auto c = random_signatures(rng, rng.uniform_int(1, 5));
        double ab = emd(a, b), ba = emd(b, a);
        CHECK(std::abs(ab - ba) < 1e-9);
        double ac = emd(a, c), bc = emd(b, c);
        CHECK(ac <= ab + bc + 1e-6);
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("region distance dispatch") {
    RegionModel x = build_model_from_pixels(repeated({0, 0, 0}, 4), ModelKind::MeanColor);
    RegionModel y = build_model_from_pixels(repeated({100, 0, 0}, 9), ModelKind::MeanColor);
    CHECK(region_distance(x, y) == doctest::Approx(100.0));
    CHECK(region_distance(x, x) == doctest::Approx(0.0));

    RegionModel h = build_model_from_pixels(repeated({0, 0, 0}, 4), ModelKind::Histogram);
    CHECK_THROWS_AS(region_distance(x, h), KindMismatch);
    CHECK_THROWS_AS(merge_models(x, h), KindMismatch);
}

TEST_CASE("mean merge is the weighted mean") {
    RegionModel a = build_model_from_pixels(repeated({0, 0, 0}, 1), ModelKind::MeanColor);
    RegionModel b = build_model_from_pixels(repeated({100, 0, 0}, 3), ModelKind::MeanColor);
    RegionModel m = merge_models(a, b);
    CHECK(m.mean.mean().L == doctest::Approx(75.0));
    CHECK(m.mean.area == 4);
}

TEST_CASE("merging a same-color twin keeps the model") {
    std::vector<Lab> pixels = repeated({42, 7, -3}, 6);
    RegionModel a = build_model_from_pixels(pixels, ModelKind::Histogram);
    RegionModel merged = merge_models(a, a);
    REQUIRE(merged.hist.signatures.size() == 1);
    CHECK(merged.hist.signatures[0].weight == doctest::Approx(1.0));
    CHECK(merged.hist.signatures[0].color.L == doctest::Approx(42.0));
}

TEST_CASE("signature merge equals rebuilding from the union") {
    oracle::TestRng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Lab> pa, pb;
        int na = rng.uniform_int(1, 40), nb = rng.uniform_int(1, 40);
        for (int i = 0; i < na; ++i)
            pa.push_back({rng.uniform01() * 100, rng.uniform01() * 240 - 120,
                          rng.uniform01() * 240 - 120});
        for (int i = 0; i < nb; ++i)
            pb.push_back({rng.uniform01() * 100, rng.uniform01() * 240 - 120,
                          rng.uniform01() * 240 - 120});
        RegionModel a = build_model_from_pixels(pa, ModelKind::Histogram);
        RegionModel b = build_model_from_pixels(pb, ModelKind::Histogram);
        RegionModel merged = merge_models(a, b);

        std::vector<Lab> united = pa;
        united.insert(united.end(), pb.begin(), pb.end());
        RegionModel rebuilt = build_model_from_pixels(united, ModelKind::Histogram);

        REQUIRE(merged.hist.signatures.size() == rebuilt.hist.signatures.size());
        for (std::size_t i = 0; i < merged.hist.signatures.size(); ++i) {
            CHECK(merged.hist.signatures[i].weight ==
                  doctest::Approx(rebuilt.hist.signatures[i].weight).epsilon(1e-12));
            CHECK(merged.hist.signatures[i].color.L ==
                  doctest::Approx(rebuilt.hist.signatures[i].color.L).epsilon(1e-12));
        }
    }
}

TEST_CASE("mean merge associativity") {
    RegionModel a = build_model_from_pixels(repeated({13.5, 4.25, -7.75}, 3), ModelKind::MeanColor);
    RegionModel b = build_model_from_pixels(repeated({88.25, -12.5, 31.0}, 5), ModelKind::MeanColor);
    RegionModel c = build_model_from_pixels(repeated({47.125, 0.5, 0.25}, 7), ModelKind::MeanColor);
    RegionModel left = merge_models(merge_models(a, b), c);
    RegionModel right = merge_models(a, merge_models(b, c));
    CHECK(left.mean.area == right.mean.area);
    CHECK(left.mean.sum.L == doctest::Approx(right.mean.sum.L).epsilon(1e-14));
    CHECK(left.mean.sum.a == doctest::Approx(right.mean.sum.a).epsilon(1e-14));
    CHECK(left.mean.sum.b == doctest::Approx(right.mean.sum.b).epsilon(1e-14));
}

TEST_CASE("distances ignore region scale") {
    oracle::TestRng rng(15);
    std::vector<Lab> pa, pb;
    for (int i = 0; i < 12; ++i)
        pa.push_back({rng.uniform01() * 100, rng.uniform01() * 100 - 50, 0});
    for (int i = 0; i < 9; ++i)
        pb.push_back({rng.uniform01() * 100, rng.uniform01() * 100 - 50, 0});

    for (ModelKind kind : {ModelKind::MeanColor, ModelKind::Histogram}) {
        RegionModel a1 = build_model_from_pixels(pa, kind);
        RegionModel b1 = build_model_from_pixels(pb, kind);
        std::vector<Lab> pa2 = pa, pb2 = pb;
        pa2.insert(pa2.end(), pa.begin(), pa.end());
        pb2.insert(pb2.end(), pb.begin(), pb.end());
        RegionModel a2 = build_model_from_pixels(pa2, kind);
        RegionModel b2 = build_model_from_pixels(pb2, kind);
        CHECK(region_distance(a1, b1) == doctest::Approx(region_distance(a2, b2)).epsilon(1e-9));
    }
}
