#include <doctest.h>

#include <algorithm>
#include <set>

#include "hiersal/errors.hpp"
#include "hiersal/hierarchy.hpp"
#include "hiersal/partition.hpp"
#include "oracles.hpp"

using namespace hiersal;

namespace {

LabImage lab_of(const RgbImage& img) { return rgb_to_lab(img); }

RgbImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbImage img;
    img.width = w;
    img.height = h;
    img.data.resize(3 * static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.data[3 * i] = r;
        img.data[3 * i + 1] = g;
        img.data[3 * i + 2] = b;
    }
    return img;
}

void check_partition_consistency(const Partition& p) {
    long long total = 0;
    for (const Region& r : p.regions) {
        total += r.area;
        long long contact_sum = 0;
        for (const auto& [j, len] : r.neighbor_contact) {
            contact_sum += len;
            // symmetry
            auto it = p.regions[j].neighbor_contact.find(r.id);
            REQUIRE(it != p.regions[j].neighbor_contact.end());
            CHECK(it->second == len);
        }
        CHECK(contact_sum + r.border_len == r.perimeter);
        CHECK(r.border_len <= r.perimeter);
        CHECK(r.area >= 1);
    }
    CHECK(total == static_cast<long long>(p.width) * p.height);
}

} // namespace

TEST_CASE("initial partition per pixel") {
    LabImage lab = lab_of(solid(2, 2, 10, 20, 30));
    Partition p = initial_partition(lab, InitialPartitionMode::PerPixel);
    CHECK(p.regions.size() == 4);
    check_partition_consistency(p);
}

TEST_CASE("initial partition flat zones on uniform image") {
    LabImage lab = lab_of(solid(2, 2, 9, 9, 9));
    Partition p = initial_partition(lab, InitialPartitionMode::FlatZones);
    CHECK(p.regions.size() == 1);
    CHECK(p.regions[0].area == 4);
}

TEST_CASE("flat zones split 4x4 halves") {
    RgbImage img = solid(4, 4, 200, 0, 0);
    for (int y = 0; y < 4; ++y)
        for (int x = 2; x < 4; ++x) {
            std::uint8_t* px = img.pixel(x, y);
            px[0] = 0;
            px[1] = 0;
            px[2] = 200;
        }
    Partition p = initial_partition(lab_of(img), InitialPartitionMode::FlatZones);
    REQUIRE(p.regions.size() == 2);
    CHECK(p.regions[0].area == 8);
    CHECK(p.regions[1].area == 8);
    check_partition_consistency(p);
}

TEST_CASE("bpt on a single region") {
    LabImage lab = lab_of(solid(3, 3, 1, 2, 3));
    Partition p = initial_partition(lab, InitialPartitionMode::FlatZones);
    Hierarchy h = build_bpt(p);
    CHECK(h.n_leaves == 1);
    CHECK(h.merges.empty());
    CHECK(h.n_nodes() == 1);
}

TEST_CASE("bpt merges the near-identical pair first") {
    // three vertical strips: A and B nearly the same color, C far away
    RgbImage img = solid(3, 3, 100, 0, 0);
    for (int y = 0; y < 3; ++y) {
        img.pixel(1, y)[0] = 101; // B
        std::uint8_t* c = img.pixel(2, y);
        c[0] = 0;
        c[1] = 255;
        c[2] = 0;
    }
    Partition p = initial_partition(lab_of(img), InitialPartitionMode::FlatZones);
    REQUIRE(p.regions.size() == 3);
    Hierarchy h = build_bpt(p);
    // strip labels follow raster order: 0 = A, 1 = B, 2 = C
    CHECK(h.merges[0].left == 0);
    CHECK(h.merges[0].right == 1);
}

TEST_CASE("bpt matches the rescanning oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        oracle::TestRng rng(900 + seed);
        RgbImage img = oracle::random_rgb_image(rng, 6, 6);
        LabImage lab = lab_of(img);
        Partition p0 = initial_partition(lab, InitialPartitionMode::PerPixel);
        Hierarchy h = build_bpt(p0);
        std::vector<Merge> expected = oracle::brute_force_bpt(p0, lab);
        REQUIRE(h.merges.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(h.merges[i].left == expected[i].left);
            CHECK(h.merges[i].right == expected[i].right);
            CHECK(h.merges[i].node == expected[i].node);
        }
    }
}

TEST_CASE("hierarchy shape invariants") {
    oracle::TestRng rng(42);
    RgbImage img = oracle::random_rgb_image(rng, 8, 8);
    LabImage lab = lab_of(img);
    Hierarchy h = build_bpt(initial_partition(lab, InitialPartitionMode::PerPixel));
    CHECK(h.n_nodes() == 2 * h.n_leaves - 1);
    std::vector<int> child_count(h.n_nodes(), 0);
    for (const HierarchyNode& nd : h.nodes) {
        if (nd.parent != -1) {
            CHECK(nd.parent > nd.id);
            child_count[nd.parent] += 1;
        } else {
            CHECK(nd.id == h.root());
        }
    }
    for (int id = h.n_leaves; id < h.n_nodes(); ++id) CHECK(child_count[id] == 2);
    CHECK(h.nodes[h.root()].area == 64);
}

TEST_CASE("partition_at endpoints and descriptors") {
    oracle::TestRng rng(77);
    RgbImage img = oracle::random_rgb_image(rng, 8, 8);
    LabImage lab = lab_of(img);
    Partition p0 = initial_partition(lab, InitialPartitionMode::PerPixel);
    Hierarchy h = build_bpt(p0);

    Partition same = partition_at(h, h.n_leaves);
    CHECK(same.regions.size() == p0.regions.size());
    CHECK(same.labels == p0.labels);

    Partition whole = partition_at(h, 1);
    CHECK(whole.regions.size() == 1);
    CHECK(whole.regions[0].area == 64);

    CHECK_THROWS_AS(partition_at(h, 0), RangeError);
    CHECK_THROWS_AS(partition_at(h, h.n_leaves + 1), RangeError);

    for (int n : {40, 17, 9, 3}) {
        Partition p = partition_at(h, n);
        REQUIRE(static_cast<int>(p.regions.size()) == n);
        check_partition_consistency(p);
        // descriptor exactness against raw pixel membership
        for (const Region& r : p.regions) {
            long long area = 0, sx = 0, sy = 0;
            Lab sum;
            for (int y = 0; y < p.height; ++y)
                for (int x = 0; x < p.width; ++x)
                    if (p.label(x, y) == r.id) {
                        area += 1;
                        sx += x;
                        sy += y;
                        sum += lab.lab(x, y);
                    }
            CHECK(r.area == area);
            CHECK(r.sum_x == sx);
            CHECK(r.sum_y == sy);
            CHECK(r.sum_lab.L == doctest::Approx(sum.L).epsilon(1e-12));
            CHECK(r.sum_lab.a == doctest::Approx(sum.a).epsilon(1e-12));
            CHECK(r.sum_lab.b == doctest::Approx(sum.b).epsilon(1e-12));
        }
    }
}

TEST_CASE("extracted stacks nest") {
    oracle::TestRng rng(5);
    RgbImage img = oracle::random_rgb_image(rng, 16, 16);
    LabImage lab = lab_of(img);
    Hierarchy h = build_bpt(initial_partition(lab, InitialPartitionMode::PerPixel));
    PartitionStackSource src;
    src.bpt = &h;
    std::vector<Partition> stack = extract_partition_stack(src, 6, 100, 3);
    REQUIRE(stack.size() == 6);
    for (std::size_t i = 0; i + 1 < stack.size(); ++i) {
        CHECK(stack[i].regions.size() > stack[i + 1].regions.size());
        CHECK(is_nested(stack[i], stack[i + 1]));
    }
    // counts hit the geometric schedule exactly for bpt sources
    std::vector<int> expect = {100, 50, 25, 12, 6, 3};
    for (std::size_t i = 0; i < stack.size(); ++i)
        CHECK(static_cast<int>(stack[i].regions.size()) == expect[i]);
}

TEST_CASE("geometric schedule") {
    CHECK(geometric_targets(6, 100, 3) == std::vector<int>{100, 50, 25, 12, 6, 3});
    CHECK(geometric_targets(2, 64, 8) == std::vector<int>{64, 8});
    CHECK(geometric_targets(5, 300, 3) == std::vector<int>{300, 95, 30, 9, 3});
    CHECK(geometric_targets(4, 5, 5) == std::vector<int>{5});
    CHECK_THROWS_AS(geometric_targets(1, 10, 2), RangeError);
    CHECK_THROWS_AS(geometric_targets(3, 2, 10), RangeError);
}

TEST_CASE("fig 1 regime targets extract") {
    oracle::TestRng rng(500);
    RgbImage img = oracle::random_rgb_image(rng, 24, 24);
    LabImage lab = lab_of(img);
    Hierarchy h = build_bpt(initial_partition(lab, InitialPartitionMode::PerPixel));
    PartitionStackSource src;
    src.bpt = &h;
    std::vector<Partition> stack = extract_partition_stack(src, {300, 100, 30, 10, 3});
    REQUIRE(stack.size() == 5);
    std::vector<int> counts;
    for (const Partition& p : stack) {
        counts.push_back(static_cast<int>(p.regions.size()));
        check_partition_consistency(p);
    }
    CHECK(counts == std::vector<int>{300, 100, 30, 10, 3});
    for (std::size_t i = 0; i + 1 < stack.size(); ++i) CHECK(is_nested(stack[i], stack[i + 1]));
}

namespace {

// concentric nested contour rings at three strengths
GrayMap nested_ucm(int size) {
    GrayMap ucm(size, size, 0.0);
    auto ring = [&](int margin, double strength) {
        for (int y = margin; y < size - margin; ++y)
            for (int x = margin; x < size - margin; ++x) {
                bool edge = x == margin || x == size - 1 - margin || y == margin ||
                            y == size - 1 - margin;
                if (edge) ucm.at(x, y) = strength;
            }
    };
    ring(2, 0.9);
    ring(5, 0.5);
    ring(8, 0.2);
    return ucm;
}

} // namespace

TEST_CASE("ucm thresholding") {
    GrayMap ucm = nested_ucm(24);

    Partition coarse = ucm_partition(ucm, 0.95, false);
    CHECK(coarse.regions.size() == 1);

    Partition finest = ucm_partition(ucm, 0.0, false);
    CHECK(finest.regions.size() > 1);

    double ts[] = {0.1, 0.3, 0.7, 0.95};
    for (std::size_t a = 0; a + 1 < 4; ++a) {
        Partition fine = ucm_partition(ucm, ts[a], false);
        Partition coarser = ucm_partition(ucm, ts[a + 1], false);
        CHECK(fine.regions.size() >= coarser.regions.size());
        CHECK(is_nested(fine, coarser));
        check_partition_consistency(fine);
    }
}

TEST_CASE("ucm contour grid layout") {
    // 4x3 image as a 9x7 contour grid with one vertical contour of strength 0.6
    const int w = 4, h = 3;
    GrayMap grid(2 * w + 1, 2 * h + 1, 0.0);
    for (int gy = 0; gy < grid.height; ++gy) grid.at(4, gy) = 0.6; // between x=1 and x=2

    Partition two = ucm_partition(grid, 0.5);
    REQUIRE(two.regions.size() == 2);
    CHECK(two.width == w);
    CHECK(two.height == h);
    CHECK(two.regions[0].area == 6);
    CHECK(two.regions[1].area == 6);

    Partition one = ucm_partition(grid, 0.7);
    CHECK(one.regions.size() == 1);
}

TEST_CASE("ucm stack picks closest counts from above") {
    GrayMap ucm = nested_ucm(24);
    PartitionStackSource src;
    src.ucm = &ucm;
    std::vector<Partition> stack = extract_partition_stack(src, {40, 4, 2, 1});
    REQUIRE(!stack.empty());
    for (std::size_t i = 0; i + 1 < stack.size(); ++i) {
        CHECK(stack[i].regions.size() > stack[i + 1].regions.size());
        CHECK(is_nested(stack[i], stack[i + 1]));
    }
    // the coarsest requested level always exists
    CHECK(stack.back().regions.size() >= 1);
}

TEST_CASE("cut_subhierarchy preserves structure") {
    oracle::TestRng rng(31);
    RgbImage img = oracle::random_rgb_image(rng, 10, 10);
    LabImage lab = lab_of(img);
    Hierarchy h = build_bpt(initial_partition(lab, InitialPartitionMode::PerPixel));
    Hierarchy cut = cut_subhierarchy(h, 12);
    CHECK(cut.n_leaves == 12);
    CHECK(cut.n_nodes() == 23);
    CHECK(cut.merges.size() == 11);
    CHECK(cut.nodes[cut.root()].area == 100);

    // leaf labels match partition_at(12) up to region indexing
    Partition p = partition_at(h, 12);
    for (std::size_t i = 0; i < p.labels.size(); ++i) CHECK(cut.leaf_labels[i] == p.labels[i]);

    // node descriptors aggregate children exactly
    for (const Merge& m : cut.merges) {
        const HierarchyNode& nd = cut.nodes[m.node];
        CHECK(nd.area == cut.nodes[m.left].area + cut.nodes[m.right].area);
        CHECK(nd.sum_x == cut.nodes[m.left].sum_x + cut.nodes[m.right].sum_x);
    }
}
