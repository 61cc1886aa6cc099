#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hiersal/errors.hpp"
#include "hiersal/eval.hpp"
#include "hiersal/image_io.hpp"
#include "oracles.hpp"

using namespace hiersal;
namespace fs = std::filesystem;

namespace {

GrayMap checker_gt(int w, int h) {
    GrayMap gt(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) gt.at(x, y) = (x + y) % 2 ? 1.0 : 0.0;
    return gt;
}

} // namespace

TEST_CASE("perfect map sweeps perfectly") {
    GrayMap gt = checker_gt(8, 8);
    PrCurve curve = pr_sweep(gt, gt);
    for (int t = 1; t <= 255; ++t) {
        CHECK(curve.precision[t] == doctest::Approx(1.0));
        CHECK(curve.recall[t] == doctest::Approx(1.0));
    }
    CHECK(curve.recall[0] == doctest::Approx(1.0));
    CHECK(curve.precision[0] == doctest::Approx(0.5));
}

TEST_CASE("empty ground truth is rejected") {
    GrayMap gt(4, 4, 0.0);
    GrayMap map(4, 4, 0.5);
    CHECK_THROWS_AS(pr_sweep(map, gt), EmptyGroundTruth);
    GrayMap small(3, 4, 0.0);
    CHECK_THROWS_AS(pr_sweep(map, small), DimensionError);
}

TEST_CASE("sweep counts match the pixel loop") {
    oracle::TestRng rng(61);
    GrayMap map(8, 8), gt(8, 8);
    for (double& v : map.data) v = rng.uniform01();
    for (double& v : gt.data) v = rng.uniform_int(0, 1);
    PrCurve curve = pr_sweep(map, gt);

    for (int t = 0; t <= 255; ++t) {
        long long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < map.data.size(); ++i) {
            bool sel = map.data[i] >= t / 255.0;
            bool pos = gt.data[i] >= 0.5;
            tp += sel && pos;
            fp += sel && !pos;
            fn += !sel && pos;
        }
        double precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
        double recall = static_cast<double>(tp) / (tp + fn);
        CHECK(curve.precision[t] == doctest::Approx(precision).epsilon(1e-12));
        CHECK(curve.recall[t] == doctest::Approx(recall).epsilon(1e-12));
    }
}

TEST_CASE("per-image recall never increases with the threshold") {
    oracle::TestRng rng(62);
    GrayMap map(10, 10), gt(10, 10);
    for (double& v : map.data) v = rng.uniform01();
    for (double& v : gt.data) v = rng.uniform_int(0, 1);
    PrCurve curve = pr_sweep(map, gt);
    for (int t = 1; t <= 255; ++t) CHECK(curve.recall[t] <= curve.recall[t - 1] + 1e-15);
}

TEST_CASE("otsu separates two modes") {
    GrayMap map(8, 8);
    for (std::size_t i = 0; i < map.data.size(); ++i) map.data[i] = i % 2 ? 0.9 : 0.1;
    OtsuResult got = otsu_threshold(map);
    CHECK_FALSE(got.degenerate);
    bool deg = false;
    CHECK(got.threshold == oracle::otsu_oracle(map, deg));
    CHECK(got.threshold > quantize8(0.1));
    CHECK(got.threshold <= quantize8(0.9));

    // random maps agree with the independent scan
    oracle::TestRng rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        GrayMap m(9, 7);
        for (double& v : m.data) v = rng.uniform01();
        OtsuResult a = otsu_threshold(m);
        bool bdeg = false;
        int b = oracle::otsu_oracle(m, bdeeg_fix(bdeg));
        CHECK(a.threshold == b);
        CHECK(a.degenerate == bdeg);
    }
}

TEST_CASE("otsu degenerate and tie rules") {
    GrayMap flat(5, 5, 0.4);
    OtsuResult r = otsu_threshold(flat);
    CHECK(r.degenerate);
    CHECK(r.threshold == 0);

    GrayMap binary(4, 4);
    for (std::size_t i = 0; i < binary.data.size(); ++i) binary.data[i] = i < 8 ? 0.0 : 1.0;
    OtsuResult b = otsu_threshold(binary);
    CHECK_FALSE(b.degenerate);
    CHECK(b.threshold == 1); // lowest of the tied splits
}

TEST_CASE("scores on exact and complemented maps") {
    GrayMap gt = checker_gt(6, 6);
    ScalarScores perfect = scores(gt, gt);
    CHECK(perfect.f1 == doctest::Approx(1.0));
    CHECK(perfect.mae == doctest::Approx(0.0));
    CHECK(perfect.precision == doctest::Approx(1.0));
    CHECK(perfect.recall == doctest::Approx(1.0));

    GrayMap inverted = gt;
    for (double& v : inverted.data) v = 1.0 - v;
    ScalarScores flipped = scores(inverted, gt);
    CHECK(flipped.mae == doctest::Approx(1.0));
}

TEST_CASE("hand built confusion counts") {
    // 4x4, gt has 6 positives; prediction hits 4 of them plus 2 negatives
    GrayMap gt(4, 4, 0.0), map(4, 4, 0.1);
    int gt_pos[6][2] = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}};
    for (auto& xy : gt_pos) gt.at(xy[0], xy[1]) = 1.0;
    int pred[6][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {3, 2}, {0, 3}}; // TP 4, FP 2
    for (auto& xy : pred) map.at(xy[0], xy[1]) = 0.9;

    ScalarScores s = scores(map, gt);
    CHECK(s.precision == doctest::Approx(4.0 / 6.0));
    CHECK(s.recall == doctest::Approx(4.0 / 6.0));
    CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("mae properties") {
    oracle::TestRng rng(64);
    GrayMap a(5, 5), b(5, 5);
    for (double& v : a.data) v = rng.uniform01();
    for (double& v : b.data) v = rng.uniform_int(0, 1);
    auto mae = [](const GrayMap& x, const GrayMap& y) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.data.size(); ++i) acc += std::abs(x.data[i] - y.data[i]);
        return acc / x.data.size();
    };
    CHECK(mae(a, a) == 0.0);
    CHECK(mae(a, b) == doctest::Approx(mae(b, a)));
    // scores() reports exactly this quantity against the binarized gt
    ScalarScores s = scores(a, b);
    CHECK(s.mae == doctest::Approx(mae(a, b)));
}

TEST_CASE("f1 is the harmonic mean when both are positive") {
    oracle::TestRng rng(65);
    for (int trial = 0; trial < 10; ++trial) {
        GrayMap map(6, 6), gt(6, 6);
        for (double& v : map.data) v = rng.uniform01();
        for (double& v : gt.data) v = rng.uniform_int(0, 1);
        ScalarScores s = scores(map, gt);
        if (s.precision > 0.0 && s.recall > 0.0)
            CHECK(s.f1 ==
                  doctest::Approx(2.0 * s.precision * s.recall / (s.precision + s.recall)));
    }
}

TEST_CASE("dataset report aggregates and stays order independent") {
    auto dir = fs::temp_directory_path() / "hiersal_test_eval";
    fs::remove_all(dir);
    fs::create_directories(dir / "maps");
    fs::create_directories(dir / "gt");

    GrayMap gt1 = checker_gt(6, 6);
    GrayMap map1 = gt1; // F1 = 1
    GrayMap gt2(6, 6, 0.0);
    for (int x = 0; x < 6; ++x) gt2.at(x, 0) = 1.0;
    GrayMap map2(6, 6, 0.0); // hits half of gt2's positives, no false alarms
    for (int x = 0; x < 3; ++x) map2.at(x, 0) = 1.0;

    save_gray_png(map1, (dir / "maps" / "a.png").string());
    save_gray_png(map2, (dir / "maps" / "b.png").string());
    save_gray_png(gt1, (dir / "gt" / "a.png").string());
    save_gray_png(gt2, (dir / "gt" / "b.png").string());

    DatasetReport report = dataset_report((dir / "maps").string(), (dir / "gt").string());
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].first == "a");
    CHECK(report.rows[0].second.f1 == doctest::Approx(1.0));
    CHECK(report.rows[1].second.f1 == doctest::Approx(2.0 / 3.0)); // p=1, r=0.5
    CHECK(report.mean.f1 == doctest::Approx((1.0 + 2.0 / 3.0) / 2));

    // csv shape: header + fixed 6-decimal rows, LF endings
    write_scores_csv(report, (dir / "scores.csv").string());
    std::ifstream csv(dir / "scores.csv", std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(csv)), std::istreambuf_iterator<char>());
    CHECK(text.find("name,precision,recall,f1,mae\n") == 0);
    CHECK(text.find("a,1.000000,1.000000,1.000000,0.000000\n") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);

    write_curve_csv(report, (dir / "curve.csv").string());
    std::ifstream ccsv(dir / "curve.csv", std::ios::binary);
    std::string ctext((std::istreambuf_iterator<char>(ccsv)), std::istreambuf_iterator<char>());
    CHECK(ctext.find("threshold,precision,recall\n") == 0);

    // single-image dataset equals that image's scores
    fs::create_directories(dir / "solo");
    save_gray_png(map1, (dir / "solo" / "a.png").string());
    DatasetReport solo = dataset_report((dir / "solo").string(), (dir / "gt").string());
    CHECK(solo.mean.f1 == doctest::Approx(1.0));

    // missing pair reported as an error
    fs::create_directories(dir / "empty");
    CHECK_THROWS_AS(dataset_report((dir / "empty").string(), (dir / "gt").string()), MissingPair);
}
