#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tse/metrics.hpp"

using namespace tse;

namespace {

BinaryMask random_mask(std::mt19937_64& gen, int w, int h, double density) {
    std::bernoulli_distribution on(density);
    BinaryMask m(w, h);
    for (auto& v : m.data) v = on(gen) ? 1 : 0;
    return m;
}

GrayImage as_image(const BinaryMask& m) {
    GrayImage g(m.width, m.height);
    for (std::size_t p = 0; p < m.size(); ++p) g.data[p] = m.data[p];
    return g;
}

}  // namespace

TEST_CASE("precision and recall examples") {
    BinaryMask gt(4, 2);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) gt.set(x, y, true);
    CHECK(precision_recall(gt, gt) == std::pair{1.0, 1.0});
    CHECK(precision_recall(BinaryMask(4, 2, true), gt) == std::pair{0.5, 1.0});
    CHECK(precision_recall(BinaryMask(4, 2), gt) == std::pair{1.0, 0.0});
    CHECK_THROWS_AS(precision_recall(gt, BinaryMask(4, 2)), std::invalid_argument);
    CHECK_THROWS_AS(precision_recall(BinaryMask(2, 4), gt), std::invalid_argument);
}

TEST_CASE("precision and recall match per-pixel counting") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 1 + static_cast<int>(gen() % 30), h = 1 + static_cast<int>(gen() % 30);
        const BinaryMask sm = random_mask(gen, w, h, unit(gen));
        BinaryMask gt = random_mask(gen, w, h, unit(gen));
        gt.data[gen() % gt.size()] = 1;
        int tp = 0, fp = 0, fn = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                tp += sm.at(x, y) && gt.at(x, y);
                fp += sm.at(x, y) && !gt.at(x, y);
                fn += !sm.at(x, y) && gt.at(x, y);
            }
        const auto [p, r] = precision_recall(sm, gt);
        CHECK(p == (tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp)));
        CHECK(r == static_cast<double>(tp) / (tp + fn));
    }
}

TEST_CASE("adaptive threshold and binarization") {
    CHECK(adaptive_threshold(GrayImage(4, 4, 0.25)) == 128);
    CHECK(adaptive_threshold(GrayImage(4, 4, 0.6)) == 255);
    CHECK(adaptive_threshold(GrayImage(4, 4, 0.0)) == 0);
    CHECK(binarize(GrayImage(4, 4, 0.0), 0).count() == 0);

    GrayImage g(3, 1);
    g.data = {0.5, 0.503, 1.0};  // bytes 128, 128, 255
    CHECK(binarize(g, 127).count() == 3);
    CHECK(binarize(g, 128).count() == 1);
    CHECK(binarize(g, 255).count() == 0);
}

TEST_CASE("F-measure values and bounds") {
    CHECK(f_measure(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f_measure(0.5, 1.0) == doctest::Approx(0.65 / 1.15).epsilon(1e-15));
    CHECK(std::abs(f_measure(0.5, 1.0) - 0.565217) < 1e-6);
    CHECK(std::abs(f_measure(0.8, 0.5) - 0.702702) < 1e-6);
    CHECK(f_measure(0.0, 0.0) == 0.0);

    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> unit(1e-3, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double p = unit(gen), r = unit(gen);
        const double f = f_measure(p, r);
        CHECK(f >= std::min(p, r) - 1e-15);
        CHECK(f <= std::max(p, r) + 1e-15);
    }
}

TEST_CASE("MAE examples, complement symmetry and range") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const BinaryMask gt = random_mask(gen, 9, 7, 0.4);
    CHECK(mae(as_image(gt), gt) == 0.0);
    CHECK(mae(GrayImage(9, 7, 0.5), gt) == 0.5);
    GrayImage inv = as_image(gt);
    for (double& v : inv.data) v = 1.0 - v;
    CHECK(mae(inv, gt) == 1.0);
    CHECK_THROWS_AS(mae(GrayImage(3, 3), gt), std::invalid_argument);

    for (int trial = 0; trial < 100; ++trial) {
        const BinaryMask m = random_mask(gen, 12, 10, unit(gen));
        GrayImage s(12, 10);
        for (double& v : s.data) v = unit(gen);
        BinaryMask mc = m;
        GrayImage sc = s;
        for (auto& v : mc.data) v = 1 - v;
        for (double& v : sc.data) v = 1.0 - v;
        double brute = 0.0;
        for (std::size_t p = 0; p < s.size(); ++p) brute += std::abs(s.data[p] - m.data[p]);
        const double got = mae(s, m);
        CHECK(std::abs(got - brute / 120.0) <= 1e-12);
        CHECK(std::abs(mae(sc, mc) - got) <= 1e-12);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("P-R curve matches per-level binarization") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<SaliencyPair> data;
    for (int k = 0; k < 4; ++k) {
        SaliencyPair pair{GrayImage(15, 11), random_mask(gen, 15, 11, 0.3)};
        pair.truth.data[0] = 1;
        for (double& v : pair.saliency.data) v = unit(gen);
        data.push_back(pair);
    }
    const auto curve = pr_curve(data);
    REQUIRE(curve.size() == 256);
    for (int level = 0; level < 256; ++level) {
        double p = 0.0, r = 0.0;
        for (const auto& pair : data) {
            const auto [pi, ri] = precision_recall(binarize(pair.saliency, level), pair.truth);
            p += pi;
            r += ri;
        }
        CHECK(curve[level].threshold == level);
        CHECK(curve[level].precision == doctest::Approx(p / 4).epsilon(1e-13));
        CHECK(curve[level].recall == doctest::Approx(r / 4).epsilon(1e-13));
        if (level > 0) CHECK(curve[level].recall <= curve[level - 1].recall);
    }
    CHECK(curve[255].precision == 1.0);
    CHECK(curve[255].recall == 0.0);
    CHECK_THROWS_AS(pr_curve({}), std::invalid_argument);
}

TEST_CASE("P-R curve of a perfect map") {
    const BinaryMask gt = [] {
        BinaryMask m(6, 6);
        m.set(2, 2, true);
        m.set(3, 2, true);
        return m;
    }();
    const auto curve = pr_curve({{as_image(gt), gt}});
    for (int level = 0; level < 255; ++level) {
        CHECK(curve[level].precision == 1.0);
        CHECK(curve[level].recall == 1.0);
    }
}

TEST_CASE("evaluate composes the per-image metrics") {
    const BinaryMask gt = [] {
        BinaryMask m(4, 4);
        m.set(1, 1, true);
        return m;
    }();
    const EvalReport perfect = evaluate({{as_image(gt), gt}});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f_measure == doctest::Approx(1.0));
    CHECK(perfect.mae == 0.0);
    CHECK(perfect.images == 1);

    const EvalReport zero = evaluate({{GrayImage(4, 4), gt}});
    CHECK(zero.precision == 1.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f_measure == 0.0);
    CHECK(zero.mae == doctest::Approx(1.0 / 16));

    const EvalReport back = nlohmann::json(perfect).get<EvalReport>();
    CHECK(nlohmann::json(back) == nlohmann::json(perfect));

    std::ostringstream csv;
    write_pr_csv(perfect.pr_curve, csv);
    std::istringstream lines(csv.str());
    std::string line;
    int count = 0;
    std::getline(lines, line);
    CHECK(line == "threshold,precision,recall");
    while (std::getline(lines, line)) ++count;
    CHECK(count == 256);
}

TEST_CASE("grid search tie-break and stub peak") {
    int calls = 0;
    const TuneResult flat = grid_search([&](const Weights&) {
        ++calls;
        return TuneScore{0.5, 0.1};
    });
    CHECK(flat.best == Weights{0.0, 0.0, 0.0});
    CHECK(calls == 6 * 6 * 6 + 5 * 5 * 5 + 6 * 6 * 6);

    const Weights peak{10.0, 2.0, 80.0};
    const TuneResult res = grid_search([&](const Weights& w) {
        double d = 0.0;
        for (int k = 0; k < 3; ++k) d += std::abs(w[k] - peak[k]);
        return TuneScore{1.0 / (1.0 + d), d / 1000.0};
    });
    for (int k = 0; k < 3; ++k) CHECK(std::abs(res.best[k] - peak[k]) <= 2.0);
    REQUIRE(res.stages.size() == 3);
    for (std::size_t s = 1; s < res.stages.size(); ++s)
        for (int k = 0; k < 3; ++k) {
            CHECK(res.stages[s].lo[k] <= res.stages[s - 1].incumbent[k]);
            CHECK(res.stages[s].hi[k] >= res.stages[s - 1].incumbent[k]);
        }
    CHECK(res.stages[0].lo == Weights{0, 0, 0});
    CHECK(res.stages[0].hi == Weights{200, 200, 200});

    // MAE breaks F ties.
    const TuneResult by_mae = grid_search([](const Weights& w) { return TuneScore{0.5, std::abs(w[1] - 120.0)}; },
                                          {40.0});
    CHECK(by_mae.best == Weights{0.0, 120.0, 0.0});

    CHECK_THROWS_AS(grid_search([](const Weights&) { return TuneScore{}; }, {}), std::invalid_argument);
    CHECK_THROWS_AS(grid_search([](const Weights&) { return TuneScore{}; }, {0.0}), std::invalid_argument);
}
