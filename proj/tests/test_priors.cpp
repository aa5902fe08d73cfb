#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tse/phantom.hpp"
#include "tse/priors.hpp"

using namespace tse;

namespace {

// Direct 2-D convolution with replicated borders and a full sort of the scores.
Point2 brute_reference_point(const GrayImage& img) {
    const int w = img.width, h = img.height;
    const int r = 6;
    std::vector<double> score;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double num = 0.0, den = 0.0;
            for (int j = -r; j <= r; ++j)
                for (int i = -r; i <= r; ++i) {
                    const double k = std::exp(-(i * i + j * j) / 8.0);
                    num += k * img.at(std::clamp(x + i, 0, w - 1), std::clamp(y + j, 0, h - 1));
                    den += k;
                }
            const double dx = (x - 0.5 * (w - 1)) / (w / 3.0);
            const double dy = (y - 0.4 * (h - 1)) / (h / 3.0);
            score.push_back((1.0 - num / den) * std::exp(-0.5 * (dx * dx + dy * dy)));
        }
    std::vector<int> idx(score.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return score[a] > score[b]; });
    const std::size_t k = static_cast<std::size_t>(std::ceil(score.size() / 20.0 - 1e-9));
    double mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        mx += idx[j] % w;
        my += idx[j] / w;
    }
    return {mx / k / (w - 1), my / k / (h - 1)};
}

bool inside(const TumorSpec& t, Point2 p) {
    const double u = (p[0] - t.center_x) / t.a, v = (p[1] - t.center_y) / t.b;
    return u * u + v * v <= 1.0;
}

}  // namespace

TEST_CASE("reference point on a constant image follows the anatomical prior") {
    for (int side : {41, 64, 101}) {
        const Point2 rp = reference_point(GrayImage(side, side, 0.6));
        CHECK(std::abs(rp[0] - 0.5) <= 0.02);
        CHECK(std::abs(rp[1] - 0.4) <= 0.02);
    }
}

TEST_CASE("reference point single-pixel top set lands exactly on the prior center") {
    // 3x6 image: 18 pixels, so the top 5% is one pixel; the prior peaks at (1, 2).
    GrayImage img(3, 6, 0.6);
    img.at(1, 2) = 0.0;
    const Point2 rp = reference_point(img);
    CHECK(rp[0] == 0.5);
    CHECK(rp[1] == 0.4);
}

TEST_CASE("reference point matches a brute-force score oracle") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        PhantomSpec spec;
        spec.width = 30 + 7 * trial;
        spec.height = 25 + 5 * trial;
        spec.speckle_strength = 0.2;
        spec.rng_seed = gen();
        spec.tumors.push_back({0.3 + 0.4 * unit(gen), 0.3 + 0.4 * unit(gen), 0.1, 0.12, 0.7, 1.0});
        const GrayImage img = generate_phantom(spec).first;
        const Point2 got = reference_point(img);
        const Point2 want = brute_reference_point(img);
        CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-12));
        CHECK(got[1] == doctest::Approx(want[1]).epsilon(1e-12));
    }
}

TEST_CASE("reference point falls inside a single noiseless lesion") {
    PhantomSpec spec;
    spec.tumors.push_back({0.5, 0.5, 0.15, 0.12, 0.8, 0.0});
    const Point2 rp = reference_point(generate_phantom(spec).first);
    CHECK(inside(spec.tumors[0], rp));
}

TEST_CASE("weighted value examples") {
    const Point2 rp{0.3, 0.6};
    CHECK(weighted_value(1.0, rp, rp) == 1.0);
    CHECK(weighted_value(0.0, {0.9, 0.1}, rp) == 0.0);
    CHECK(weighted_value(1.0, {0.8, 0.1}, rp) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("weighted map: bright pixels vanish, dark lesions dominate, range holds") {
    GrayImage img(20, 20, 0.6);
    img.at(3, 3) = 1.0;
    const GrayImage wm = weighted_map(img, {0.5, 0.4});
    CHECK(wm.at(3, 3) == 0.0);
    CHECK(*std::max_element(wm.data.begin(), wm.data.end()) == 0.0);

    PhantomSpec spec;
    spec.speckle_strength = 0.1;
    spec.rng_seed = 9;
    spec.tumors.push_back({0.5, 0.45, 0.15, 0.15, 0.8, 0.0});
    const GrayImage lesion = generate_phantom(spec).first;
    const Point2 rp = reference_point(lesion);
    const GrayImage w2 = weighted_map(lesion, rp);
    for (double v : w2.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const int cx = 64, cy = static_cast<int>(0.45 * 127);
    CHECK(w2.at(cx, cy) > 0.5);
    CHECK(w2.at(5, 5) < 0.05);
}

TEST_CASE("FG and center values") {
    CHECK(fg_value(0.0) == 1.0);
    CHECK(fg_value(0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(fg_value(1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    const Point2 rp{0.5, 0.5};
    CHECK(center_value(rp, rp) == 1.0);
    CHECK(center_value({1.0, 1.0}, rp) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(center_value({1.0, 1.0}, {0.0, 0.0}) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
}

TEST_CASE("fg_map and center_map are per-region and permutation-equivariant") {
    GrayImage img(4, 2);
    std::iota(img.data.begin(), img.data.end(), 0.0);
    for (double& v : img.data) v /= 8.0;
    const std::vector<int> labels{0, 0, 1, 1, 2, 2, 3, 3};
    const std::vector<int> perm{2, 0, 3, 1};
    std::vector<int> permuted(labels.size());
    for (std::size_t p = 0; p < labels.size(); ++p) permuted[p] = perm[labels[p]];

    const RegionGraph a = build_region_graph(img, labels, 4);
    const RegionGraph b = build_region_graph(img, permuted, 4);
    const Point2 rp{0.2, 0.7};
    const auto fa = fg_map(a, img), fb = fg_map(b, img);
    const auto ca = center_map(a, rp), cb = center_map(b, rp);
    for (int r = 0; r < 4; ++r) {
        CHECK(fb[perm[r]] == fa[r]);
        CHECK(cb[perm[r]] == ca[r]);
        CHECK(fa[r] == doctest::Approx(std::exp(-(img.data[2 * r] + img.data[2 * r + 1]) / 2.0 / 0.5)));
        CHECK(fa[r] > 0.0);
        CHECK(fa[r] <= 1.0);
        CHECK(ca[r] >= 1.0);
        CHECK(ca[r] <= std::exp(2.0));
    }
    CHECK_THROWS_AS(fg_map(a, GrayImage(3, 3)), std::invalid_argument);
}

TEST_CASE("existence features") {
    const ExistenceFeatures c = existence_features(GrayImage(5, 4, 0.3));
    CHECK(c.max == 0.3);
    CHECK(c.mean == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(c.std == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c.mean <= c.max);

    GrayImage two(2, 1);
    two.data = {0.0, 1.0};
    const ExistenceFeatures t = existence_features(two);
    CHECK(t.max == 1.0);
    CHECK(t.mean == 0.5);
    CHECK(t.std == 0.5);
    CHECK_THROWS_AS(existence_features(GrayImage{}), std::invalid_argument);
}

TEST_CASE("has_tumor decisions") {
    CHECK(has_tumor({0.9086, 0.1, 0.1}, 0.057));
    CHECK_FALSE(has_tumor({0.0035, 0.001, 0.001}, 0.02));
    CHECK(has_tumor({0.05, 0.01, 0.01}, 0.05));
    CHECK(has_tumor({0.05, 0.01, 0.01}));
    CHECK_THROWS_AS(has_tumor({0.5, 0.1, 0.1}, 0.0), std::invalid_argument);

    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const ExistenceFeatures f{unit(gen), 0.0, 0.0};
        bool previous = true;
        for (int k = 1; k <= 100; ++k) {
            const bool now = has_tumor(f, k / 100.0);
            CHECK((previous || !now));
            previous = now;
        }
    }
}
