#include "tse/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tse/nc.hpp"
#include "tse/phantom.hpp"

namespace tse {

namespace {

// Fraction of highest-scoring pixels averaged into the reference point.
constexpr double kTopFraction = 0.05;

double distance(Point2 a, Point2 b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (img.empty()) throw std::invalid_argument("gaussian_blur: empty image");
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    for (int i = -r; i <= r; ++i) k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    const double norm = std::accumulate(k.begin(), k.end(), 0.0);
    for (double& v : k) v /= norm;

    const int w = img.width;
    const int h = img.height;
    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * img.at(std::clamp(x + i, 0, w - 1), y);
            tmp.at(x, y) = s;
        }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * tmp.at(x, std::clamp(y + i, 0, h - 1));
            out.at(x, y) = s;
        }
    return out;
}

Point2 reference_point(const GrayImage& img) {
    if (img.empty()) throw std::invalid_argument("reference_point: empty image");
    const int w = img.width;
    const int h = img.height;
    const GrayImage blurred = gaussian_blur(img, 2.0);

    const double cx = 0.5 * (w - 1);
    const double cy = 0.4 * (h - 1);
    const double sx = w / 3.0;
    const double sy = h / 3.0;
    std::vector<double> score(img.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double dx = (x - cx) / sx;
            const double dy = (y - cy) / sy;
            const double prior = std::exp(-0.5 * (dx * dx + dy * dy));
            score[static_cast<std::size_t>(y) * w + x] = (1.0 - blurred.at(x, y)) * prior;
        }

    const std::size_t total = score.size();
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kTopFraction * total - 1e-9)));
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Score descending, raster order on ties.
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) { return score[a] > score[b] || (score[a] == score[b] && a < b); });
    double mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        mx += static_cast<double>(order[j] % w);
        my += static_cast<double>(order[j] / w);
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    return {w > 1 ? mx / (w - 1) : 0.0, h > 1 ? my / (h - 1) : 0.0};
}

GrayImage relative_darkness(const GrayImage& img) {
    const GrayImage blurred = gaussian_blur(img, 2.0);
    std::vector<double> sorted = blurred.data;
    const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    const double level = *mid;
    GrayImage out(img.width, img.height);
    if (level <= 0.0) return out;
    std::transform(blurred.data.begin(), blurred.data.end(), out.data.begin(),
                   [level](double v) { return std::clamp((level - v) / level, 0.0, 1.0); });
    return out;
}

double weighted_value(double darkness, Point2 p, Point2 rp) { return darkness * std::exp(-distance(p, rp) / kDistanceScale); }

GrayImage weighted_map(const GrayImage& img, Point2 rp) {
    GrayImage wm = relative_darkness(img);
    for (int y = 0; y < wm.height; ++y)
        for (int x = 0; x < wm.width; ++x)
            wm.at(x, y) = weighted_value(wm.at(x, y), {normalized_coord(x, wm.width), normalized_coord(y, wm.height)}, rp);
    return wm;
}

double fg_value(double region_mean) { return std::exp(-region_mean / kSigmaSq); }

std::vector<double> fg_map(const RegionGraph& graph, const GrayImage& wm) {
    if (wm.width != graph.width || wm.height != graph.height)
        throw std::invalid_argument("fg_map: weighted map does not match the region labeling");
    std::vector<double> sum(graph.n, 0.0);
    for (std::size_t p = 0; p < wm.data.size(); ++p) sum[graph.labels[p]] += wm.data[p];
    std::vector<double> f(graph.n);
    for (int r = 0; r < graph.n; ++r) f[r] = fg_value(sum[r] / graph.pixel_count[r]);
    return f;
}

double center_value(Point2 center, Point2 rp) { return std::exp(distance(center, rp) / kDistanceScale); }

std::vector<double> center_map(const RegionGraph& graph, Point2 rp) {
    std::vector<double> c(graph.n);
    for (int r = 0; r < graph.n; ++r) c[r] = center_value(graph.center[r], rp);
    return c;
}

ExistenceFeatures existence_features(const GrayImage& wm) {
    if (wm.empty()) throw std::invalid_argument("existence_features: empty raster");
    const double n = static_cast<double>(wm.size());
    ExistenceFeatures f;
    f.max = *std::max_element(wm.data.begin(), wm.data.end());
    f.mean = std::min(f.max, std::accumulate(wm.data.begin(), wm.data.end(), 0.0) / n);
    double ss = 0.0;
    for (double v : wm.data) ss += (v - f.mean) * (v - f.mean);
    f.std = std::sqrt(ss / n);
    return f;
}

bool has_tumor(const ExistenceFeatures& feat, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("has_tumor: threshold must be positive");
    return feat.max >= threshold;
}

}  // namespace tse
