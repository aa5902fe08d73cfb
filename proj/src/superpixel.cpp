#include "tse/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tse {

namespace {

// Relative margin under which two densities count as tied.
constexpr double kDensityTie = 1e-9;

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

bool tied(double a, double b) { return std::abs(a - b) <= kDensityTie * std::max(a, b); }

}  // namespace

bool RegionGraph::is_border(int r) const { return std::binary_search(border.begin(), border.end(), r); }

double inhomogeneity(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("inhomogeneity of an empty region");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::min(1.0, std::sqrt(ss / n) / 0.5);
}

int split_components(int width, int height, std::vector<int>& labels) {
    const std::size_t total = labels.size();
    std::vector<int> out(total, -1);
    std::vector<int> stack;
    int next = 0;
    for (std::size_t seed = 0; seed < total; ++seed) {
        if (out[seed] >= 0) continue;
        const int id = next++;
        const int src = labels[seed];
        out[seed] = id;
        stack.assign(1, static_cast<int>(seed));
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            const int x = p % width;
            const int y = p / width;
            const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
            for (const auto& q : nbr) {
                if (q[0] < 0 || q[0] >= width || q[1] < 0 || q[1] >= height) continue;
                const int qi = q[1] * width + q[0];
                if (out[qi] < 0 && labels[qi] == src) {
                    out[qi] = id;
                    stack.push_back(qi);
                }
            }
        }
    }
    labels = std::move(out);
    return next;
}

RegionGraph build_region_graph(const GrayImage& img, std::vector<int> labels, int n) {
    const int w = img.width;
    const int h = img.height;
    RegionGraph g;
    g.width = w;
    g.height = h;
    g.n = n;
    g.labels = std::move(labels);
    g.pixel_count.assign(n, 0);
    g.gray.assign(n, 0.0);
    g.inhom.assign(n, 0.0);
    g.center.assign(n, Point2{0.0, 0.0});
    g.adjacency.assign(n, {});

    std::vector<std::vector<double>> members(n);
    std::vector<double> sx(n, 0.0), sy(n, 0.0);
    std::vector<char> on_border(n, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int r = g.labels[static_cast<std::size_t>(y) * w + x];
            members[r].push_back(img.at(x, y));
            sx[r] += x;
            sy[r] += y;
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) on_border[r] = 1;
            if (x + 1 < w) {
                const int q = g.labels[static_cast<std::size_t>(y) * w + x + 1];
                if (q != r) {
                    g.adjacency[r].push_back(q);
                    g.adjacency[q].push_back(r);
                }
            }
            if (y + 1 < h) {
                const int q = g.labels[static_cast<std::size_t>(y + 1) * w + x];
                if (q != r) {
                    g.adjacency[r].push_back(q);
                    g.adjacency[q].push_back(r);
                }
            }
        }
    }
    const double nx = w > 1 ? w - 1.0 : 1.0;
    const double ny = h > 1 ? h - 1.0 : 1.0;
    for (int r = 0; r < n; ++r) {
        const auto& m = members[r];
        if (m.empty()) throw std::invalid_argument("region label " + std::to_string(r) + " is unused");
        const double cnt = static_cast<double>(m.size());
        g.pixel_count[r] = static_cast<int>(m.size());
        g.gray[r] = std::accumulate(m.begin(), m.end(), 0.0) / cnt;
        g.inhom[r] = inhomogeneity(m);
        g.center[r] = {w > 1 ? sx[r] / cnt / nx : 0.0, h > 1 ? sy[r] / cnt / ny : 0.0};
        auto& adj = g.adjacency[r];
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        if (on_border[r]) g.border.push_back(r);
    }
    return g;
}

RegionGraph oversegment(const GrayImage& img, const QuickShiftParams& params) {
    if (img.empty()) throw std::invalid_argument("oversegment: empty image");
    if (!(params.sigma > 0.0) || !(params.tau > 0.0) || !(params.ratio >= 0.0))
        throw std::invalid_argument("oversegment: require sigma > 0, tau > 0, ratio >= 0");

    const int w = img.width;
    const int h = img.height;
    const int total = w * h;
    const double inv2s2 = 1.0 / (2.0 * params.sigma * params.sigma);
    const int kr = static_cast<int>(std::ceil(3.0 * params.sigma));
    const int lr = static_cast<int>(std::ceil(params.tau));
    const double tau2 = params.tau * params.tau;

    auto feature_dist2 = [&](int x0, int y0, int x1, int y1) {
        const double dx = x1 - x0;
        const double dy = y1 - y0;
        const double di = params.ratio * (img.at(x1, y1) - img.at(x0, y0));
        return dx * dx + dy * dy + di * di;
    };

    // Parzen density over the truncated Gaussian window.
    std::vector<double> density(total, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double e = 0.0;
            for (int yy = std::max(0, y - kr); yy <= std::min(h - 1, y + kr); ++yy)
                for (int xx = std::max(0, x - kr); xx <= std::min(w - 1, x + kr); ++xx)
                    e += std::exp(-feature_dist2(x, y, xx, yy) * inv2s2);
            density[y * w + x] = e;
        }
    }

    // Link each pixel to its nearest neighbour of strictly higher density within tau.
    std::vector<int> parent(total);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int p = y * w + x;
            const double dp = density[p];
            double best = tau2;
            int link = p;
            for (int yy = std::max(0, y - lr); yy <= std::min(h - 1, y + lr); ++yy) {
                for (int xx = std::max(0, x - lr); xx <= std::min(w - 1, x + lr); ++xx) {
                    const int q = yy * w + xx;
                    if (!(density[q] > dp) || tied(density[q], dp)) continue;
                    const double d2 = feature_dist2(x, y, xx, yy);
                    if (d2 <= best && (link == p || d2 < best)) {
                        best = d2;
                        link = q;
                    }
                }
            }
            parent[p] = link;
        }
    }

    // Resolve roots; density strictly increases along links so this terminates.
    std::vector<int> root(total, -1);
    for (int p = 0; p < total; ++p) {
        int r = p;
        while (parent[r] != r) r = parent[r];
        root[p] = r;
    }

    // Tree statistics for the tie-lock merge.
    std::vector<double> tree_sum(total, 0.0);
    std::vector<int> tree_cnt(total, 0);
    for (int p = 0; p < total; ++p) {
        tree_sum[root[p]] += img.data[p];
        ++tree_cnt[root[p]];
    }
    auto tree_mean = [&](int r) { return tree_sum[r] / tree_cnt[r]; };

    // Merge adjacent trees whose roots are tied in density, lie within tau of each
    // other and have identical mean gray (flat plateaus where quick shift cannot link).
    DisjointSet sets(total);
    auto consider = [&](int p, int q) {
        const int rp = root[p];
        const int rq = root[q];
        if (rp == rq || !tied(density[rp], density[rq])) return;
        if (std::abs(tree_mean(rp) - tree_mean(rq)) > 1e-9) return;
        if (feature_dist2(rp % w, rp / w, rq % w, rq / w) > tau2) return;
        sets.unite(rp, rq);
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) consider(y * w + x, y * w + x + 1);
            if (y + 1 < h) consider(y * w + x, (y + 1) * w + x);
        }
    }

    std::vector<int> labels(total);
    for (int p = 0; p < total; ++p) labels[p] = sets.find(root[p]);
    const int n = split_components(w, h, labels);
    return build_region_graph(img, std::move(labels), n);
}

GrayImage rasterize(const RegionGraph& graph, std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(graph.n))
        throw std::invalid_argument("rasterize: value count does not match region count");
    GrayImage out(graph.width, graph.height);
    for (std::size_t p = 0; p < out.data.size(); ++p) out.data[p] = values[graph.labels[p]];
    return out;
}

}  // namespace tse
