#pragma once
// Structural validity checks for a RegionGraph, shared by unit and acceptance tests.

#include <algorithm>
#include <string>
#include <vector>

#include "tse/superpixel.hpp"

namespace tse::test {

/// Returns an empty string when the graph is a valid partition, otherwise the first violation.
inline std::string graph_violation(const RegionGraph& g) {
    const int w = g.width, h = g.height;
    if (g.labels.size() != static_cast<std::size_t>(w) * h) return "label raster size";
    std::vector<int> count(g.n, 0);
    for (int l : g.labels) {
        if (l < 0 || l >= g.n) return "label out of range";
        ++count[l];
    }
    for (int r = 0; r < g.n; ++r)
        if (count[r] == 0 || count[r] != g.pixel_count[r]) return "pixel count of region " + std::to_string(r);

    // Connectivity: flood each region from its first pixel.
    std::vector<char> seen(g.labels.size(), 0);
    std::vector<int> reached(g.n, 0), first(g.n, -1);
    for (int p = 0; p < w * h; ++p)
        if (first[g.labels[p]] < 0) first[g.labels[p]] = p;
    for (int r = 0; r < g.n; ++r) {
        std::vector<int> stack{first[r]};
        seen[first[r]] = 1;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            ++reached[r];
            const int x = p % w, y = p / w;
            const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
            for (const auto& q : nb) {
                if (q[0] < 0 || q[0] >= w || q[1] < 0 || q[1] >= h) continue;
                const int qi = q[1] * w + q[0];
                if (!seen[qi] && g.labels[qi] == r) {
                    seen[qi] = 1;
                    stack.push_back(qi);
                }
            }
        }
        if (reached[r] != count[r]) return "region " + std::to_string(r) + " is not 4-connected";
    }

    // Adjacency recomputed from the raster.
    std::vector<std::vector<int>> adj(g.n);
    std::vector<int> border;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int r = g.labels[y * w + x];
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) border.push_back(r);
            if (x + 1 < w && g.labels[y * w + x + 1] != r) {
                adj[r].push_back(g.labels[y * w + x + 1]);
                adj[g.labels[y * w + x + 1]].push_back(r);
            }
            if (y + 1 < h && g.labels[(y + 1) * w + x] != r) {
                adj[r].push_back(g.labels[(y + 1) * w + x]);
                adj[g.labels[(y + 1) * w + x]].push_back(r);
            }
        }
    for (int r = 0; r < g.n; ++r) {
        std::sort(adj[r].begin(), adj[r].end());
        adj[r].erase(std::unique(adj[r].begin(), adj[r].end()), adj[r].end());
        if (adj[r] != g.adjacency[r]) return "adjacency of region " + std::to_string(r);
        for (int q : g.adjacency[r]) {
            if (q == r) return "self adjacency";
            if (!std::binary_search(g.adjacency[q].begin(), g.adjacency[q].end(), r)) return "asymmetric adjacency";
        }
    }
    std::sort(border.begin(), border.end());
    border.erase(std::unique(border.begin(), border.end()), border.end());
    if (border != g.border) return "border set";
    return {};
}

}  // namespace tse::test
