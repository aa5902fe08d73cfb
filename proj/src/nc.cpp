#include "tse/nc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace tse {

namespace {

struct Arc {
    int to;
    int edge;
};

std::vector<std::vector<Arc>> build_arcs(int n, std::span<const NcEdge> edges) {
    std::vector<std::vector<Arc>> adj(n);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const NcEdge& ed = edges[e];
        if (ed.a < 0 || ed.b < 0 || ed.a >= n || ed.b >= n || ed.a == ed.b)
            throw std::invalid_argument("propagate: edge endpoint out of range or self-loop");
        adj[ed.a].push_back({ed.b, e});
        adj[ed.b].push_back({ed.a, e});
    }
    return adj;
}

// Maximin (widest) path truth from the seed set, best-first on truth.
std::vector<double> widest_truth(int n, const std::vector<std::vector<Arc>>& adj, std::span<const NcEdge> edges,
                                 std::span<const int> seeds) {
    std::vector<double> t(n, 0.0);
    std::vector<char> done(n, 0);
    using Entry = std::pair<double, int>;
    // Larger truth first; among equal truth, smaller id first.
    auto cmp = [](const Entry& x, const Entry& y) { return x.first < y.first || (x.first == y.first && x.second > y.second); };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (int s : seeds) {
        t[s] = 1.0;
        heap.push({1.0, s});
    }
    while (!heap.empty()) {
        const auto [tu, u] = heap.top();
        heap.pop();
        if (done[u] || tu < t[u]) continue;
        done[u] = 1;
        for (const Arc& arc : adj[u]) {
            const double cand = std::min(tu, edges[arc.edge].truth);
            if (!done[arc.to] && cand > t[arc.to]) {
                t[arc.to] = cand;
                heap.push({cand, arc.to});
            }
        }
    }
    return t;
}

// Best confidence over strongest paths, for every region whose truth equals `level`.
//
// A simple path from the seed set to r that uses only edges with truth >= level
// is exactly a strongest path. Joining all seeds to a virtual source S, an edge
// lies on some simple S-r path iff its biconnected block lies on the S-r path of
// the block-cut tree, so the answer is the running block maximum along that path.
class LevelConfidence {
public:
    LevelConfidence(int n, std::span<const NcEdge> edges, std::span<const int> seeds, double level)
        : n_(n), source_(n), adj_(n + 1) {
        for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
            if (edges[e].truth < level) continue;
            add_edge(edges[e].a, edges[e].b, edges[e].confidence);
        }
        for (int s : seeds) add_edge(source_, s, -std::numeric_limits<double>::infinity());
    }

    // Returns per-vertex best confidence (NaN where unreachable from S).
    std::vector<double> solve() {
        disc_.assign(n_ + 1, -1);
        low_.assign(n_ + 1, 0);
        timer_ = 0;
        tarjan(source_, -1);

        // Block-cut tree: vertex nodes [0, n_], block nodes after that.
        const int nb = static_cast<int>(blocks_.size());
        std::vector<std::vector<int>> block_vertices(nb);
        std::vector<std::vector<int>> vertex_blocks(n_ + 1);
        std::vector<double> block_conf(nb, -std::numeric_limits<double>::infinity());
        for (int b = 0; b < nb; ++b) {
            for (int e : blocks_[b]) {
                block_conf[b] = std::max(block_conf[b], conf_[e]);
                for (int v : {ea_[e], eb_[e]}) block_vertices[b].push_back(v);
            }
            auto& bv = block_vertices[b];
            std::sort(bv.begin(), bv.end());
            bv.erase(std::unique(bv.begin(), bv.end()), bv.end());
            for (int v : bv) vertex_blocks[v].push_back(b);
        }

        std::vector<double> best(n_ + 1, std::numeric_limits<double>::quiet_NaN());
        std::vector<char> block_seen(nb, 0);
        // Stack of (vertex, running max).
        std::vector<std::pair<int, double>> stack{{source_, -std::numeric_limits<double>::infinity()}};
        best[source_] = -std::numeric_limits<double>::infinity();
        while (!stack.empty()) {
            const auto [v, acc] = stack.back();
            stack.pop_back();
            for (int b : vertex_blocks[v]) {
                if (block_seen[b]) continue;
                block_seen[b] = 1;
                const double through = std::max(acc, block_conf[b]);
                for (int u : block_vertices[b]) {
                    if (u == v || !std::isnan(best[u])) continue;
                    best[u] = through;
                    stack.push_back({u, through});
                }
            }
        }
        best.pop_back();
        return best;
    }

private:
    void add_edge(int a, int b, double conf) {
        const int e = static_cast<int>(ea_.size());
        ea_.push_back(a);
        eb_.push_back(b);
        conf_.push_back(conf);
        adj_[a].push_back({b, e});
        adj_[b].push_back({a, e});
    }

    void tarjan(int u, int parent_edge) {
        disc_[u] = low_[u] = timer_++;
        for (const Arc& arc : adj_[u]) {
            if (arc.edge == parent_edge) continue;
            const int v = arc.to;
            if (disc_[v] < 0) {
                edge_stack_.push_back(arc.edge);
                tarjan(v, arc.edge);
                low_[u] = std::min(low_[u], low_[v]);
                if (low_[v] >= disc_[u]) {
                    std::vector<int> block;
                    int e;
                    do {
                        e = edge_stack_.back();
                        edge_stack_.pop_back();
                        block.push_back(e);
                    } while (e != arc.edge);
                    blocks_.push_back(std::move(block));
                }
            } else if (disc_[v] < disc_[u]) {
                edge_stack_.push_back(arc.edge);
                low_[u] = std::min(low_[u], disc_[v]);
            }
        }
    }

    int n_;
    int source_;
    std::vector<std::vector<Arc>> adj_;
    std::vector<int> ea_, eb_;
    std::vector<double> conf_;
    std::vector<int> disc_, low_;
    int timer_ = 0;
    std::vector<int> edge_stack_;
    std::vector<std::vector<int>> blocks_;
};

}  // namespace

double mu_t(double gray_i, double gray_j) { return std::exp(-std::abs(gray_i - gray_j) / kSigmaSq); }

double mu_i(double h_i, double h_j) { return 1.0 - std::max(h_i, h_j); }

std::vector<NcEdge> nc_edges(const RegionGraph& graph) {
    std::vector<NcEdge> edges;
    for (int a = 0; a < graph.n; ++a) {
        for (int b : graph.adjacency[a]) {
            if (b <= a) continue;
            edges.push_back({a, b, mu_t(graph.gray[a], graph.gray[b]), mu_i(graph.inhom[a], graph.inhom[b])});
        }
    }
    return edges;
}

NcResult propagate(int n, std::span<const NcEdge> edges, std::span<const int> seeds,
                   std::span<const double> seed_confidence) {
    if (seeds.empty()) throw std::invalid_argument("propagate: no seed (border) regions");
    if (seed_confidence.size() != seeds.size())
        throw std::invalid_argument("propagate: one confidence value per seed is required");
    for (int s : seeds)
        if (s < 0 || s >= n) throw std::invalid_argument("propagate: seed id out of range");

    const auto adj = build_arcs(n, edges);
    NcResult out;
    out.t = widest_truth(n, adj, edges, seeds);
    out.i.assign(n, 0.0);

    std::vector<char> is_seed(n, 0);
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        is_seed[seeds[k]] = 1;
        out.i[seeds[k]] = seed_confidence[k];
    }

    std::vector<double> levels;
    for (int r = 0; r < n; ++r)
        if (!is_seed[r] && out.t[r] > 0.0) levels.push_back(out.t[r]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    for (double level : levels) {
        const std::vector<double> best = LevelConfidence(n, edges, seeds, level).solve();
        for (int r = 0; r < n; ++r)
            if (!is_seed[r] && out.t[r] == level) out.i[r] = std::clamp(best[r], 0.0, 1.0);
    }
    return out;
}

NcResult propagate(const RegionGraph& graph) {
    const std::vector<NcEdge> edges = nc_edges(graph);
    std::vector<double> conf;
    conf.reserve(graph.border.size());
    for (int s : graph.border) conf.push_back(1.0 - graph.inhom[s]);
    return propagate(graph.n, edges, graph.border, conf);
}

std::vector<double> seed_distance(int n, std::span<const WeightedEdge> edges, std::span<const int> seeds) {
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const WeightedEdge& e : edges) {
        if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n) throw std::invalid_argument("seed_distance: bad edge");
        adj[e.a].push_back({e.b, e.weight});
        adj[e.b].push_back({e.a, e.weight});
    }
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (int s : seeds) {
        dist[s] = 0.0;
        heap.push({0.0, s});
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const auto& [v, w] : adj[u]) {
            if (d + w < dist[v]) {
                dist[v] = d + w;
                heap.push({dist[v], v});
            }
        }
    }
    return dist;
}

std::vector<double> gs_background(const RegionGraph& graph) {
    std::vector<WeightedEdge> edges;
    for (int a = 0; a < graph.n; ++a)
        for (int b : graph.adjacency[a])
            if (b > a) edges.push_back({a, b, std::abs(graph.gray[a] - graph.gray[b])});
    const std::vector<double> d = seed_distance(graph.n, edges, graph.border);
    std::vector<double> g(graph.n);
    std::transform(d.begin(), d.end(), g.begin(), [](double v) { return std::exp(-v / kSigmaSq); });
    return g;
}

}  // namespace tse
