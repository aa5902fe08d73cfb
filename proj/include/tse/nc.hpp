#pragma once

#include <span>
#include <vector>

#include "tse/superpixel.hpp"

namespace tse {

/// Kernel width shared by the intensity affinities and exponential maps.
inline constexpr double kSigmaSq = 0.5;

/// Truth of the connection between two adjacent regions: exp(-|g_i - g_j| / sigma^2).
double mu_t(double gray_i, double gray_j);

/// Confidence of the connection between two adjacent regions: 1 - max(h_i, h_j).
double mu_i(double h_i, double h_j);

/// Per-region boundary connectedness: truth t and its confidence i.
struct NcResult {
    std::vector<double> t;
    std::vector<double> i;
};

/// Undirected edge carrying the two adjacency memberships.
struct NcEdge {
    int a = 0;
    int b = 0;
    double truth = 0.0;
    double confidence = 0.0;
};

/// Edges of the region adjacency graph with mu_t / mu_i weights, one per adjacent pair (a < b).
std::vector<NcEdge> nc_edges(const RegionGraph& graph);

/// Boundary-seeded Neutro-Connectedness.
///
/// t_r is the strongest (maximin) path truth from any seed to r. Among all
/// strongest simple paths, i_r is the largest attainable path confidence, where
/// a path's confidence is the maximum edge confidence along it. Seeds take
/// t = 1 and i = seed_confidence. Regions with no path to a seed get t = i = 0.
NcResult propagate(int n, std::span<const NcEdge> edges, std::span<const int> seeds,
                   std::span<const double> seed_confidence);

/// Seeds are the border regions, with confidence 1 - h(seed).
NcResult propagate(const RegionGraph& graph);

struct WeightedEdge {
    int a = 0;
    int b = 0;
    double weight = 0.0;
};

/// Additive shortest-path distance to the nearest seed (seeds at 0); +inf when unreachable.
std::vector<double> seed_distance(int n, std::span<const WeightedEdge> edges, std::span<const int> seeds);

/// Geodesic background map: edge weight |g_i - g_j|, output exp(-d / sigma^2).
std::vector<double> gs_background(const RegionGraph& graph);

}  // namespace tse
