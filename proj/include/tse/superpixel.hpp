#pragma once

#include <array>
#include <span>
#include <vector>

#include "tse/image.hpp"

namespace tse {

/// Quick-shift parameters. The feature space is (x, y, ratio * intensity),
/// with x and y in pixels.
struct QuickShiftParams {
    double sigma = 2.0;   // Parzen kernel bandwidth
    double tau = 8.0;     // maximum link distance in feature space
    double ratio = 64.0;  // intensity scale relative to one pixel of distance
};

using Point2 = std::array<double, 2>;

/// Superpixel partition with the per-region statistics the energy terms consume.
struct RegionGraph {
    int width = 0;
    int height = 0;
    int n = 0;
    std::vector<int> labels;             // per pixel, in [0, n)
    std::vector<int> pixel_count;        // per region
    std::vector<double> gray;            // mean intensity
    std::vector<double> inhom;           // h(i) in [0,1]
    std::vector<Point2> center;          // normalized centroid
    std::vector<std::vector<int>> adjacency;  // sorted, symmetric, irreflexive
    std::vector<int> border;             // sorted ids touching the image border

    bool is_border(int r) const;
};

/// h = min(1, population stdev / 0.5). The region must be non-empty.
double inhomogeneity(std::span<const double> values);

/// Quick-shift over-segmentation followed by 4-connected component splitting.
RegionGraph oversegment(const GrayImage& img, const QuickShiftParams& params = {});

/// Builds the graph statistics for an arbitrary labeling. Labels must already be
/// dense in [0, n); connectivity is not enforced here.
RegionGraph build_region_graph(const GrayImage& img, std::vector<int> labels, int n);

/// Splits every label into its 4-connected components and renumbers regions in
/// raster order of their first pixel. Returns the new region count.
int split_components(int width, int height, std::vector<int>& labels);

/// Broadcasts a per-region value to a raster.
GrayImage rasterize(const RegionGraph& graph, std::span<const double> values);

}  // namespace tse
