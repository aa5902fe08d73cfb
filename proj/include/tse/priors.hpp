#pragma once

#include <span>
#include <vector>

#include "tse/image.hpp"
#include "tse/superpixel.hpp"

namespace tse {

/// Distance scale of the center and proximity kernels: sqrt(2)/2.
inline constexpr double kDistanceScale = 0.70710678118654752440;

/// Default decision threshold on the weighted-map maximum.
inline constexpr double kExistenceThreshold = 0.05;

struct PriorBundle {
    GrayImage weighted_map;
    Point2 rp{0.5, 0.4};
    std::vector<double> f;  // FG cost per region, (0,1]
    std::vector<double> c;  // center cost per region, [1, e^2]
};

struct ExistenceFeatures {
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0;
};

/// Separable Gaussian blur with replicated borders, kernel truncated at 3 sigma.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Reference-point surrogate: blur, score = blackness x anatomical Gaussian prior
/// centered at normalized (0.5, 0.4), RP = centroid of the top 5% scores.
Point2 reference_point(const GrayImage& img);

/// Relative darkness of every pixel against the image's background level:
/// clamp((m - I_blur) / m, 0, 1) with m the median of the blurred image.
GrayImage relative_darkness(const GrayImage& img);

/// darkness x exp(-|p - rp| / d_D) for a pixel at normalized position p.
double weighted_value(double darkness, Point2 p, Point2 rp);

/// Pixel-level weighted map built from relative_darkness and the RP decay.
GrayImage weighted_map(const GrayImage& img, Point2 rp);

/// w_i = exp(-m_i / sigma^2), m_i the region mean of the weighted map.
double fg_value(double region_mean);
std::vector<double> fg_map(const RegionGraph& graph, const GrayImage& wm);

/// c_i = exp(+|SC_i - rp| / d_D); grows with distance from the reference point.
double center_value(Point2 center, Point2 rp);
std::vector<double> center_map(const RegionGraph& graph, Point2 rp);

ExistenceFeatures existence_features(const GrayImage& wm);

/// Inclusive threshold on the weighted-map maximum.
bool has_tumor(const ExistenceFeatures& feat, double threshold = kExistenceThreshold);

}  // namespace tse
