#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tse/image.hpp"

namespace tse {

/// One dark elliptical lesion. Center and semi-axes are in normalized
/// coordinates, where pixel (x, y) sits at (x/(W-1), y/(H-1)).
struct TumorSpec {
    double center_x = 0.5;
    double center_y = 0.5;
    double a = 0.1;
    double b = 0.1;
    double depth = 0.8;      // interior = base * (1 - depth)
    double edge_fuzz = 0.0;  // pixels of smoothstep ramp outside the ellipse
};

/// Vertical acoustic shadow: columns [col_begin, col_end) are multiplied by attenuation.
struct ShadowSpec {
    int col_begin = 0;
    int col_end = 0;
    double attenuation = 1.0;
};

struct PhantomSpec {
    int width = 128;
    int height = 128;
    std::vector<TumorSpec> tumors;
    double speckle_strength = 0.0;
    std::optional<ShadowSpec> shadow;
    std::uint64_t rng_seed = 0;
};

class PhantomError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kPhantomBackground = 0.6;

/// Renders the phantom image and its analytic ground-truth mask.
/// Throws PhantomError when a tumor reaches the image border or a field is out of range.
std::pair<GrayImage, BinaryMask> generate_phantom(const PhantomSpec& spec);

/// Normalized coordinate of pixel index i along an axis of n pixels.
inline double normalized_coord(int i, int n) { return n > 1 ? static_cast<double>(i) / (n - 1) : 0.0; }

void to_json(nlohmann::json& j, const TumorSpec& t);
void from_json(const nlohmann::json& j, TumorSpec& t);
void to_json(nlohmann::json& j, const ShadowSpec& s);
void from_json(const nlohmann::json& j, ShadowSpec& s);
void to_json(nlohmann::json& j, const PhantomSpec& p);
void from_json(const nlohmann::json& j, PhantomSpec& p);

/// Seeded evaluation suite: `with_tumor` single-lesion phantoms (depth >= 0.5,
/// normalized radius >= 0.08) followed by `without_tumor` lesion-free ones.
std::vector<PhantomSpec> phantom_suite(int with_tumor, int without_tumor, std::uint64_t seed,
                                       int size = 128, double speckle = 0.1);

}  // namespace tse
