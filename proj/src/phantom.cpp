#include "tse/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace tse {

namespace {

// Uniform in [0,1) from the top 53 bits; avoids implementation-defined distributions.
double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double smoothstep(double edge0, double edge1, double x) {
    const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

void validate(const PhantomSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) throw PhantomError("phantom dimensions must be positive");
    if (!(spec.speckle_strength >= 0.0)) throw PhantomError("speckle_strength must be >= 0");
    for (std::size_t k = 0; k < spec.tumors.size(); ++k) {
        const TumorSpec& t = spec.tumors[k];
        const std::string id = "tumor " + std::to_string(k);
        if (!(t.a > 0.0 && t.b > 0.0)) throw PhantomError(id + ": semi-axes must be positive");
        if (!(t.depth > 0.0 && t.depth <= 1.0)) throw PhantomError(id + ": depth must lie in (0,1]");
        if (!(t.edge_fuzz >= 0.0)) throw PhantomError(id + ": edge_fuzz must be >= 0");
        if (t.center_x - t.a <= 0.0 || t.center_x + t.a >= 1.0 || t.center_y - t.b <= 0.0 ||
            t.center_y + t.b >= 1.0)
            throw PhantomError(id + ": ellipse touches the image border");
    }
    if (spec.shadow) {
        const ShadowSpec& s = *spec.shadow;
        if (s.col_begin < 0 || s.col_end < s.col_begin || s.col_end > spec.width)
            throw PhantomError("shadow column range out of bounds");
        if (!(s.attenuation >= 0.0 && s.attenuation <= 1.0)) throw PhantomError("shadow attenuation must lie in [0,1]");
    }
}

}  // namespace

std::pair<GrayImage, BinaryMask> generate_phantom(const PhantomSpec& spec) {
    validate(spec);
    const int w = spec.width;
    const int h = spec.height;
    const double sx = w > 1 ? w - 1.0 : 1.0;
    const double sy = h > 1 ? h - 1.0 : 1.0;

    GrayImage img(w, h, kPhantomBackground);
    BinaryMask mask(w, h);
    std::mt19937_64 gen(spec.rng_seed);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double px = normalized_coord(x, w);
            const double py = normalized_coord(y, h);
            double v = kPhantomBackground;
            bool inside = false;
            for (const TumorSpec& t : spec.tumors) {
                const double u = (px - t.center_x) / t.a;
                const double q = (py - t.center_y) / t.b;
                const double r2 = u * u + q * q;
                double weight = 0.0;
                if (r2 <= 1.0) {
                    weight = 1.0;
                    inside = true;
                } else if (t.edge_fuzz > 0.0) {
                    // Distance past the boundary along the ray from the center, in pixels.
                    const double dp = std::hypot((px - t.center_x) * sx, (py - t.center_y) * sy);
                    const double outside = dp * (1.0 - 1.0 / std::sqrt(r2));
                    weight = 1.0 - smoothstep(0.0, t.edge_fuzz, outside);
                }
                v = std::min(v, kPhantomBackground * (1.0 - t.depth * weight));
            }
            const double n = 1.0 + spec.speckle_strength * (uniform01(gen) - 0.5);
            v *= n;
            if (spec.shadow && x >= spec.shadow->col_begin && x < spec.shadow->col_end) v *= spec.shadow->attenuation;
            img.at(x, y) = std::clamp(v, 0.0, 1.0);
            mask.set(x, y, inside);
        }
    }
    return {std::move(img), std::move(mask)};
}

std::vector<PhantomSpec> phantom_suite(int with_tumor, int without_tumor, std::uint64_t seed, int size,
                                       double speckle) {
    std::mt19937_64 gen(seed);
    auto uniform = [&gen](double lo, double hi) { return lo + (hi - lo) * uniform01(gen); };
    std::vector<PhantomSpec> suite;
    for (int k = 0; k < with_tumor + without_tumor; ++k) {
        PhantomSpec p;
        p.width = size;
        p.height = size;
        p.speckle_strength = speckle;
        p.rng_seed = gen();
        if (k < with_tumor) {
            TumorSpec t;
            t.a = uniform(0.08, 0.18);
            t.b = uniform(0.08, 0.18);
            t.center_x = uniform(0.3, 0.7);
            t.center_y = uniform(0.3, 0.6);
            t.depth = uniform(0.5, 0.9);
            t.edge_fuzz = uniform(0.0, 2.0);
            p.tumors.push_back(t);
        }
        suite.push_back(std::move(p));
    }
    return suite;
}

void to_json(nlohmann::json& j, const TumorSpec& t) {
    j = {{"center_x", t.center_x}, {"center_y", t.center_y}, {"a", t.a},
         {"b", t.b},               {"depth", t.depth},       {"edge_fuzz", t.edge_fuzz}};
}

void from_json(const nlohmann::json& j, TumorSpec& t) {
    j.at("center_x").get_to(t.center_x);
    j.at("center_y").get_to(t.center_y);
    j.at("a").get_to(t.a);
    j.at("b").get_to(t.b);
    j.at("depth").get_to(t.depth);
    t.edge_fuzz = j.value("edge_fuzz", 0.0);
}

void to_json(nlohmann::json& j, const ShadowSpec& s) {
    j = {{"col_begin", s.col_begin}, {"col_end", s.col_end}, {"attenuation", s.attenuation}};
}

void from_json(const nlohmann::json& j, ShadowSpec& s) {
    j.at("col_begin").get_to(s.col_begin);
    j.at("col_end").get_to(s.col_end);
    j.at("attenuation").get_to(s.attenuation);
}

void to_json(nlohmann::json& j, const PhantomSpec& p) {
    j = {{"width", p.width},
         {"height", p.height},
         {"tumors", p.tumors},
         {"speckle_strength", p.speckle_strength},
         {"shadow", p.shadow ? nlohmann::json(*p.shadow) : nlohmann::json(nullptr)},
         {"rng_seed", p.rng_seed}};
}

void from_json(const nlohmann::json& j, PhantomSpec& p) {
    j.at("width").get_to(p.width);
    j.at("height").get_to(p.height);
    p.tumors = j.value("tumors", std::vector<TumorSpec>{});
    p.speckle_strength = j.value("speckle_strength", 0.0);
    if (j.contains("shadow") && !j.at("shadow").is_null())
        p.shadow = j.at("shadow").get<ShadowSpec>();
    else
        p.shadow.reset();
    p.rng_seed = j.value("rng_seed", std::uint64_t{0});
}

}  // namespace tse
