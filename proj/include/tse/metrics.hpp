#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tse/image.hpp"

namespace tse {

/// F-measure weight: gamma^2 = 0.3 favours precision.
inline constexpr double kFMeasureWeight = 0.3;

struct PrPoint {
    int threshold = 0;
    double precision = 1.0;
    double recall = 0.0;
};

struct EvalReport {
    std::vector<PrPoint> pr_curve;  // 256 levels
    double precision = 0.0;         // dataset means at the adaptive threshold
    double recall = 0.0;
    double f_measure = 0.0;
    double mae = 0.0;
    int images = 0;
    int excluded = 0;  // pairs without ground-truth foreground
};

/// Pair of a saliency map and its ground truth.
struct SaliencyPair {
    GrayImage saliency;
    BinaryMask truth;
};

/// Pixels whose byte-quantized saliency is strictly above `level`.
BinaryMask binarize(const GrayImage& sal, int level);

/// |SM n GT| / |SM| and |SM n GT| / |GT|; an empty SM gives (1, 0).
/// Throws on dimension mismatch or an empty ground truth.
std::pair<double, double> precision_recall(const BinaryMask& sm, const BinaryMask& gt);

/// Byte level min(255, round(2 * mean * 255)).
int adaptive_threshold(const GrayImage& sal);

double f_measure(double precision, double recall);

/// Mean absolute difference to the 0/1 ground truth, normalized by pixel count.
double mae(const GrayImage& sal, const BinaryMask& gt);

/// Mean precision/recall across the dataset at every byte level 0..255.
std::vector<PrPoint> pr_curve(const std::vector<SaliencyPair>& dataset);

/// Full metric suite over a dataset of maps with non-empty ground truth.
EvalReport evaluate(const std::vector<SaliencyPair>& dataset);

/// Scalar score of one (alpha, beta, gamma) candidate.
struct TuneScore {
    double f_measure = 0.0;
    double mae = 1.0;
};

using Weights = std::array<double, 3>;
using TuneScorer = std::function<TuneScore(const Weights&)>;

struct TuneStage {
    double step = 0.0;
    Weights lo{};
    Weights hi{};
    Weights incumbent{};  // best after this stage
};

struct TuneResult {
    Weights best{};
    std::vector<TuneStage> stages;
};

/// Coarse-to-fine grid search. Stage 1 scans [lo, hi]^3 at steps[0]; each later
/// stage scans a cube of half-width steps[k-1] around the incumbent at steps[k].
/// Higher F wins, then lower MAE, then the lexicographically smaller triple.
TuneResult grid_search(const TuneScorer& scorer, const std::vector<double>& steps = {40.0, 10.0, 2.0},
                       double lo = 0.0, double hi = 200.0);

void to_json(nlohmann::json& j, const PrPoint& p);
void from_json(const nlohmann::json& j, PrPoint& p);
void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);

/// "threshold,precision,recall" header plus 256 rows.
void write_pr_csv(const std::vector<PrPoint>& curve, std::ostream& out);

}  // namespace tse
