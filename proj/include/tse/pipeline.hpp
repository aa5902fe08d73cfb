#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tse/image.hpp"
#include "tse/metrics.hpp"
#include "tse/nc.hpp"
#include "tse/priors.hpp"
#include "tse/solver.hpp"
#include "tse/superpixel.hpp"

namespace tse {

struct PipelineConfig {
    double alpha = 10.0;
    double beta = 2.0;
    double gamma = 80.0;
    double existence_threshold = kExistenceThreshold;
    QuickShiftParams quickshift;
    SolverOptions solver;
};

void to_json(nlohmann::json& j, const PipelineConfig& cfg);
/// Missing fields keep their defaults. Throws std::invalid_argument on invalid values.
void from_json(const nlohmann::json& j, PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

/// Everything that does not depend on (alpha, beta, gamma).
struct PreparedImage {
    int width = 0;
    int height = 0;
    PriorBundle priors;
    ExistenceFeatures features;
    bool has_tumor = false;
    std::optional<RegionGraph> graph;  // only when a tumor is detected
    std::optional<NcResult> nc;
};

struct SaliencyResult {
    bool has_tumor = false;
    std::vector<double> s;  // per-region saliency, empty without a tumor
    GrayImage saliency;     // s / max(s) per region; all zero without a tumor
    ExistenceFeatures features;
    PriorBundle priors;
    std::optional<RegionGraph> graph;
    std::optional<NcResult> nc;
    std::optional<SolverReport> solver;  // absent when the solver was not run
};

PreparedImage prepare(const GrayImage& img, const PipelineConfig& cfg);

/// Solves the energy for a prepared image with the given weights.
SaliencyResult render(const PreparedImage& prepared, double alpha, double beta, double gamma,
                      const SolverOptions& solver = {});

/// Two-step estimate: existence check, then the saliency optimization.
SaliencyResult estimate(const GrayImage& img, const PipelineConfig& cfg = {});

struct DatasetItem {
    std::string stem;
    std::filesystem::path image;
    std::filesystem::path mask;
};

/// Pairs `<stem>.{png,pgm}` with `<stem>_gt.{png,pgm}`, sorted by stem.
/// Throws std::runtime_error on unmatched files or an empty directory.
std::vector<DatasetItem> scan_dataset(const std::filesystem::path& dir);

/// Runs estimate on every pair and evaluates pairs with non-empty ground truth.
/// Images judged tumor-free contribute an all-zero map.
EvalReport evaluate_dataset(const std::filesystem::path& dir, const PipelineConfig& cfg = {});

/// Scorer for grid_search: caches everything independent of the weights and
/// re-solves each image per candidate.
TuneScorer make_dataset_scorer(const std::filesystem::path& dir, const PipelineConfig& cfg = {});

/// Debug rasters: labels (16-bit), T, I, GS, weighted map, FG and center costs.
void export_maps(const SaliencyResult& result, const std::filesystem::path& dir);

}  // namespace tse
