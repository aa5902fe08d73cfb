#include "tse/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>

namespace tse {

namespace {

bool is_raster(const std::filesystem::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ".png" || e == ".pgm";
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void validate(const PipelineConfig& cfg) {
    if (cfg.alpha < 0.0 || cfg.beta < 0.0 || cfg.gamma < 0.0) throw std::invalid_argument("config: weights must be >= 0");
    if (!(cfg.existence_threshold > 0.0)) throw std::invalid_argument("config: existence_threshold must be > 0");
    if (!(cfg.quickshift.sigma > 0.0) || !(cfg.quickshift.tau > 0.0) || !(cfg.quickshift.ratio >= 0.0))
        throw std::invalid_argument("config: quickshift requires sigma > 0, tau > 0, ratio >= 0");
    if (!(cfg.solver.tolerance > 0.0) || cfg.solver.max_iterations <= 0)
        throw std::invalid_argument("config: solver tolerance and iteration cap must be positive");
}

// Per-region values scaled to [0,1] for display; the raw range is preserved only in JSON dumps.
GrayImage display(const RegionGraph& g, std::vector<double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, b = *hi;
    for (double& x : v) x = b > a ? (x - a) / (b - a) : 0.0;
    return rasterize(g, v);
}

}  // namespace

void to_json(nlohmann::json& j, const PipelineConfig& cfg) {
    j = {{"alpha", cfg.alpha},
         {"beta", cfg.beta},
         {"gamma", cfg.gamma},
         {"existence_threshold", cfg.existence_threshold},
         {"quickshift", {{"sigma", cfg.quickshift.sigma}, {"tau", cfg.quickshift.tau}, {"ratio", cfg.quickshift.ratio}}},
         {"solver",
          {{"tolerance", cfg.solver.tolerance},
           {"max_iterations", cfg.solver.max_iterations},
           {"centering", cfg.solver.centering},
           {"sufficient_decrease", cfg.solver.sufficient_decrease},
           {"backtrack", cfg.solver.backtrack}}}};
}

void from_json(const nlohmann::json& j, PipelineConfig& cfg) {
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.existence_threshold = j.value("existence_threshold", cfg.existence_threshold);
    if (j.contains("quickshift")) {
        const auto& q = j.at("quickshift");
        cfg.quickshift.sigma = q.value("sigma", cfg.quickshift.sigma);
        cfg.quickshift.tau = q.value("tau", cfg.quickshift.tau);
        cfg.quickshift.ratio = q.value("ratio", cfg.quickshift.ratio);
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        cfg.solver.tolerance = s.value("tolerance", cfg.solver.tolerance);
        cfg.solver.max_iterations = s.value("max_iterations", cfg.solver.max_iterations);
        cfg.solver.centering = s.value("centering", cfg.solver.centering);
        cfg.solver.sufficient_decrease = s.value("sufficient_decrease", cfg.solver.sufficient_decrease);
        cfg.solver.backtrack = s.value("backtrack", cfg.solver.backtrack);
    }
    validate(cfg);
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("unreadable config: " + path.string());
    return nlohmann::json::parse(in).get<PipelineConfig>();
}

PreparedImage prepare(const GrayImage& img, const PipelineConfig& cfg) {
    validate(cfg);
    if (img.empty()) throw std::invalid_argument("estimate: empty image");
    PreparedImage out;
    out.width = img.width;
    out.height = img.height;
    out.priors.rp = reference_point(img);
    out.priors.weighted_map = weighted_map(img, out.priors.rp);
    out.features = existence_features(out.priors.weighted_map);
    out.has_tumor = has_tumor(out.features, cfg.existence_threshold);
    if (!out.has_tumor) return out;

    out.graph = oversegment(img, cfg.quickshift);
    out.nc = propagate(*out.graph);
    out.priors.f = fg_map(*out.graph, out.priors.weighted_map);
    out.priors.c = center_map(*out.graph, out.priors.rp);
    return out;
}

SaliencyResult render(const PreparedImage& prepared, double alpha, double beta, double gamma,
                      const SolverOptions& solver) {
    SaliencyResult res;
    res.has_tumor = prepared.has_tumor;
    res.features = prepared.features;
    res.priors = prepared.priors;
    res.graph = prepared.graph;
    res.nc = prepared.nc;
    if (!prepared.has_tumor) {
        res.saliency = GrayImage(prepared.width, prepared.height, 0.0);
        return res;
    }
    const RegionGraph& g = *prepared.graph;
    const EnergySpec spec = assemble(prepared.nc->t, prepared.priors.c, prepared.priors.f, g, alpha, beta, gamma);
    res.solver = solve(spec, solver);
    const Eigen::VectorXd& s = res.solver->s;
    res.s.assign(s.data(), s.data() + s.size());
    const double peak = *std::max_element(res.s.begin(), res.s.end());
    std::vector<double> normalized(res.s.size());
    std::transform(res.s.begin(), res.s.end(), normalized.begin(),
                   [peak](double v) { return std::clamp(v / peak, 0.0, 1.0); });
    res.saliency = rasterize(g, normalized);
    return res;
}

SaliencyResult estimate(const GrayImage& img, const PipelineConfig& cfg) {
    return render(prepare(img, cfg), cfg.alpha, cfg.beta, cfg.gamma, cfg.solver);
}

std::vector<DatasetItem> scan_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::map<std::string, std::filesystem::path> images, masks;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || !is_raster(entry.path())) continue;
        const std::string stem = entry.path().stem().string();
        if (ends_with(stem, "_gt")) {
            const std::string key = stem.substr(0, stem.size() - 3);
            if (!masks.emplace(key, entry.path()).second) throw std::runtime_error("duplicate mask for stem " + key);
        } else if (!images.emplace(stem, entry.path()).second) {
            throw std::runtime_error("duplicate image for stem " + stem);
        }
    }
    if (images.empty() && masks.empty()) throw std::runtime_error("empty dataset directory: " + dir.string());
    std::vector<DatasetItem> items;
    for (const auto& [stem, path] : images) {
        const auto m = masks.find(stem);
        if (m == masks.end()) throw std::runtime_error("unmatched image (no " + stem + "_gt): " + path.string());
        items.push_back({stem, path, m->second});
    }
    for (const auto& [stem, path] : masks)
        if (!images.count(stem)) throw std::runtime_error("unmatched mask: " + path.string());
    return items;
}

EvalReport evaluate_dataset(const std::filesystem::path& dir, const PipelineConfig& cfg) {
    std::vector<SaliencyPair> pairs;
    int excluded = 0;
    for (const DatasetItem& item : scan_dataset(dir)) {
        BinaryMask gt = load_mask(item.mask);
        if (gt.count() == 0) {
            ++excluded;
            continue;
        }
        const GrayImage img = load_image(item.image);
        if (img.width != gt.width || img.height != gt.height)
            throw std::runtime_error("image and mask sizes differ for " + item.stem);
        pairs.push_back({estimate(img, cfg).saliency, std::move(gt)});
    }
    if (pairs.empty()) throw std::runtime_error("no pair with ground-truth foreground in " + dir.string());
    EvalReport rep = evaluate(pairs);
    rep.excluded = excluded;
    return rep;
}

TuneScorer make_dataset_scorer(const std::filesystem::path& dir, const PipelineConfig& cfg) {
    struct Cached {
        PreparedImage prepared;
        BinaryMask truth;
    };
    auto cache = std::make_shared<std::vector<Cached>>();
    for (const DatasetItem& item : scan_dataset(dir)) {
        BinaryMask gt = load_mask(item.mask);
        if (gt.count() == 0) continue;
        cache->push_back({prepare(load_image(item.image), cfg), std::move(gt)});
    }
    if (cache->empty()) throw std::runtime_error("no pair with ground-truth foreground in " + dir.string());
    const SolverOptions solver = cfg.solver;
    return [cache, solver](const Weights& w) {
        std::vector<SaliencyPair> pairs;
        pairs.reserve(cache->size());
        for (const Cached& c : *cache) pairs.push_back({render(c.prepared, w[0], w[1], w[2], solver).saliency, c.truth});
        TuneScore score;
        double f = 0.0, m = 0.0;
        for (const SaliencyPair& p : pairs) {
            const auto [pr, rc] = precision_recall(binarize(p.saliency, adaptive_threshold(p.saliency)), p.truth);
            f += f_measure(pr, rc);
            m += mae(p.saliency, p.truth);
        }
        score.f_measure = f / static_cast<double>(pairs.size());
        score.mae = m / static_cast<double>(pairs.size());
        return score;
    };
}

void export_maps(const SaliencyResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_image(result.priors.weighted_map, dir / "weighted.png");
    save_image(result.saliency, dir / "saliency.png");
    if (!result.graph) return;
    const RegionGraph& g = *result.graph;
    save_pgm16(g.width, g.height, g.labels, dir / "labels.pgm");
    save_image(rasterize(g, result.nc->t), dir / "nc_t.png");
    save_image(rasterize(g, result.nc->i), dir / "nc_i.png");
    save_image(rasterize(g, gs_background(g)), dir / "gs.png");
    save_image(rasterize(g, result.priors.f), dir / "fg.png");
    save_image(display(g, result.priors.c), dir / "center.png");
}

}  // namespace tse
