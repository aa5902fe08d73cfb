#include "tse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tse {

namespace {

void require_same_size(int w0, int h0, int w1, int h1, const char* what) {
    if (w0 != w1 || h0 != h1) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

std::vector<double> axis(double from, double to, double center, double half_width, double step) {
    std::vector<double> values;
    if (half_width < 0.0) {
        for (int k = 0;; ++k) {
            const double v = from + k * step;
            if (v > to + 1e-9) break;
            values.push_back(v);
        }
        return values;
    }
    const int reach = static_cast<int>(std::floor(half_width / step + 1e-9));
    for (int k = -reach; k <= reach; ++k) {
        const double v = center + k * step;
        if (v >= from - 1e-9 && v <= to + 1e-9) values.push_back(v);
    }
    return values;
}

}  // namespace

BinaryMask binarize(const GrayImage& sal, int level) {
    BinaryMask m(sal.width, sal.height);
    std::transform(sal.data.begin(), sal.data.end(), m.data.begin(),
                   [level](double v) { return static_cast<std::uint8_t>(to_byte(v) > level ? 1 : 0); });
    return m;
}

std::pair<double, double> precision_recall(const BinaryMask& sm, const BinaryMask& gt) {
    require_same_size(sm.width, sm.height, gt.width, gt.height, "precision_recall");
    std::size_t both = 0, pred = 0, truth = 0;
    for (std::size_t p = 0; p < sm.data.size(); ++p) {
        pred += sm.data[p];
        truth += gt.data[p];
        both += sm.data[p] & gt.data[p];
    }
    if (truth == 0) throw std::invalid_argument("precision_recall: ground truth has no foreground");
    const double precision = pred == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(pred);
    return {precision, static_cast<double>(both) / static_cast<double>(truth)};
}

int adaptive_threshold(const GrayImage& sal) {
    if (sal.empty()) throw std::invalid_argument("adaptive_threshold: empty map");
    const double mean = std::accumulate(sal.data.begin(), sal.data.end(), 0.0) / static_cast<double>(sal.size());
    return static_cast<int>(std::min(255.0, std::floor(2.0 * mean * 255.0 + 0.5)));
}

double f_measure(double precision, double recall) {
    const double den = kFMeasureWeight * precision + recall;
    if (den <= 0.0) return 0.0;
    return (1.0 + kFMeasureWeight) * precision * recall / den;
}

double mae(const GrayImage& sal, const BinaryMask& gt) {
    require_same_size(sal.width, sal.height, gt.width, gt.height, "mae");
    if (sal.empty()) throw std::invalid_argument("mae: empty map");
    double sum = 0.0;
    for (std::size_t p = 0; p < sal.data.size(); ++p) sum += std::abs(sal.data[p] - (gt.data[p] ? 1.0 : 0.0));
    return sum / static_cast<double>(sal.size());
}

std::vector<PrPoint> pr_curve(const std::vector<SaliencyPair>& dataset) {
    if (dataset.empty()) throw std::invalid_argument("pr_curve: empty dataset");
    std::vector<PrPoint> curve(256);
    std::vector<double> psum(256, 0.0), rsum(256, 0.0);
    for (const SaliencyPair& pair : dataset) {
        require_same_size(pair.saliency.width, pair.saliency.height, pair.truth.width, pair.truth.height, "pr_curve");
        // Histogram per byte value; SM at level L is every pixel with byte > L.
        std::array<std::size_t, 256> hist_all{}, hist_fg{};
        std::size_t truth = 0;
        for (std::size_t p = 0; p < pair.saliency.data.size(); ++p) {
            const std::uint8_t b = to_byte(pair.saliency.data[p]);
            ++hist_all[b];
            if (pair.truth.data[p]) {
                ++hist_fg[b];
                ++truth;
            }
        }
        if (truth == 0) throw std::invalid_argument("pr_curve: ground truth has no foreground");
        std::size_t pred = 0, both = 0;
        for (int level = 255; level >= 0; --level) {
            const double precision = pred == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(pred);
            psum[level] += precision;
            rsum[level] += static_cast<double>(both) / static_cast<double>(truth);
            pred += hist_all[level];
            both += hist_fg[level];
        }
    }
    const double count = static_cast<double>(dataset.size());
    for (int level = 0; level < 256; ++level) curve[level] = {level, psum[level] / count, rsum[level] / count};
    return curve;
}

EvalReport evaluate(const std::vector<SaliencyPair>& dataset) {
    EvalReport rep;
    rep.pr_curve = pr_curve(dataset);
    for (const SaliencyPair& pair : dataset) {
        const auto [p, r] = precision_recall(binarize(pair.saliency, adaptive_threshold(pair.saliency)), pair.truth);
        rep.precision += p;
        rep.recall += r;
        rep.f_measure += f_measure(p, r);
        rep.mae += mae(pair.saliency, pair.truth);
    }
    const double count = static_cast<double>(dataset.size());
    rep.precision /= count;
    rep.recall /= count;
    rep.f_measure /= count;
    rep.mae /= count;
    rep.images = static_cast<int>(dataset.size());
    return rep;
}

TuneResult grid_search(const TuneScorer& scorer, const std::vector<double>& steps, double lo, double hi) {
    if (steps.empty()) throw std::invalid_argument("grid_search: no stages");
    for (double s : steps)
        if (!(s > 0.0)) throw std::invalid_argument("grid_search: steps must be positive");
    if (!(hi >= lo)) throw std::invalid_argument("grid_search: empty range");

    TuneResult result;
    Weights incumbent{lo, lo, lo};
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const double half = k == 0 ? -1.0 : steps[k - 1];
        std::array<std::vector<double>, 3> axes;
        for (int d = 0; d < 3; ++d) axes[d] = axis(lo, hi, incumbent[d], half, steps[k]);

        bool have = false;
        Weights best{};
        TuneScore best_score;
        for (double a : axes[0])
            for (double b : axes[1])
                for (double g : axes[2]) {
                    const TuneScore s = scorer({a, b, g});
                    if (!have || s.f_measure > best_score.f_measure ||
                        (s.f_measure == best_score.f_measure && s.mae < best_score.mae)) {
                        have = true;
                        best = {a, b, g};
                        best_score = s;
                    }
                }
        TuneStage stage;
        stage.step = steps[k];
        for (int d = 0; d < 3; ++d) {
            stage.lo[d] = axes[d].front();
            stage.hi[d] = axes[d].back();
        }
        stage.incumbent = best;
        result.stages.push_back(stage);
        incumbent = best;
    }
    result.best = incumbent;
    return result;
}

void to_json(nlohmann::json& j, const PrPoint& p) {
    j = {{"threshold", p.threshold}, {"precision", p.precision}, {"recall", p.recall}};
}

void from_json(const nlohmann::json& j, PrPoint& p) {
    j.at("threshold").get_to(p.threshold);
    j.at("precision").get_to(p.precision);
    j.at("recall").get_to(p.recall);
}

void to_json(nlohmann::json& j, const EvalReport& r) {
    j = {{"images", r.images}, {"excluded", r.excluded}, {"precision", r.precision}, {"recall", r.recall},
         {"f_measure", r.f_measure}, {"mae", r.mae}, {"pr_curve", r.pr_curve}};
}

void from_json(const nlohmann::json& j, EvalReport& r) {
    j.at("images").get_to(r.images);
    r.excluded = j.value("excluded", 0);
    j.at("precision").get_to(r.precision);
    j.at("recall").get_to(r.recall);
    j.at("f_measure").get_to(r.f_measure);
    j.at("mae").get_to(r.mae);
    j.at("pr_curve").get_to(r.pr_curve);
}

void write_pr_csv(const std::vector<PrPoint>& curve, std::ostream& out) {
    out << "threshold,precision,recall\n";
    char line[96];
    for (const PrPoint& p : curve) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g\n", p.threshold, p.precision, p.recall);
        out << line;
    }
}

}  // namespace tse
