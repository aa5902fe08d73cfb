// Command-line front end for tumor saliency estimation.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tse/image.hpp"
#include "tse/metrics.hpp"
#include "tse/phantom.hpp"
#include "tse/pipeline.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kProcessingError = 3;

tse::PipelineConfig config_from(const std::string& path) {
    return path.empty() ? tse::PipelineConfig{} : tse::load_config(path);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::string features_csv(const std::string& path, const tse::ExistenceFeatures& f, bool verdict) {
    char buf[128];
    std::snprintf(buf, sizeof buf, ",%.9g,%.9g,%.9g,%s", f.max, f.mean, f.std, verdict ? "tumor" : "no-tumor");
    return path + buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tse::IoError("unwritable path: " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tumor saliency estimation for breast-ultrasound-like images"};
    app.require_subcommand(1);

    std::string config_path;
    std::string image_path;

    auto* est = app.add_subcommand("estimate", "Estimate the saliency map of one image");
    std::string out_map, dump_dir, est_json;
    est->add_option("image", image_path, "Input PGM/PNG")->required();
    est->add_option("--out", out_map, "Output saliency map (8-bit)");
    est->add_option("--dump-maps", dump_dir, "Directory for intermediate maps");
    est->add_option("--config", config_path, "Pipeline config JSON");
    est->add_option("--report", est_json, "Write the solver/diagnostic summary as JSON");

    auto* exists = app.add_subcommand("exists", "Tumor existence check; exit 0 = tumor, 1 = none");
    double threshold = -1.0;
    exists->add_option("image", image_path, "Input PGM/PNG")->required();
    exists->add_option("--threshold", threshold, "Override the weighted-map threshold");
    exists->add_option("--config", config_path, "Pipeline config JSON");

    auto* eval = app.add_subcommand("eval", "Evaluate a directory of <stem> / <stem>_gt pairs");
    std::string data_dir, report_path, pr_path;
    eval->add_option("dir", data_dir, "Dataset directory")->required();
    eval->add_option("--report", report_path, "EvalReport JSON output");
    eval->add_option("--pr", pr_path, "P-R curve CSV output");
    eval->add_option("--config", config_path, "Pipeline config JSON");

    auto* phantom = app.add_subcommand("phantom", "Render a phantom from a JSON spec");
    std::string spec_path, out_img, out_mask;
    phantom->add_option("spec", spec_path, "PhantomSpec JSON")->required();
    phantom->add_option("--out-img", out_img, "Image output")->required();
    phantom->add_option("--out-mask", out_mask, "Mask output")->required();

    auto* suite = app.add_subcommand("suite", "Write the seeded phantom evaluation suite");
    std::string suite_dir;
    int with_tumor = 20, without_tumor = 20, size = 128;
    std::uint64_t seed = 2024;
    double speckle = 0.1;
    suite->add_option("dir", suite_dir, "Output directory")->required();
    suite->add_option("--tumors", with_tumor, "Phantoms with one tumor");
    suite->add_option("--clean", without_tumor, "Phantoms without tumor");
    suite->add_option("--size", size, "Image side in pixels");
    suite->add_option("--seed", seed, "Suite seed");
    suite->add_option("--speckle", speckle, "Speckle strength");

    auto* tune = app.add_subcommand("tune", "Coarse-to-fine grid search over alpha, beta, gamma");
    std::string steps_text = "40,10,2";
    std::string range_text = "0,200";
    tune->add_option("dir", data_dir, "Dataset directory")->required();
    tune->add_option("--steps", steps_text, "Comma-separated stage steps");
    tune->add_option("--range", range_text, "lo,hi of every weight");
    tune->add_option("--config", config_path, "Pipeline config JSON");

    auto* maps = app.add_subcommand("maps", "Export T, I, GS, weighted, FG and center maps");
    std::string maps_dir = "maps";
    maps->add_option("image", image_path, "Input PGM/PNG")->required();
    maps->add_option("--out-dir", maps_dir, "Output directory");
    maps->add_option("--config", config_path, "Pipeline config JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (*est) {
            const tse::SaliencyResult res = tse::estimate(tse::load_image(image_path), config_from(config_path));
            if (!out_map.empty()) tse::save_image(res.saliency, out_map);
            if (!dump_dir.empty()) tse::export_maps(res, dump_dir);
            nlohmann::json j = {{"image", image_path},
                                {"has_tumor", res.has_tumor},
                                {"rp", res.priors.rp},
                                {"features", {{"max", res.features.max}, {"mean", res.features.mean}, {"std", res.features.std}}},
                                {"regions", res.graph ? res.graph->n : 0}};
            if (res.solver) j["solver"] = *res.solver;
            if (!est_json.empty()) write_text(est_json, j.dump(2) + "\n");
            std::cout << (res.has_tumor ? "tumor" : "no-tumor") << " regions=" << (res.graph ? res.graph->n : 0);
            if (res.solver) std::cout << " iterations=" << res.solver->iterations << " residual=" << res.solver->final_residual;
            std::cout << '\n';
            return 0;
        }
        if (*exists) {
            tse::PipelineConfig cfg = config_from(config_path);
            if (threshold > 0.0) cfg.existence_threshold = threshold;
            const tse::GrayImage img = tse::load_image(image_path);
            const tse::GrayImage wm = tse::weighted_map(img, tse::reference_point(img));
            const tse::ExistenceFeatures f = tse::existence_features(wm);
            const bool verdict = tse::has_tumor(f, cfg.existence_threshold);
            std::cout << features_csv(image_path, f, verdict) << '\n';
            return verdict ? 0 : 1;
        }
        if (*eval) {
            const tse::EvalReport rep = tse::evaluate_dataset(data_dir, config_from(config_path));
            const std::string json = nlohmann::json(rep).dump(2) + "\n";
            if (!report_path.empty()) write_text(report_path, json);
            if (!pr_path.empty()) {
                std::ostringstream csv;
                tse::write_pr_csv(rep.pr_curve, csv);
                write_text(pr_path, csv.str());
            }
            std::printf("images=%d excluded=%d precision=%.6f recall=%.6f f_measure=%.6f mae=%.6f\n", rep.images,
                        rep.excluded, rep.precision, rep.recall, rep.f_measure, rep.mae);
            return 0;
        }
        if (*phantom) {
            std::ifstream in(spec_path);
            if (!in) throw tse::IoError("unreadable spec: " + spec_path);
            const auto spec = nlohmann::json::parse(in).get<tse::PhantomSpec>();
            const auto [img, mask] = tse::generate_phantom(spec);
            tse::save_image(img, out_img);
            tse::save_mask(mask, out_mask);
            return 0;
        }
        if (*suite) {
            std::filesystem::create_directories(suite_dir);
            const auto specs = tse::phantom_suite(with_tumor, without_tumor, seed, size, speckle);
            for (std::size_t k = 0; k < specs.size(); ++k) {
                char stem[32];
                std::snprintf(stem, sizeof stem, "phantom_%03zu", k);
                const auto [img, mask] = tse::generate_phantom(specs[k]);
                const std::filesystem::path dir(suite_dir);
                tse::save_image(img, dir / (std::string(stem) + ".pgm"));
                tse::save_mask(mask, dir / (std::string(stem) + "_gt.pgm"));
                write_text((dir / (std::string(stem) + ".json")).string(), nlohmann::json(specs[k]).dump(2) + "\n");
            }
            std::cout << "wrote " << specs.size() << " phantoms to " << suite_dir << '\n';
            return 0;
        }
        if (*tune) {
            const std::vector<double> steps = parse_list(steps_text);
            const std::vector<double> range = parse_list(range_text);
            if (range.size() != 2) {
                std::cerr << "usage error: --range expects lo,hi\n";
                return kUsageError;
            }
            const tse::TuneResult res =
                tse::grid_search(tse::make_dataset_scorer(data_dir, config_from(config_path)), steps, range[0], range[1]);
            for (std::size_t k = 0; k < res.stages.size(); ++k) {
                const auto& s = res.stages[k];
                std::printf("stage %zu step=%g cube=[%g,%g]x[%g,%g]x[%g,%g] incumbent=(%g, %g, %g)\n", k + 1, s.step,
                            s.lo[0], s.hi[0], s.lo[1], s.hi[1], s.lo[2], s.hi[2], s.incumbent[0], s.incumbent[1],
                            s.incumbent[2]);
            }
            std::printf("alpha=%g beta=%g gamma=%g\n", res.best[0], res.best[1], res.best[2]);
            return 0;
        }
        if (*maps) {
            const tse::SaliencyResult res = tse::estimate(tse::load_image(image_path), config_from(config_path));
            tse::export_maps(res, maps_dir);
            std::cout << "maps written to " << maps_dir << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kProcessingError;
    }
    return kUsageError;
}
