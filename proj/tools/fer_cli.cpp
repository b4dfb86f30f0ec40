// Batch front-end: ingestion, feature extraction, selection, training,
// evaluation, the full pipeline, and the standalone optimizers.
#include "fer/error.hpp"
#include "fer/featmat.hpp"
#include "fer/image.hpp"
#include "fer/iqa.hpp"
#include "fer/metaopt.hpp"
#include "fer/pipeline.hpp"
#include "fer/select.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool out_given = false;
    bool verbose = false;

    fer::PipelineConfig load_config() const {
        if (config_path.empty()) {
            throw fer::InvalidArgument("--config is required for this subcommand");
        }
        fer::PipelineConfig cfg = fer::PipelineConfig::from_json_file(config_path);
        if (seed_given) cfg.seed = seed;
        if (out_given) cfg.output_dir = out_dir;
        return cfg;
    }

    std::string out_base() const { return out_given && !out_dir.empty() ? out_dir : "out"; }
};

fs::path ensure_out(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    return p;
}

fer::CurveSeries history_curve(const std::vector<double>& history) {
    fer::CurveSeries c;
    c.x_name = "iteration";
    c.y_name = "cost";
    for (std::size_t i = 0; i < history.size(); ++i) {
        c.x.push_back(static_cast<double>(i + 1));
        c.y.push_back(history[i]);
    }
    return c;
}

fer::GrayImage labels_to_gray(const fer::IntImage& labels) {
    fer::GrayImage g(labels.width, labels.height);
    for (std::size_t i = 0; i < labels.data.size(); ++i) g.data[i] = labels.data[i] / 255.0;
    return g;
}

fer::LabeledDataset dataset_from_csv(const std::string& path) {
    const fer::FeatureMatrix fm = fer::load_csv(path);
    if (!fm.has_labels()) {
        throw fer::InvalidArgument("'" + path + "' has no label column (expected header 'label')");
    }
    return fer::make_dataset(fm);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fer::WriteError("cannot write '" + path.string() + "'");
    out << text;
    if (text.empty() || text.back() != '\n') out << "\n";
}

void cmd_ingest(const Common& common) {
    const fer::PipelineConfig cfg = common.load_config();
    const fer::CorpusIndex idx = fer::ingest(cfg.input_dir, cfg.color_pattern, cfg.depth_pattern);
    const fs::path out = ensure_out(cfg.output_dir);
    const fs::path index_path = out / "index.csv";
    std::ofstream io(index_path, std::ios::binary);
    if (!io) throw fer::WriteError("cannot write '" + index_path.string() + "'");
    io << "stem,label,class,color_path,depth_path\n";
    for (const fer::CorpusSample& s : idx.samples) {
        io << s.stem << "," << s.label << "," << idx.class_names[s.label - 1] << ","
           << s.color_path << "," << s.depth_path << "\n";
    }
    std::cout << "ingested " << idx.samples.size() << " samples in " << idx.class_names.size()
              << " classes -> " << index_path.string() << "\n";
    if (common.verbose) {
        for (std::size_t c = 0; c < idx.class_names.size(); ++c) {
            std::size_t n = 0;
            for (const fer::CorpusSample& s : idx.samples) {
                if (s.label == static_cast<int>(c) + 1) ++n;
            }
            std::cout << "  class " << (c + 1) << " (" << idx.class_names[c] << "): " << n
                      << " samples\n";
        }
    }
}

void cmd_extract(const Common& common) {
    const fer::PipelineConfig cfg = common.load_config();
    const fer::CorpusIndex idx = fer::ingest(cfg.input_dir, cfg.color_pattern, cfg.depth_pattern);
    const fer::ExtractResult ex = fer::extract_features(cfg, idx);
    const fs::path out = ensure_out(cfg.output_dir);
    const fs::path fpath = out / "features.csv";
    fer::save_csv(ex.features, fpath.string());
    if (common.verbose) {
        for (const std::string& s : ex.op_sequence) std::cout << "  " << s << "\n";
    }
    std::cout << "wrote " << fpath.string() << " (" << ex.features.rows << " x "
              << ex.features.cols << ")\n";
}

void cmd_select(const Common& common, const std::string& features_path) {
    const fer::PipelineConfig cfg = common.load_config();
    const std::string in_path =
        features_path.empty() ? (fs::path(cfg.output_dir) / "features.csv").string()
                              : features_path;
    const fer::FeatureMatrix fm = fer::load_csv(in_path);
    if (!fm.has_labels()) {
        throw fer::InvalidArgument("'" + in_path + "' has no label column");
    }
    std::vector<double> y(fm.labels.begin(), fm.labels.end());
    const fer::LassoFit fit = fer::lasso_cv(fm, y, cfg.selection.k_folds, cfg.seed);
    fer::FeatureMatrix selected = fer::apply_selection(fm, fit);
    selected.labels = fm.labels;
    const fs::path out = ensure_out(cfg.output_dir);
    const fs::path spath = out / "features_selected.csv";
    fer::save_csv(selected, spath.string());
    write_text(out / "selection.json", fit.to_json());
    std::cout << "kept " << selected.cols << " of " << fm.cols << " columns -> " << spath.string()
              << "\n";
}

void cmd_train(const Common& common, const std::string& features_path) {
    const fer::PipelineConfig cfg = common.load_config();
    const std::string in_path =
        features_path.empty() ? (fs::path(cfg.output_dir) / "features.csv").string()
                              : features_path;
    const fer::LabeledDataset ds = dataset_from_csv(in_path);
    const fer::TrainedModel model = fer::train_classifier(cfg.classifier, ds, cfg.seed);
    const fs::path out = ensure_out(cfg.output_dir);
    write_text(out / "model.json", model.to_json());
    std::cout << "trained " << model.kind << " on " << ds.rows << " samples ("
              << ds.num_classes << " classes) -> " << (out / "model.json").string() << "\n";
}

void cmd_eval(const Common& common, const std::string& features_path,
              const std::string& model_path) {
    const fer::LabeledDataset ds = dataset_from_csv(features_path);
    std::ifstream mi(model_path, std::ios::binary);
    if (!mi) throw fer::NotFound("model file '" + model_path + "' not found");
    std::ostringstream ss;
    ss << mi.rdbuf();
    const fer::TrainedModel model = fer::TrainedModel::from_json(ss.str());
    const std::vector<int> pred = fer::predict(model, ds);
    const fer::ConfusionMatrix cm = fer::confusion(ds.y, pred, ds.num_classes);

    const fs::path out = ensure_out(common.out_base());
    const fs::path cpath = out / "confusion.csv";
    std::ofstream co(cpath, std::ios::binary);
    if (!co) throw fer::WriteError("cannot write '" + cpath.string() + "'");
    co << "true_class";
    for (int c = 1; c <= cm.num_classes; ++c) co << ",pred_" << c;
    co << "\n";
    for (int t = 0; t < cm.num_classes; ++t) {
        co << (t + 1);
        for (int p = 0; p < cm.num_classes; ++p) co << "," << cm.at(t, p);
        co << "\n";
    }
    std::cout << "accuracy " << cm.accuracy() << " over " << ds.rows << " samples -> "
              << cpath.string() << "\n";
}

void cmd_pipeline(const Common& common) {
    const fer::PipelineConfig cfg = common.load_config();
    const fer::RunReport report = fer::run_pipeline(cfg);
    if (common.verbose) {
        for (const std::string& s : report.op_sequence) std::cout << "  " << s << "\n";
    }
    std::cout << "accuracy " << report.accuracy << "; outputs in " << cfg.output_dir << ":";
    for (const std::string& o : report.outputs) std::cout << " " << o;
    std::cout << "\n";
}

void cmd_wdoa(const Common& common, const std::string& image_path, int k, int iters, int pop) {
    const fer::GrayImage img = fer::load_gray(image_path);
    const fer::WdoaResult res = fer::wdoa_enhance(img, k, iters, pop, common.seed);
    const fs::path out = ensure_out(common.out_base());
    fer::save_image(res.image, (out / "enhanced.pgm").string());
    fer::save_curve(history_curve(res.history), (out / "wdoa_history.csv").string());
    std::cout << "thresholds:";
    for (double t : res.thresholds) std::cout << " " << t;
    std::cout << "\nwrote " << (out / "enhanced.pgm").string() << " and wdoa_history.csv\n";
}

void cmd_beh(const Common& common, const std::string& image_path, int k, int iters, int pop) {
    const fer::RgbImage rgb = fer::load_rgb(image_path);
    const fer::BehResult res = fer::beh_segment(rgb, k, iters, pop, common.seed);
    const fs::path out = ensure_out(common.out_base());
    fer::save_image(res.quantized, (out / "quantized.ppm").string());
    fer::save_image(labels_to_gray(res.labels), (out / "labels.pgm").string());
    fer::save_curve(history_curve(res.history), (out / "beh_history.csv").string());
    std::cout << "wrote quantized.ppm, labels.pgm, beh_history.csv in " << out.string() << "\n";
}

void cmd_ngn(const Common& common, const std::string& image_path, int n, int iters) {
    const fer::GrayImage img = fer::load_gray(image_path);
    fer::NgnParams params;
    params.N = n;
    params.max_it = iters;
    const fer::NgnSegResult res = fer::ngn_segment(img, n, params, common.seed);
    const fs::path out = ensure_out(common.out_base());
    fer::save_image(labels_to_gray(res.labels), (out / "labels.pgm").string());
    fer::save_image(res.quantized, (out / "quantized.pgm").string());
    std::cout << "wrote labels.pgm and quantized.pgm in " << out.string() << "\n";
}

void cmd_vao(const Common& common, const std::string& features_path, int nf, int iters, int pop) {
    const fer::LabeledDataset ds = dataset_from_csv(features_path);
    fer::VaoParams params;
    if (iters > 0) params.max_it = iters;
    if (pop > 0) params.n_pop = pop;
    const fer::VaoResult res = fer::vao_select(ds, nf, params, common.seed);
    const fs::path out = ensure_out(common.out_base());
    const fs::path spath = out / "selected_columns.csv";
    std::ofstream so(spath, std::ios::binary);
    if (!so) throw fer::WriteError("cannot write '" + spath.string() + "'");
    so << "column\n";
    for (int c : res.selected) so << c << "\n";
    fer::save_curve(history_curve(res.history), (out / "vao_history.csv").string());
    std::cout << "selected columns:";
    for (int c : res.selected) std::cout << " " << c;
    std::cout << " (cost " << res.best_cost << ")\n";
}

void cmd_iqa(const Common& common, const std::string& image_path, const std::string& ref_path) {
    const fer::GrayImage a = fer::load_gray(image_path);
    const fer::GrayImage b = fer::load_gray(ref_path);
    const fer::IqaReport r = fer::compare_images(a, b);
    std::cout << "metric,value\n";
    std::cout << "mse," << r.mse << "\n";
    std::cout << "psnr," << r.psnr << "\n";
    std::cout << "ssim," << r.ssim << "\n";
    if (common.out_given) {
        const fs::path out = ensure_out(common.out_base());
        std::ostringstream ss;
        ss << "metric,value\nmse," << r.mse << "\npsnr," << r.psnr << "\nssim," << r.ssim << "\n";
        write_text(out / "iqa.csv", ss.str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"facial expression analysis toolkit"};
    app.require_subcommand(1);

    Common common;
    auto* config_opt = app.add_option("--config", common.config_path, "pipeline config JSON file");
    auto* seed_opt = app.add_option("--seed", common.seed, "RNG seed (overrides config)");
    auto* out_opt = app.add_option("--out", common.out_dir, "output directory (overrides config)");
    app.add_flag("--verbose", common.verbose, "print per-stage details");
    (void)config_opt;

    std::string features_path, model_path, image_path, ref_path;
    // Each subcommand binds its own flag variables: several subcommands share
    // flag names (--k, --iters, --pop) but with different defaults, and a
    // shared variable would keep only the last default registered.
    int wdoa_k = 6, wdoa_iters = 100, wdoa_pop = 10;
    int beh_k = 5, beh_iters = 200, beh_pop = 20;
    int ngn_n = 8, ngn_iters = 10;
    int vao_nf = 0, vao_iters = 0, vao_pop = 0;

    CLI::App* sc_ingest = app.add_subcommand("ingest", "index a corpus directory");
    CLI::App* sc_extract = app.add_subcommand("extract", "compute descriptor features");
    CLI::App* sc_select = app.add_subcommand("select", "sparse feature selection on a features CSV");
    sc_select->add_option("--features", features_path, "features CSV (default <out>/features.csv)");
    CLI::App* sc_train = app.add_subcommand("train", "fit the configured classifier");
    sc_train->add_option("--features", features_path, "features CSV (default <out>/features.csv)");
    CLI::App* sc_eval = app.add_subcommand("eval", "evaluate a saved model on a features CSV");
    sc_eval->add_option("--features", features_path, "labeled features CSV")->required();
    sc_eval->add_option("--model", model_path, "model JSON file")->required();
    CLI::App* sc_pipeline = app.add_subcommand("pipeline", "run the full pipeline");
    CLI::App* sc_wdoa = app.add_subcommand("enhance-wdoa", "threshold-search contrast enhancement");
    sc_wdoa->add_option("--image", image_path, "grayscale input image")->required();
    sc_wdoa->add_option("--k", wdoa_k, "number of thresholds")->default_val(6);
    sc_wdoa->add_option("--iters", wdoa_iters, "iterations")->default_val(100);
    sc_wdoa->add_option("--pop", wdoa_pop, "population size")->default_val(10);
    CLI::App* sc_beh = app.add_subcommand("segment-beh", "color cluster segmentation");
    sc_beh->add_option("--image", image_path, "input image")->required();
    sc_beh->add_option("--k", beh_k, "number of clusters")->default_val(5);
    sc_beh->add_option("--iters", beh_iters, "iterations")->default_val(200);
    sc_beh->add_option("--pop", beh_pop, "population size")->default_val(20);
    CLI::App* sc_ngn = app.add_subcommand("segment-ngn", "gas-network intensity segmentation");
    sc_ngn->add_option("--image", image_path, "grayscale input image")->required();
    sc_ngn->add_option("--n", ngn_n, "number of codebooks")->default_val(8);
    sc_ngn->add_option("--iters", ngn_iters, "epochs")->default_val(10);
    CLI::App* sc_vao = app.add_subcommand("select-vao", "wrapper feature-subset search");
    sc_vao->add_option("--features", features_path, "labeled features CSV")->required();
    sc_vao->add_option("--nf", vao_nf, "subset size")->required();
    sc_vao->add_option("--iters", vao_iters, "iterations (0 = default)")->default_val(0);
    sc_vao->add_option("--pop", vao_pop, "population size (0 = default)")->default_val(0);
    CLI::App* sc_iqa = app.add_subcommand("iqa", "image quality metrics against a reference");
    sc_iqa->add_option("--image", image_path, "test image")->required();
    sc_iqa->add_option("--ref", ref_path, "reference image")->required();

    for (CLI::App* sc : app.get_subcommands(nullptr)) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    common.seed_given = seed_opt->count() > 0;
    common.out_given = out_opt->count() > 0;

    try {
        if (sc_ingest->parsed()) {
            cmd_ingest(common);
        } else if (sc_extract->parsed()) {
            cmd_extract(common);
        } else if (sc_select->parsed()) {
            cmd_select(common, features_path);
        } else if (sc_train->parsed()) {
            cmd_train(common, features_path);
        } else if (sc_eval->parsed()) {
            cmd_eval(common, features_path, model_path);
        } else if (sc_pipeline->parsed()) {
            cmd_pipeline(common);
        } else if (sc_wdoa->parsed()) {
            cmd_wdoa(common, image_path, wdoa_k, wdoa_iters, wdoa_pop);
        } else if (sc_beh->parsed()) {
            cmd_beh(common, image_path, beh_k, beh_iters, beh_pop);
        } else if (sc_ngn->parsed()) {
            cmd_ngn(common, image_path, ngn_n, ngn_iters);
        } else if (sc_vao->parsed()) {
            cmd_vao(common, features_path, vao_nf, vao_iters, vao_pop);
        } else if (sc_iqa->parsed()) {
            cmd_iqa(common, image_path, ref_path);
        }
    } catch (const fer::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
