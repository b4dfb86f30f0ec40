#include "fer/pipeline.hpp"

#include "fer/edgemorph.hpp"
#include "fer/enhance.hpp"
#include "fer/error.hpp"
#include "fer/features.hpp"
#include "fer/image.hpp"
#include "fer/rng.hpp"
#include "fer/select.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace fer {

namespace {

// --- config -----------------------------------------------------------------

double require_num(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw InvalidArgument("config: " + where + " needs numeric '" + key + "'");
    }
    return j.at(key).get<double>();
}

std::string require_str(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw InvalidArgument("config: " + where + " needs string '" + key + "'");
    }
    return j.at(key).get<std::string>();
}

std::vector<PreprocOp> parse_chain(const nlohmann::json& arr, const std::string& where) {
    if (!arr.is_array()) throw InvalidArgument("config: " + where + " must be an array of ops");
    std::vector<PreprocOp> out;
    for (const nlohmann::json& o : arr) {
        if (!o.is_object()) throw InvalidArgument("config: " + where + " op must be an object");
        PreprocOp op;
        op.name = require_str(o, "op", where);
        for (auto it = o.begin(); it != o.end(); ++it) {
            if (it.key() == "op") continue;
            if (it.value().is_string()) {
                op.arg = it.value().get<std::string>();
            } else if (it.value().is_number()) {
                op.params[it.key()] = it.value().get<double>();
            } else if (it.value().is_boolean()) {
                op.params[it.key()] = it.value().get<bool>() ? 1.0 : 0.0;
            } else {
                throw InvalidArgument("config: " + where + " op '" + op.name +
                                      "' has non-scalar parameter '" + it.key() + "'");
            }
        }
        out.push_back(std::move(op));
    }
    return out;
}

} // namespace

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: not valid JSON: ") + e.what());
    }
    PipelineConfig cfg;
    cfg.raw_json = text;
    cfg.input_dir = require_str(j, "input_dir", "top level");
    if (!j.contains("patterns") || !j.at("patterns").is_object()) {
        throw InvalidArgument("config: missing 'patterns' object");
    }
    cfg.color_pattern = require_str(j.at("patterns"), "color", "patterns");
    if (j.at("patterns").contains("depth")) {
        cfg.depth_pattern = require_str(j.at("patterns"), "depth", "patterns");
    }
    if (!j.contains("seed") || !j.at("seed").is_number_integer()) {
        throw InvalidArgument("config: integer 'seed' is required");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = require_str(j, "output_dir", "top level");
    if (j.contains("crop_sidecar")) cfg.crop_sidecar = require_str(j, "crop_sidecar", "top level");

    if (j.contains("preprocess")) {
        const nlohmann::json& p = j.at("preprocess");
        if (!p.is_object()) throw InvalidArgument("config: 'preprocess' must be an object");
        if (p.contains("color")) cfg.pre_color = parse_chain(p.at("color"), "preprocess.color");
        if (p.contains("depth")) cfg.pre_depth = parse_chain(p.at("depth"), "preprocess.depth");
    }

    if (!j.contains("descriptors") || !j.at("descriptors").is_array() ||
        j.at("descriptors").empty()) {
        throw InvalidArgument("config: non-empty 'descriptors' array is required");
    }
    for (const nlohmann::json& d : j.at("descriptors")) {
        DescriptorSpec spec;
        spec.name = require_str(d, "name", "descriptor");
        spec.modality = d.contains("modality") ? require_str(d, "modality", "descriptor") : "color";
        if (spec.modality != "color" && spec.modality != "depth") {
            throw InvalidArgument("config: descriptor modality must be 'color' or 'depth'");
        }
        for (auto it = d.begin(); it != d.end(); ++it) {
            if (it.key() == "name" || it.key() == "modality") continue;
            if (it.value().is_number()) {
                spec.params[it.key()] = it.value().get<double>();
            } else if (it.value().is_boolean()) {
                spec.params[it.key()] = it.value().get<bool>() ? 1.0 : 0.0;
            } else {
                throw InvalidArgument("config: descriptor '" + spec.name +
                                      "' has non-numeric parameter '" + it.key() + "'");
            }
        }
        cfg.descriptors.push_back(std::move(spec));
    }

    if (j.contains("selection")) {
        const nlohmann::json& s = j.at("selection");
        cfg.selection.method = require_str(s, "method", "selection");
        if (cfg.selection.method != "none" && cfg.selection.method != "lasso") {
            throw InvalidArgument("config: selection method must be 'none' or 'lasso'");
        }
        if (s.contains("k_folds")) cfg.selection.k_folds = static_cast<int>(require_num(s, "k_folds", "selection"));
    }

    if (j.contains("classifier")) {
        const nlohmann::json& c = j.at("classifier");
        cfg.classifier.name = require_str(c, "name", "classifier");
        for (auto it = c.begin(); it != c.end(); ++it) {
            if (it.key() == "name") continue;
            if (it.value().is_string()) {
                cfg.classifier.arg = it.value().get<std::string>();
            } else if (it.value().is_number()) {
                cfg.classifier.params[it.key()] = it.value().get<double>();
            } else {
                throw InvalidArgument("config: classifier parameter '" + it.key() +
                                      "' must be scalar");
            }
        }
    }

    if (j.contains("split")) {
        const nlohmann::json& s = j.at("split");
        cfg.split.type = require_str(s, "type", "split");
        if (cfg.split.type == "holdout") {
            if (s.contains("test_fraction")) {
                cfg.split.test_fraction = require_num(s, "test_fraction", "split");
            }
        } else if (cfg.split.type == "kfold") {
            if (s.contains("k")) cfg.split.k = static_cast<int>(require_num(s, "k", "split"));
        } else {
            throw InvalidArgument("config: split type must be 'holdout' or 'kfold'");
        }
    }
    return cfg;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("config file '" + path + "' not found");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

// --- ingest -----------------------------------------------------------------

namespace {

struct Pattern {
    std::string prefix, suffix;
};

Pattern parse_pattern(const std::string& p) {
    const std::size_t star = p.find('*');
    if (star == std::string::npos || p.find('*', star + 1) != std::string::npos) {
        throw InvalidArgument("pattern '" + p + "' must contain exactly one '*'");
    }
    return {p.substr(0, star), p.substr(star + 1)};
}

bool match_pattern(const Pattern& p, const std::string& name, std::string& stem) {
    if (name.size() < p.prefix.size() + p.suffix.size()) return false;
    if (name.compare(0, p.prefix.size(), p.prefix) != 0) return false;
    if (name.compare(name.size() - p.suffix.size(), p.suffix.size(), p.suffix) != 0) return false;
    stem = name.substr(p.prefix.size(), name.size() - p.prefix.size() - p.suffix.size());
    return true;
}

} // namespace

CorpusIndex ingest(const std::string& dir, const std::string& color_pattern,
                   const std::string& depth_pattern) {
    if (!fs::is_directory(dir)) throw NotFound("corpus directory '" + dir + "' not found");
    const Pattern cp = parse_pattern(color_pattern);
    const bool want_depth = !depth_pattern.empty();
    const Pattern dp = want_depth ? parse_pattern(depth_pattern) : Pattern{};

    std::vector<std::string> class_dirs;
    for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
        if (e.is_directory()) class_dirs.push_back(e.path().filename().string());
    }
    std::sort(class_dirs.begin(), class_dirs.end());

    CorpusIndex idx;
    std::vector<std::string> pairing_problems;
    for (const std::string& cls : class_dirs) {
        const fs::path cdir = fs::path(dir) / cls;
        std::vector<std::string> files;
        for (const fs::directory_entry& e : fs::directory_iterator(cdir)) {
            if (e.is_regular_file()) files.push_back(e.path().filename().string());
        }
        std::sort(files.begin(), files.end());
        const std::map<std::string, bool> file_set = [&] {
            std::map<std::string, bool> s;
            for (const std::string& f : files) s[f] = true;
            return s;
        }();

        std::vector<CorpusSample> class_samples;
        std::map<std::string, bool> color_stems;
        for (const std::string& f : files) {
            std::string stem;
            if (!match_pattern(cp, f, stem)) continue;
            color_stems[stem] = true;
            CorpusSample s;
            s.stem = stem;
            s.color_path = (cdir / f).string();
            if (want_depth) {
                const std::string df = dp.prefix + stem + dp.suffix;
                if (!file_set.count(df)) {
                    pairing_problems.push_back("missing depth file " + (cdir / df).string() +
                                               " for " + s.color_path);
                    continue;
                }
                s.depth_path = (cdir / df).string();
            }
            class_samples.push_back(std::move(s));
        }
        if (want_depth) {
            for (const std::string& f : files) {
                std::string stem;
                if (!match_pattern(dp, f, stem)) continue;
                if (!color_stems.count(stem)) {
                    pairing_problems.push_back("depth file " + (cdir / f).string() +
                                               " has no color partner");
                }
            }
        }
        if (!class_samples.empty()) {
            idx.class_names.push_back(cls);
            const int label = static_cast<int>(idx.class_names.size());
            for (CorpusSample& s : class_samples) {
                s.label = label;
                idx.samples.push_back(std::move(s));
            }
        }
    }
    if (!pairing_problems.empty()) {
        std::string msg = "modality pairing failed:";
        for (const std::string& p : pairing_problems) msg += "\n  " + p;
        throw PairingError(msg);
    }
    if (idx.samples.empty()) {
        throw EmptyCorpus("no files matched '" + color_pattern + "' under '" + dir + "'");
    }
    return idx;
}

// --- preprocessing ops --------------------------------------------------------

namespace {

GrayImage crop_clamped(const GrayImage& img, int x, int y, int w, int h) {
    const int x0 = std::clamp(x, 0, img.width - 1);
    const int y0 = std::clamp(y, 0, img.height - 1);
    const int x1 = std::clamp(x + w, x0 + 1, img.width);
    const int y1 = std::clamp(y + h, y0 + 1, img.height);
    GrayImage out(x1 - x0, y1 - y0);
    for (int yy = 0; yy < out.height; ++yy) {
        for (int xx = 0; xx < out.width; ++xx) out.at(xx, yy) = img.at(x0 + xx, y0 + yy);
    }
    return out;
}

double op_param(const PreprocOp& op, const char* key, double dflt) {
    const auto it = op.params.find(key);
    return it == op.params.end() ? dflt : it->second;
}

GrayImage apply_op(const PreprocOp& op, GrayImage img, std::uint64_t sample_seed) {
    if (op.name == "resize") {
        const int w = static_cast<int>(op_param(op, "width", 0));
        const int h = static_cast<int>(op_param(op, "height", 0));
        if (w < 1 || h < 1) throw InvalidArgument("resize op needs positive width and height");
        return resize_bilinear(img, w, h);
    }
    if (op.name == "adjust_contrast") {
        return adjust_contrast(img, op_param(op, "low", 0.01), op_param(op, "high", 0.99));
    }
    if (op.name == "stretch") {
        return stretch_window(img, op_param(op, "lo", 0.0), op_param(op, "hi", 1.0));
    }
    if (op.name == "equalize") return equalize_hist(img);
    if (op.name == "median") {
        return median_filter(img, static_cast<int>(op_param(op, "kw", 3)),
                             static_cast<int>(op_param(op, "kh", 3)));
    }
    if (op.name == "gaussian") return gaussian_blur(img, op_param(op, "sigma", 1.0));
    if (op.name == "unsharp_mask") {
        return unsharp_mask(img, op_param(op, "sigma", 1.0), op_param(op, "amount", 1.0));
    }
    if (op.name == "wiener") {
        return wiener_adaptive(img, static_cast<int>(op_param(op, "kw", 3)),
                               static_cast<int>(op_param(op, "kh", 3)));
    }
    if (op.name == "repair_black_spots") {
        return repair_black_spots(img, op_param(op, "threshold", 30.0 / 255.0),
                                  op_param(op, "replacement", 70.0 / 255.0));
    }
    if (op.name == "depth_face") {
        return extract_depth_face(img, static_cast<int>(op_param(op, "crop_half_width", 70)),
                                  op_param(op, "side_trim", 0.1));
    }
    if (op.name == "noise") {
        NoiseModel model;
        if (op.arg == "gaussian") {
            model = NoiseModel::gaussian;
        } else if (op.arg == "salt_pepper") {
            model = NoiseModel::salt_pepper;
        } else if (op.arg == "poisson") {
            model = NoiseModel::poisson;
        } else if (op.arg == "speckle") {
            model = NoiseModel::speckle;
        } else {
            throw InvalidArgument("noise op needs model gaussian|salt_pepper|poisson|speckle");
        }
        NoiseParams np;
        np.mean = op_param(op, "mean", 0.0);
        np.variance = op_param(op, "variance", model == NoiseModel::speckle ? 0.05 : 0.01);
        np.density = op_param(op, "density", 0.05);
        return add_noise(img, model, np, sample_seed);
    }
    if (op.name == "sharp_polished") {
        // Stand-in composition: sharpen then edge map (see report substitutions).
        const GrayImage sharp =
            unsharp_mask(img, op_param(op, "sigma", 1.0), op_param(op, "amount", 1.0));
        const BinaryImage e = edge(sharp, EdgeMethod::canny);
        GrayImage out(sharp.width, sharp.height);
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = e.data[i] ? 1.0 : 0.0;
        return out;
    }
    throw InvalidArgument("unknown preprocessing op '" + op.name + "'");
}

// --- descriptors ---------------------------------------------------------------

struct PreparedDescriptor {
    DescriptorSpec spec;
    GaborBank bank; // populated for gabor only
};

double desc_param(const DescriptorSpec& d, const char* key, double dflt) {
    const auto it = d.params.find(key);
    return it == d.params.end() ? dflt : it->second;
}

std::vector<PreparedDescriptor> prepare_descriptors(const PipelineConfig& cfg) {
    std::vector<PreparedDescriptor> out;
    for (const DescriptorSpec& d : cfg.descriptors) {
        PreparedDescriptor pd;
        pd.spec = d;
        if (d.name == "gabor") {
            pd.bank = gabor_bank(static_cast<int>(desc_param(d, "scales", 5)),
                                 static_cast<int>(desc_param(d, "orientations", 8)),
                                 static_cast<int>(desc_param(d, "rows", 39)),
                                 static_cast<int>(desc_param(d, "cols", 39)));
        } else if (d.name != "lbp" && d.name != "hog" && d.name != "lpq") {
            throw InvalidArgument("unknown descriptor '" + d.name + "'");
        }
        if (d.modality == "depth" && cfg.depth_pattern.empty()) {
            throw InvalidArgument("descriptor '" + d.name +
                                  "' needs the depth modality but no depth pattern is configured");
        }
        out.push_back(std::move(pd));
    }
    return out;
}

FeatureVector run_descriptor(const PreparedDescriptor& pd, const GrayImage& img) {
    const DescriptorSpec& d = pd.spec;
    if (d.name == "lbp") {
        return lbp_features(img, static_cast<int>(desc_param(d, "cell_w", 8)),
                            static_cast<int>(desc_param(d, "cell_h", 8)));
    }
    if (d.name == "hog") {
        return hog_features(img, static_cast<int>(desc_param(d, "cell_w", 8)),
                            static_cast<int>(desc_param(d, "cell_h", 8)));
    }
    if (d.name == "lpq") {
        return lpq_features(img, static_cast<int>(desc_param(d, "win_size", 3)),
                            desc_param(d, "decorr", 1) != 0.0,
                            static_cast<int>(desc_param(d, "freq_estim", 1)));
    }
    return gabor_features(img, pd.bank, static_cast<int>(desc_param(d, "d1", 8)),
                          static_cast<int>(desc_param(d, "d2", 8)));
}

// Optional per-stem crop boxes: CSV with header stem,x,y,w,h.
std::map<std::string, std::array<int, 4>> load_crop_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("crop sidecar '" + path + "' not found");
    std::map<std::string, std::array<int, 4>> boxes;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue; // header
        }
        std::istringstream ss(line);
        std::string stem, field;
        std::array<int, 4> box{};
        if (!std::getline(ss, stem, ',')) continue;
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ss, field, ',')) {
                throw InvalidArgument("crop sidecar row for '" + stem + "' needs stem,x,y,w,h");
            }
            box[i] = std::stoi(field);
        }
        boxes[stem] = box;
    }
    return boxes;
}

std::uint64_t sample_seed(std::uint64_t base, std::size_t i) {
    return base ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(i) + 1));
}

} // namespace

ExtractResult extract_features(const PipelineConfig& cfg, const CorpusIndex& index) {
    const std::vector<PreparedDescriptor> descs = prepare_descriptors(cfg);
    const std::size_t n = index.samples.size();
    const std::size_t nd = descs.size();

    std::map<std::string, std::array<int, 4>> boxes;
    if (!cfg.crop_sidecar.empty()) boxes = load_crop_sidecar(cfg.crop_sidecar);

    ExtractResult res;
    for (const PreprocOp& op : cfg.pre_color) {
        res.op_sequence.push_back("preprocess:color:" + op.name);
        if (op.name == "sharp_polished") {
            res.substitutions.push_back("sharp_polished=unsharp_mask+canny");
        }
    }
    for (const PreprocOp& op : cfg.pre_depth) {
        res.op_sequence.push_back("preprocess:depth:" + op.name);
        if (op.name == "sharp_polished") {
            res.substitutions.push_back("sharp_polished=unsharp_mask+canny");
        }
    }
    for (const PreparedDescriptor& pd : descs) {
        res.op_sequence.push_back("extract:" + pd.spec.name + ":" + pd.spec.modality);
    }

    // One sample -> one feature row per descriptor block.
    auto process = [&](std::size_t i, std::vector<std::vector<double>>& rows) {
        const CorpusSample& s = index.samples[i];
        const std::uint64_t sseed = sample_seed(cfg.seed, i);

        const AnyImage any = load_image(s.color_path);
        GrayImage color = any.is_gray ? any.gray : to_gray(any.rgb);
        GrayImage depth;
        const bool have_depth = !s.depth_path.empty();
        if (have_depth) depth = load_gray(s.depth_path);

        const auto box = boxes.find(s.stem);
        if (box != boxes.end()) {
            const auto& b = box->second;
            color = crop_clamped(color, b[0], b[1], b[2], b[3]);
            if (have_depth) depth = crop_clamped(depth, b[0], b[1], b[2], b[3]);
        }
        for (const PreprocOp& op : cfg.pre_color) color = apply_op(op, std::move(color), sseed);
        if (have_depth) {
            for (const PreprocOp& op : cfg.pre_depth) depth = apply_op(op, std::move(depth), sseed);
        }

        rows.resize(nd);
        for (std::size_t d = 0; d < nd; ++d) {
            const GrayImage& src = descs[d].spec.modality == "depth" ? depth : color;
            rows[d] = run_descriptor(descs[d], src).values;
        }
    };

    // First sample sizes the blocks.
    std::vector<std::vector<double>> first_rows;
    process(0, first_rows);
    std::vector<FeatureMatrix> blocks(nd);
    for (std::size_t d = 0; d < nd; ++d) {
        blocks[d].rows = static_cast<int>(n);
        blocks[d].cols = static_cast<int>(first_rows[d].size());
        if (blocks[d].cols == 0) {
            throw ShapeError("descriptor '" + descs[d].spec.name + "' produced no features");
        }
        blocks[d].data.assign(static_cast<std::size_t>(blocks[d].rows) * blocks[d].cols, 0.0);
        std::copy(first_rows[d].begin(), first_rows[d].end(), blocks[d].data.begin());
    }

    // Remaining samples on a small worker pool; each writes its own row, so
    // scheduling order cannot change the result.
    std::atomic<std::size_t> next{1};
    std::vector<std::string> errors(n);
    std::vector<int> error_codes(n, 0);
    auto worker = [&] {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                process(i, rows);
                for (std::size_t d = 0; d < nd; ++d) {
                    if (static_cast<int>(rows[d].size()) != blocks[d].cols) {
                        throw ShapeError("sample '" + index.samples[i].stem + "': descriptor '" +
                                         descs[d].spec.name + "' produced " +
                                         std::to_string(rows[d].size()) + " values, expected " +
                                         std::to_string(blocks[d].cols) +
                                         " (add a resize op so all images share dimensions)");
                    }
                    std::copy(rows[d].begin(), rows[d].end(),
                              blocks[d].data.begin() + i * static_cast<std::size_t>(blocks[d].cols));
                }
            } catch (const Error& e) {
                errors[i] = e.what();
                error_codes[i] = e.exit_code();
            } catch (const std::exception& e) {
                errors[i] = e.what();
                error_codes[i] = 3;
            }
        }
    };
    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned n_workers = std::min<unsigned>(4, std::max(1u, hw));
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            // first failing sample wins, independent of thread timing
            if (error_codes[i] == 2) throw InvalidArgument(errors[i]);
            if (error_codes[i] == 4) throw ConvergenceError(errors[i]);
            throw Error(errors[i]);
        }
    }

    int col = 0;
    for (std::size_t d = 0; d < nd; ++d) {
        res.blocks.emplace_back(col, blocks[d].cols);
        res.block_names.push_back(descs[d].spec.name + "_" + descs[d].spec.modality);
        col += blocks[d].cols;
    }
    res.features = stack_features(blocks);
    res.features.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.features.labels[i] = index.samples[i].label;
    return res;
}

// --- full run -----------------------------------------------------------------

namespace {

FeatureMatrix slice_block(const FeatureMatrix& all, int first, int width) {
    FeatureMatrix out;
    out.rows = all.rows;
    out.cols = width;
    out.data.resize(static_cast<std::size_t>(out.rows) * width);
    for (int r = 0; r < all.rows; ++r) {
        for (int c = 0; c < width; ++c) {
            out.data[static_cast<std::size_t>(r) * width + c] = all.at(r, first + c);
        }
    }
    return out;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace

TrainedModel train_classifier(const ClassifierSpec& spec, const LabeledDataset& ds,
                              std::uint64_t seed) {
    auto P = [&](const char* k, double dflt) {
        const auto it = spec.params.find(k);
        return it == spec.params.end() ? dflt : it->second;
    };
    if (spec.name == "knn") return train_knn(ds, static_cast<int>(P("k", 5)));
    if (spec.name == "gnb") return train_gnb(ds);
    if (spec.name == "cart") {
        return train_cart(ds, static_cast<int>(P("max_depth", 10)),
                          static_cast<int>(P("min_leaf", 1)));
    }
    if (spec.name == "lda") return train_lda(ds, P("ridge", 1e-6));
    if (spec.name == "mlp") {
        MlpParams mp;
        mp.hidden = static_cast<int>(P("hidden", 10));
        mp.trainer = spec.arg.empty() ? "rprop" : spec.arg;
        mp.lr = P("lr", 0.01);
        mp.epochs = static_cast<int>(P("epochs", 1000));
        mp.train_frac = P("train_frac", 1.0);
        mp.val_frac = P("val_frac", 0.0);
        mp.test_frac = P("test_frac", 0.0);
        return mlp_train(ds, mp, seed);
    }
    throw InvalidArgument("unknown classifier '" + spec.name + "'");
}

RunReport run_pipeline(const PipelineConfig& cfg) {
    std::vector<fs::path> written;
    auto cleanup = [&] {
        for (const fs::path& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    };
    const fs::path out_dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    RunReport report;
    nlohmann::json timings = nlohmann::json::object();
    const Timer total_timer;
    try {
        // ingest
        CorpusIndex index;
        {
            const Timer t;
            try {
                index = ingest(cfg.input_dir, cfg.color_pattern, cfg.depth_pattern);
            } catch (const Error& e) {
                throw StageError("ingest", e);
            }
            timings["ingest"] = t.ms();
            report.op_sequence.push_back("ingest");
        }

        // preprocess + extract
        ExtractResult ex;
        {
            const Timer t;
            try {
                ex = extract_features(cfg, index);
            } catch (const Error& e) {
                throw StageError("features", e);
            }
            timings["features"] = t.ms();
            for (const std::string& s : ex.op_sequence) report.op_sequence.push_back(s);
        }

        // per-block selection
        FeatureMatrix final_features;
        const int raw_cols = ex.features.cols;
        {
            const Timer t;
            try {
                if (cfg.selection.method == "lasso") {
                    std::vector<double> y(ex.features.labels.begin(), ex.features.labels.end());
                    std::vector<FeatureMatrix> kept;
                    for (std::size_t b = 0; b < ex.blocks.size(); ++b) {
                        FeatureMatrix block =
                            slice_block(ex.features, ex.blocks[b].first, ex.blocks[b].second);
                        const LassoFit fit =
                            lasso_cv(block, y, cfg.selection.k_folds, cfg.seed);
                        kept.push_back(apply_selection(block, fit));
                        report.op_sequence.push_back("select:lasso:" + ex.block_names[b]);
                    }
                    final_features = stack_features(kept);
                    final_features.labels = ex.features.labels;
                } else {
                    final_features = std::move(ex.features);
                }
            } catch (const Error& e) {
                throw StageError("select", e);
            }
            timings["select"] = t.ms();
        }
        report.op_sequence.push_back("stack");

        const fs::path features_path = out_dir / "features.csv";
        try {
            save_csv(final_features, features_path.string());
            written.push_back(features_path);
        } catch (const Error& e) {
            throw StageError("write", e);
        }

        // split + train + eval
        LabeledDataset ds;
        TrainedModel model;
        std::vector<int> eval_rows;
        std::vector<int> y_pred;
        FeatureMatrix eval_scores;
        {
            const Timer t;
            try {
                ds = make_dataset(final_features);
                report.op_sequence.push_back("split:" + cfg.split.type);
                if (cfg.split.type == "holdout") {
                    const Partition part = holdout_split(ds, cfg.split.test_fraction, cfg.seed);
                    const LabeledDataset train_ds = ds.subset(part.train);
                    model = train_classifier(cfg.classifier, train_ds, cfg.seed);
                    eval_rows = part.test;
                    const LabeledDataset test_ds = ds.subset(part.test);
                    eval_scores = predict_scores(model, test_ds.X.data(), test_ds.rows, test_ds.cols);
                    y_pred = predict(model, test_ds);
                } else {
                    const Partition part = kfold_split(ds, cfg.split.k, cfg.seed);
                    eval_scores.rows = 0;
                    eval_scores.cols = ds.num_classes;
                    for (const std::vector<int>& fold : part.folds) {
                        std::vector<char> in_fold(ds.rows, 0);
                        for (int i : fold) in_fold[i] = 1;
                        std::vector<int> tr;
                        for (int i = 0; i < ds.rows; ++i) {
                            if (!in_fold[i]) tr.push_back(i);
                        }
                        const TrainedModel fold_model =
                            train_classifier(cfg.classifier, ds.subset(tr), cfg.seed);
                        const LabeledDataset fold_ds = ds.subset(fold);
                        const FeatureMatrix s =
                            predict_scores(fold_model, fold_ds.X.data(), fold_ds.rows, fold_ds.cols);
                        const std::vector<int> p = predict(fold_model, fold_ds);
                        for (std::size_t r = 0; r < fold.size(); ++r) {
                            eval_rows.push_back(fold[r]);
                            y_pred.push_back(p[r]);
                        }
                        eval_scores.data.insert(eval_scores.data.end(), s.data.begin(), s.data.end());
                        eval_scores.rows += s.rows;
                    }
                    model = train_classifier(cfg.classifier, ds, cfg.seed);
                }
                report.op_sequence.push_back("train:" + cfg.classifier.name);
            } catch (const Error& e) {
                throw StageError("train", e);
            }
            timings["train"] = t.ms();
        }

        nlohmann::json roc_files = nlohmann::json::array();
        nlohmann::json roc_skipped = nlohmann::json::array();
        {
            const Timer t;
            try {
                std::vector<int> y_true;
                for (int i : eval_rows) y_true.push_back(ds.y[i]);
                report.cm = confusion(y_true, y_pred, ds.num_classes);
                report.accuracy = report.cm.accuracy();
                report.op_sequence.push_back("eval");

                for (int c = 1; c <= ds.num_classes; ++c) {
                    std::vector<double> sc(eval_scores.rows);
                    std::vector<int> bin(eval_scores.rows);
                    bool pos = false, neg = false;
                    for (int r = 0; r < eval_scores.rows; ++r) {
                        sc[r] = eval_scores.at(r, c - 1);
                        bin[r] = y_true[r] == c ? 1 : 0;
                        (bin[r] ? pos : neg) = true;
                    }
                    if (!pos || !neg) {
                        roc_skipped.push_back(c);
                        continue;
                    }
                    const std::vector<std::pair<double, double>> pts = roc_points(sc, bin);
                    CurveSeries curve;
                    curve.x_name = "fpr";
                    curve.y_name = "tpr";
                    for (const auto& [x, y] : pts) {
                        curve.x.push_back(x);
                        curve.y.push_back(y);
                    }
                    const fs::path roc_path = out_dir / ("roc_class_" + std::to_string(c) + ".csv");
                    save_curve(curve, roc_path.string());
                    written.push_back(roc_path);
                    roc_files.push_back(roc_path.filename().string());
                }
            } catch (const Error& e) {
                throw StageError("eval", e);
            }
            timings["eval"] = t.ms();
        }

        // remaining outputs
        try {
            const fs::path model_path = out_dir / "model.json";
            {
                std::ofstream mo(model_path, std::ios::binary);
                if (!mo) throw WriteError("cannot write '" + model_path.string() + "'");
                mo << model.to_json() << "\n";
            }
            written.push_back(model_path);

            const fs::path conf_path = out_dir / "confusion.csv";
            {
                std::ofstream co(conf_path, std::ios::binary);
                if (!co) throw WriteError("cannot write '" + conf_path.string() + "'");
                co << "true_class";
                for (int c = 1; c <= report.cm.num_classes; ++c) co << ",pred_" << c;
                co << "\n";
                for (int tr = 0; tr < report.cm.num_classes; ++tr) {
                    co << (tr + 1);
                    for (int pr = 0; pr < report.cm.num_classes; ++pr) {
                        co << "," << report.cm.at(tr, pr);
                    }
                    co << "\n";
                }
            }
            written.push_back(conf_path);

            nlohmann::json rj;
            rj["schema_version"] = kReportSchemaVersion;
            rj["library_version"] = kLibraryVersion;
            rj["seed"] = cfg.seed;
            rj["num_samples"] = ds.rows;
            rj["num_classes"] = ds.num_classes;
            rj["class_names"] = index.class_names;
            rj["num_features_raw"] = raw_cols;
            rj["num_features_selected"] = final_features.cols;
            rj["accuracy"] = report.accuracy;
            rj["per_class_precision"] = report.cm.precision();
            rj["per_class_recall"] = report.cm.recall();
            nlohmann::json cm_rows = nlohmann::json::array();
            for (int tr = 0; tr < report.cm.num_classes; ++tr) {
                nlohmann::json row = nlohmann::json::array();
                for (int pr = 0; pr < report.cm.num_classes; ++pr) row.push_back(report.cm.at(tr, pr));
                cm_rows.push_back(std::move(row));
            }
            rj["confusion"] = std::move(cm_rows);
            rj["op_sequence"] = report.op_sequence;
            rj["substitutions"] = ex.substitutions;
            rj["roc_files"] = roc_files;
            rj["roc_skipped_classes"] = roc_skipped;
            timings["total"] = total_timer.ms();
            rj["timings_ms"] = timings;
            try {
                rj["config"] = nlohmann::json::parse(cfg.raw_json.empty() ? "{}" : cfg.raw_json);
            } catch (const nlohmann::json::exception&) {
                rj["config"] = nullptr;
            }
            nlohmann::json outputs = nlohmann::json::array();
            outputs.push_back("features.csv");
            outputs.push_back("model.json");
            outputs.push_back("confusion.csv");
            for (const nlohmann::json& f : roc_files) outputs.push_back(f);
            outputs.push_back("report.json");
            rj["outputs"] = outputs;
            for (const nlohmann::json& o : outputs) report.outputs.push_back(o.get<std::string>());

            report.report_json = rj.dump(2);
            const fs::path report_path = out_dir / "report.json";
            {
                std::ofstream ro(report_path, std::ios::binary);
                if (!ro) throw WriteError("cannot write '" + report_path.string() + "'");
                ro << report.report_json << "\n";
            }
            written.push_back(report_path);
        } catch (const Error& e) {
            throw StageError("write", e);
        }
    } catch (...) {
        cleanup();
        throw;
    }
    return report;
}

} // namespace fer
