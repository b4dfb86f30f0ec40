#include "fer/error.hpp"
#include "fer/image.hpp"
#include "fer/pipeline.hpp"

#include "helpers.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

using namespace fer;
namespace fs = std::filesystem;

namespace {

// Class 0 is a vertical step, class 1 a horizontal one; idx shifts the levels
// so samples differ while classes stay far apart.
GrayImage sample_image(int cls, int idx, int w = 16, int h = 16) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool hi = cls == 0 ? (x >= w / 2) : (y >= h / 2);
            const double base = hi ? 0.8 : 0.2;
            const double ripple = 0.05 * std::sin(0.9 * x + 0.7 * y + idx);
            img.at(x, y) = base + 0.01 * idx + ripple;
        }
    }
    return img;
}

// Writes <root>/<class>/color_sNN.pgm (and depth_sNN.pgm when asked).
void write_corpus(const fs::path& root, int per_class, bool with_depth, int w = 16, int h = 16) {
    const char* names[2] = {"a", "b"};
    for (int c = 0; c < 2; ++c) {
        const fs::path dir = root / names[c];
        fs::create_directories(dir);
        for (int i = 0; i < per_class; ++i) {
            char stem[8];
            std::snprintf(stem, sizeof stem, "s%02d", i);
            save_image(sample_image(c, i, w, h), (dir / ("color_" + std::string(stem) + ".pgm")).string());
            if (with_depth) {
                save_image(sample_image(c, i + 40, w, h),
                           (dir / ("depth_" + std::string(stem) + ".pgm")).string());
            }
        }
    }
}

nlohmann::json base_config(const std::string& input_dir, const std::string& out_dir) {
    nlohmann::json j;
    j["input_dir"] = input_dir;
    j["patterns"]["color"] = "color_*.pgm";
    j["seed"] = 9;
    j["output_dir"] = out_dir;
    j["descriptors"] = nlohmann::json::array({{{"name", "lbp"}, {"cell_w", 8}, {"cell_h", 8}}});
    j["classifier"] = {{"name", "knn"}, {"k", 3}};
    j["split"] = {{"type", "holdout"}, {"test_fraction", 0.5}};
    return j;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config parsing fills defaults and validates structure") {
    const std::string minimal = R"({
        "input_dir": "corpus",
        "patterns": {"color": "c_*.png"},
        "seed": 3,
        "descriptors": [{"name": "hog"}]
    })";
    const PipelineConfig cfg = PipelineConfig::from_json(minimal);
    CHECK(cfg.input_dir == "corpus");
    CHECK(cfg.color_pattern == "c_*.png");
    CHECK(cfg.depth_pattern.empty());
    CHECK(cfg.seed == 3);
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.selection.method == "none");
    CHECK(cfg.classifier.name == "knn");
    CHECK(cfg.split.type == "holdout");
    CHECK(cfg.split.test_fraction == 0.3);
    REQUIRE(cfg.descriptors.size() == 1);
    CHECK(cfg.descriptors[0].modality == "color");

    const std::string full = R"({
        "input_dir": "d",
        "patterns": {"color": "c_*.png", "depth": "d_*.png"},
        "seed": 11,
        "output_dir": "results",
        "crop_sidecar": "boxes.csv",
        "preprocess": {
            "color": [{"op": "median", "kw": 5, "kh": 3}],
            "depth": [{"op": "noise", "model": "gaussian", "variance": 0.01}]
        },
        "descriptors": [
            {"name": "lpq", "modality": "depth", "win_size": 5, "decorr": true},
            {"name": "gabor", "scales": 2, "orientations": 4, "rows": 13, "cols": 13}
        ],
        "selection": {"method": "lasso", "k_folds": 4},
        "classifier": {"name": "mlp", "trainer": "gd", "hidden": 6, "epochs": 50},
        "split": {"type": "kfold", "k": 3}
    })";
    const PipelineConfig f = PipelineConfig::from_json(full);
    CHECK(f.depth_pattern == "d_*.png");
    CHECK(f.crop_sidecar == "boxes.csv");
    REQUIRE(f.pre_color.size() == 1);
    CHECK(f.pre_color[0].name == "median");
    CHECK(f.pre_color[0].params.at("kw") == 5.0);
    REQUIRE(f.pre_depth.size() == 1);
    CHECK(f.pre_depth[0].arg == "gaussian");
    REQUIRE(f.descriptors.size() == 2);
    CHECK(f.descriptors[0].modality == "depth");
    CHECK(f.descriptors[0].params.at("win_size") == 5.0);
    CHECK(f.descriptors[0].params.at("decorr") == 1.0);
    CHECK(f.selection.method == "lasso");
    CHECK(f.selection.k_folds == 4);
    CHECK(f.classifier.name == "mlp");
    CHECK(f.classifier.arg == "gd");
    CHECK(f.classifier.params.at("hidden") == 6.0);
    CHECK(f.split.type == "kfold");
    CHECK(f.split.k == 3);
}

TEST_CASE("config parsing rejects malformed documents") {
    CHECK_THROWS_AS(PipelineConfig::from_json("not json"), InvalidArgument);
    CHECK_THROWS_AS(PipelineConfig::from_json("{}"), InvalidArgument);

    nlohmann::json ok = base_config("d", "o");

    nlohmann::json j = ok;
    j.erase("patterns");
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);

    j = ok;
    j.erase("seed");
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);
    j["seed"] = "seven";
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);
    j["seed"] = 1.5;
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);

    j = ok;
    j["descriptors"] = nlohmann::json::array();
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);

    j = ok;
    j["descriptors"][0]["modality"] = "thermal";
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);

    j = ok;
    j["descriptors"][0]["cell_w"] = "eight";
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);

    j = ok;
    j["selection"] = {{"method", "pca"}};
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);

    j = ok;
    j["split"] = {{"type", "loocv"}};
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);

    j = ok;
    j["preprocess"] = {{"color", {{{"kw", 3}}}}}; // op missing its name
    CHECK_THROWS_AS(PipelineConfig::from_json(j.dump()), InvalidArgument);

    CHECK_THROWS_AS(PipelineConfig::from_json_file("/nonexistent/config.json"), InvalidArgument);
}

TEST_CASE("ingest labels sorted class folders and pairs modalities") {
    testutil::TempDir td("ingest");
    write_corpus(td.path(), 3, true);

    const CorpusIndex idx = ingest(td.path().string(), "color_*.pgm", "depth_*.pgm");
    REQUIRE(idx.samples.size() == 6);
    CHECK(idx.class_names == std::vector<std::string>{"a", "b"});
    CHECK(idx.samples[0].stem == "s00");
    CHECK(idx.samples[0].label == 1);
    CHECK(idx.samples[3].label == 2);
    for (const CorpusSample& s : idx.samples) {
        CHECK(fs::exists(s.color_path));
        CHECK(fs::exists(s.depth_path));
    }

    const CorpusIndex again = ingest(td.path().string(), "color_*.pgm", "depth_*.pgm");
    for (std::size_t i = 0; i < idx.samples.size(); ++i) {
        CHECK(again.samples[i].color_path == idx.samples[i].color_path);
        CHECK(again.samples[i].label == idx.samples[i].label);
    }

    // Color-only ingestion leaves depth paths empty.
    const CorpusIndex co = ingest(td.path().string(), "color_*.pgm");
    REQUIRE(co.samples.size() == 6);
    CHECK(co.samples[0].depth_path.empty());

    CHECK_THROWS_AS(ingest(td.path().string(), "color_%.pgm"), InvalidArgument);
    CHECK_THROWS_AS(ingest(td.path().string(), "c*lor_*.pgm"), InvalidArgument);
    CHECK_THROWS_AS(ingest((td.path() / "missing").string(), "color_*.pgm"), NotFound);
    CHECK_THROWS_AS(ingest(td.path().string(), "thermal_*.pgm"), EmptyCorpus);
}

TEST_CASE("ingest reports broken modality pairs by name") {
    testutil::TempDir td("pairs");
    write_corpus(td.path(), 2, true);
    fs::remove(td.path() / "a" / "depth_s01.pgm");

    try {
        ingest(td.path().string(), "color_*.pgm", "depth_*.pgm");
        FAIL("expected PairingError");
    } catch (const PairingError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("depth_s01.pgm") != std::string::npos);
        CHECK(msg.find("color_s01.pgm") != std::string::npos);
    }

    // An orphaned depth file is reported from the other direction.
    save_image(sample_image(0, 0), (td.path() / "a" / "depth_s01.pgm").string());
    save_image(sample_image(0, 9), (td.path() / "b" / "depth_s99.pgm").string());
    try {
        ingest(td.path().string(), "color_*.pgm", "depth_*.pgm");
        FAIL("expected PairingError");
    } catch (const PairingError& e) {
        CHECK(std::string(e.what()).find("depth_s99.pgm") != std::string::npos);
        CHECK(std::string(e.what()).find("no color partner") != std::string::npos);
    }
}

TEST_CASE("extraction stacks descriptor blocks with labels") {
    testutil::TempDir td("extract");
    write_corpus(td.path(), 2, true);

    nlohmann::json j = base_config(td.path().string(), (td.path() / "out").string());
    j["patterns"]["depth"] = "depth_*.pgm";
    j["preprocess"]["color"] = nlohmann::json::array({{{"op", "median"}, {"kw", 3}, {"kh", 3}}});
    j["descriptors"] = nlohmann::json::array({
        {{"name", "lbp"}, {"cell_w", 8}, {"cell_h", 8}},
        {{"name", "hog"}, {"cell_w", 8}, {"cell_h", 8}, {"modality", "depth"}},
    });
    const PipelineConfig cfg = PipelineConfig::from_json(j.dump());
    const CorpusIndex idx = ingest(cfg.input_dir, cfg.color_pattern, cfg.depth_pattern);

    const ExtractResult ex = extract_features(cfg, idx);
    CHECK(ex.features.rows == 4);
    CHECK(ex.features.cols == 4 * 59 + 36); // lbp 2x2 cells + hog single block
    CHECK(ex.features.labels == std::vector<int>{1, 1, 2, 2});
    REQUIRE(ex.blocks.size() == 2);
    CHECK(ex.blocks[0] == std::pair<int, int>{0, 236});
    CHECK(ex.blocks[1] == std::pair<int, int>{236, 36});
    CHECK(ex.block_names == std::vector<std::string>{"lbp_color", "hog_depth"});
    CHECK(ex.op_sequence == std::vector<std::string>{"preprocess:color:median",
                                                     "extract:lbp:color", "extract:hog:depth"});
    CHECK(ex.substitutions.empty());

    // Depth descriptors demand a depth pattern.
    nlohmann::json j2 = base_config(td.path().string(), "o");
    j2["descriptors"] = nlohmann::json::array({{{"name", "lbp"}, {"modality", "depth"}}});
    const PipelineConfig bad = PipelineConfig::from_json(j2.dump());
    CHECK_THROWS_AS(extract_features(bad, ingest(bad.input_dir, bad.color_pattern)),
                    InvalidArgument);
}

TEST_CASE("extraction is deterministic even with seeded noise ops") {
    testutil::TempDir td("noise");
    write_corpus(td.path(), 6, false);

    nlohmann::json j = base_config(td.path().string(), "o");
    j["preprocess"]["color"] = nlohmann::json::array(
        {{{"op", "noise"}, {"model", "gaussian"}, {"variance", 0.001}}});
    const PipelineConfig cfg = PipelineConfig::from_json(j.dump());
    const CorpusIndex idx = ingest(cfg.input_dir, cfg.color_pattern);

    const ExtractResult a = extract_features(cfg, idx);
    const ExtractResult b = extract_features(cfg, idx);
    CHECK(a.features.data == b.features.data);

    // Different rows see different noise streams.
    bool rows_differ = false;
    for (int c = 0; c < a.features.cols && !rows_differ; ++c) {
        rows_differ = a.features.at(0, c) != a.features.at(1, c);
    }
    CHECK(rows_differ);
}

TEST_CASE("mixed image sizes need an explicit resize op") {
    testutil::TempDir td("sizes");
    fs::create_directories(td.path() / "a");
    fs::create_directories(td.path() / "b");
    save_image(sample_image(0, 0, 16, 16), (td.path() / "a" / "color_s00.pgm").string());
    save_image(sample_image(0, 1, 24, 24), (td.path() / "a" / "color_s01.pgm").string());
    save_image(sample_image(1, 0, 16, 16), (td.path() / "b" / "color_s00.pgm").string());

    nlohmann::json j = base_config(td.path().string(), "o");
    const PipelineConfig cfg = PipelineConfig::from_json(j.dump());
    const CorpusIndex idx = ingest(cfg.input_dir, cfg.color_pattern);
    try {
        extract_features(cfg, idx);
        FAIL("expected a shape failure");
    } catch (const Error& e) {
        CHECK(e.exit_code() == 3);
        CHECK(std::string(e.what()).find("add a resize op") != std::string::npos);
    }

    j["preprocess"]["color"] =
        nlohmann::json::array({{{"op", "resize"}, {"width", 16}, {"height", 16}}});
    const PipelineConfig fixed = PipelineConfig::from_json(j.dump());
    const ExtractResult ex = extract_features(fixed, idx);
    CHECK(ex.features.rows == 3);
}

TEST_CASE("crop sidecar boxes match explicit pre-cropping") {
    testutil::TempDir td("crop");
    const fs::path big = td.path() / "big";
    const fs::path pre = td.path() / "pre";
    for (int c = 0; c < 2; ++c) {
        const std::string cls = c == 0 ? "a" : "b";
        fs::create_directories(big / cls);
        fs::create_directories(pre / cls);
        for (int i = 0; i < 2; ++i) {
            const GrayImage full = sample_image(c, i, 20, 20);
            GrayImage crop(16, 16);
            for (int y = 0; y < 16; ++y) {
                for (int x = 0; x < 16; ++x) crop.at(x, y) = full.at(x + 2, y + 2);
            }
            char stem[8];
            std::snprintf(stem, sizeof stem, "s%02d", i);
            save_image(full, (big / cls / ("color_" + std::string(stem) + ".pgm")).string());
            save_image(crop, (pre / cls / ("color_" + std::string(stem) + ".pgm")).string());
        }
    }
    const fs::path sidecar = td.path() / "boxes.csv";
    {
        std::ofstream out(sidecar);
        out << "stem,x,y,w,h\n";
        out << "s00,2,2,16,16\n";
        out << "s01,2,2,16,16\n";
    }

    nlohmann::json jb = base_config(big.string(), "o");
    jb["crop_sidecar"] = sidecar.string();
    const PipelineConfig cb = PipelineConfig::from_json(jb.dump());
    const ExtractResult eb =
        extract_features(cb, ingest(cb.input_dir, cb.color_pattern));

    nlohmann::json jp = base_config(pre.string(), "o");
    const PipelineConfig cp = PipelineConfig::from_json(jp.dump());
    const ExtractResult ep =
        extract_features(cp, ingest(cp.input_dir, cp.color_pattern));

    CHECK(eb.features.data == ep.features.data);

    // Bad sidecar rows and missing files are rejected.
    nlohmann::json jm = jb;
    jm["crop_sidecar"] = (td.path() / "missing.csv").string();
    const PipelineConfig cm = PipelineConfig::from_json(jm.dump());
    CHECK_THROWS_AS(extract_features(cm, ingest(cm.input_dir, cm.color_pattern)), NotFound);

    {
        std::ofstream out(sidecar, std::ios::trunc);
        out << "stem,x,y,w,h\n";
        out << "s00,2,2\n";
    }
    CHECK_THROWS_AS(extract_features(cb, ingest(cb.input_dir, cb.color_pattern)),
                    InvalidArgument);
}

TEST_CASE("stand-in preprocessing ops are reported as substitutions") {
    testutil::TempDir td("subst");
    write_corpus(td.path(), 2, false);
    nlohmann::json j = base_config(td.path().string(), "o");
    j["preprocess"]["color"] = nlohmann::json::array({{{"op", "sharp_polished"}}});
    const PipelineConfig cfg = PipelineConfig::from_json(j.dump());
    const ExtractResult ex = extract_features(cfg, ingest(cfg.input_dir, cfg.color_pattern));
    REQUIRE(ex.substitutions.size() == 1);
    CHECK(ex.substitutions[0] == "sharp_polished=unsharp_mask+canny");
    CHECK(ex.op_sequence.front() == "preprocess:color:sharp_polished");
}

TEST_CASE("classifier dispatch honours the configured parameters") {
    testutil::TempDir td("clf");
    write_corpus(td.path(), 4, false);
    nlohmann::json j = base_config(td.path().string(), "o");
    const PipelineConfig cfg = PipelineConfig::from_json(j.dump());
    const ExtractResult ex = extract_features(cfg, ingest(cfg.input_dir, cfg.color_pattern));
    const LabeledDataset ds = make_dataset(ex.features);

    ClassifierSpec spec;
    spec.name = "knn";
    spec.params["k"] = 2;
    CHECK(train_classifier(spec, ds, 1).knn_k == 2);
    spec = ClassifierSpec{};
    spec.name = "gnb";
    CHECK(train_classifier(spec, ds, 1).kind == "gnb");
    spec.name = "cart";
    spec.params["max_depth"] = 2;
    CHECK(train_classifier(spec, ds, 1).kind == "cart");
    spec = ClassifierSpec{};
    spec.name = "lda";
    CHECK(train_classifier(spec, ds, 1).kind == "lda");
    spec = ClassifierSpec{};
    spec.name = "mlp";
    spec.arg = "gd";
    spec.params["hidden"] = 3;
    spec.params["epochs"] = 10;
    const TrainedModel mlp = train_classifier(spec, ds, 1);
    CHECK(mlp.kind == "mlp");
    CHECK(mlp.mlp_hidden == 3);
    spec = ClassifierSpec{};
    spec.name = "svm";
    CHECK_THROWS_AS(train_classifier(spec, ds, 1), InvalidArgument);
}

TEST_CASE("full run writes the documented artifacts") {
    testutil::TempDir td("run");
    write_corpus(td.path(), 6, false);
    const fs::path out = td.path() / "out";

    const nlohmann::json j = base_config(td.path().string(), out.string());
    const PipelineConfig cfg = PipelineConfig::from_json(j.dump());
    const RunReport rep = run_pipeline(cfg);

    for (const char* f : {"features.csv", "model.json", "confusion.csv", "report.json"}) {
        CHECK(fs::exists(out / f));
    }
    const nlohmann::json rj = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(rj.at("schema_version") == 1);
    CHECK(rj.at("library_version") == std::string(kLibraryVersion));
    CHECK(rj.at("seed") == 9);
    CHECK(rj.at("num_samples") == 12);
    CHECK(rj.at("num_classes") == 2);
    CHECK(rj.at("class_names") == nlohmann::json({"a", "b"}));
    CHECK(rj.at("num_features_raw") == 236);
    CHECK(rj.at("num_features_selected") == 236);
    CHECK(rj.at("accuracy") == rep.accuracy);
    CHECK(rj.at("config").at("seed") == 9);

    // Confusion row sums equal the per-class test counts of the same split.
    const FeatureMatrix fm = load_csv((out / "features.csv").string());
    const LabeledDataset ds = make_dataset(fm);
    const Partition part = holdout_split(ds, cfg.split.test_fraction, cfg.seed);
    std::map<int, long> want;
    for (int i : part.test) ++want[ds.y[i]];
    for (int c = 1; c <= 2; ++c) {
        long row = 0;
        for (int p = 1; p <= 2; ++p) row += rep.cm.at(c - 1, p - 1);
        CHECK(row == want[c]);
    }
    CHECK(rep.cm.total() == 6);

    const std::vector<std::string> expect_ops = {"ingest",        "extract:lbp:color",
                                                 "stack",         "split:holdout",
                                                 "train:knn",     "eval"};
    CHECK(rep.op_sequence == expect_ops);
    CHECK(rj.at("op_sequence").get<std::vector<std::string>>() == expect_ops);

    // Every advertised output exists on disk.
    for (const std::string& f : rep.outputs) CHECK(fs::exists(out / f));
    for (const auto& f : rj.at("roc_files")) CHECK(fs::exists(out / f.get<std::string>()));

    // The model round-trips from its serialized form.
    const TrainedModel model = TrainedModel::from_json(slurp(out / "model.json"));
    CHECK(model.kind == "knn");
    CHECK(model.num_features == 236);

    // Same-seed reruns produce byte-identical features.
    const fs::path out2 = td.path() / "out2";
    nlohmann::json j2 = j;
    j2["output_dir"] = out2.string();
    run_pipeline(PipelineConfig::from_json(j2.dump()));
    CHECK(slurp(out / "features.csv") == slurp(out2 / "features.csv"));
}

TEST_CASE("kfold evaluation covers every sample") {
    testutil::TempDir td("kfold");
    write_corpus(td.path(), 5, false);
    const fs::path out = td.path() / "out";
    nlohmann::json j = base_config(td.path().string(), out.string());
    j["split"] = {{"type", "kfold"}, {"k", 3}};
    const RunReport rep = run_pipeline(PipelineConfig::from_json(j.dump()));
    CHECK(rep.cm.total() == 10);
    CHECK(rep.op_sequence[3] == "split:kfold");
    CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("per-block selection shrinks the feature matrix") {
    testutil::TempDir td("lasso");
    write_corpus(td.path(), 6, false);
    const fs::path out = td.path() / "out";
    nlohmann::json j = base_config(td.path().string(), out.string());
    j["selection"] = {{"method", "lasso"}, {"k_folds", 4}};
    const RunReport rep = run_pipeline(PipelineConfig::from_json(j.dump()));

    const nlohmann::json rj = nlohmann::json::parse(slurp(out / "report.json"));
    const int raw = rj.at("num_features_raw").get<int>();
    const int kept = rj.at("num_features_selected").get<int>();
    CHECK(raw == 236);
    CHECK(kept >= 1);
    CHECK(kept < raw);
    bool saw_select = false;
    for (const std::string& op : rep.op_sequence) {
        if (op == "select:lasso:lbp_color") saw_select = true;
    }
    CHECK(saw_select);
    const FeatureMatrix fm = load_csv((out / "features.csv").string());
    CHECK(fm.cols == kept);
    CHECK(fm.has_labels());
}

TEST_CASE("stage failures surface their origin and clean up outputs") {
    testutil::TempDir td("fail");
    // A single-class corpus passes extraction but cannot train a classifier.
    fs::create_directories(td.path() / "only");
    for (int i = 0; i < 4; ++i) {
        char stem[8];
        std::snprintf(stem, sizeof stem, "s%02d", i);
        save_image(sample_image(0, i), (td.path() / "only" / ("color_" + std::string(stem) + ".pgm")).string());
    }
    const fs::path out = td.path() / "out";
    const nlohmann::json j = base_config(td.path().string(), out.string());

    try {
        run_pipeline(PipelineConfig::from_json(j.dump()));
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(std::string(e.what()).rfind("stage train:", 0) == 0);
        CHECK(e.exit_code() == 2);
    }
    CHECK(!fs::exists(out / "features.csv"));
    CHECK(!fs::exists(out / "report.json"));

    // A bad preprocessing op fails in the features stage.
    nlohmann::json j2 = j;
    j2["preprocess"]["color"] = nlohmann::json::array({{{"op", "sparkle"}}});
    try {
        run_pipeline(PipelineConfig::from_json(j2.dump()));
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(std::string(e.what()).rfind("stage features:", 0) == 0);
        CHECK(e.exit_code() == 2);
    }

    // A missing corpus fails in the ingest stage with the inner exit code.
    nlohmann::json j3 = j;
    j3["input_dir"] = (td.path() / "absent").string();
    try {
        run_pipeline(PipelineConfig::from_json(j3.dump()));
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(std::string(e.what()).rfind("stage ingest:", 0) == 0);
        CHECK(e.exit_code() == 3);
    }
}

} // TEST_SUITE
