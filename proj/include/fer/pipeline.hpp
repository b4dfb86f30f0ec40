#pragma once

#include "fer/classify.hpp"
#include "fer/error.hpp"
#include "fer/featmat.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fer {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

// A stage failure wrapping the underlying error; keeps the inner exit code.
class StageError : public Error {
public:
    StageError(const std::string& stage, const Error& inner)
        : Error("stage " + stage + ": " + inner.what()), code_(inner.exit_code()) {}
    int exit_code() const override { return code_; }

private:
    int code_;
};

struct PreprocOp {
    std::string name;
    std::string arg; // string-valued parameter (e.g. noise model)
    std::map<std::string, double> params;
};

struct DescriptorSpec {
    std::string name;     // lbp | hog | lpq | gabor
    std::string modality; // color | depth
    std::map<std::string, double> params;
};

struct SelectionSpec {
    std::string method = "none"; // none | lasso
    int k_folds = 5;
};

struct ClassifierSpec {
    std::string name = "knn"; // knn | gnb | cart | lda | mlp
    std::string arg;          // mlp trainer
    std::map<std::string, double> params;
};

struct SplitSpec {
    std::string type = "holdout"; // holdout | kfold
    double test_fraction = 0.3;
    int k = 5;
};

struct PipelineConfig {
    std::string input_dir;
    std::string color_pattern;
    std::string depth_pattern; // empty = color-only corpus
    std::vector<PreprocOp> pre_color, pre_depth;
    std::vector<DescriptorSpec> descriptors;
    SelectionSpec selection;
    ClassifierSpec classifier;
    SplitSpec split;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::string crop_sidecar; // optional per-stem crop boxes CSV
    std::string raw_json;     // config echo for the report

    static PipelineConfig from_json(const std::string& text);
    static PipelineConfig from_json_file(const std::string& path);
};

struct CorpusSample {
    std::string stem;
    std::string color_path;
    std::string depth_path; // empty when no depth pattern
    int label = 0;          // 1..C
};

struct CorpusIndex {
    std::vector<CorpusSample> samples;
    std::vector<std::string> class_names; // class_names[c-1] names class c
};

// Labels from lexicographically sorted immediate subfolders; files matched by
// a single-'*' pattern; color/depth paired by the captured stem.
CorpusIndex ingest(const std::string& dir, const std::string& color_pattern,
                   const std::string& depth_pattern = "");

struct ExtractResult {
    FeatureMatrix features;                    // stacked descriptor blocks + labels
    std::vector<std::pair<int, int>> blocks;   // (first column, width) per descriptor
    std::vector<std::string> block_names;
    std::vector<std::string> op_sequence;
    std::vector<std::string> substitutions;
};

ExtractResult extract_features(const PipelineConfig& cfg, const CorpusIndex& index);

// Dispatch on spec.name; seed only matters for the mlp trainer.
TrainedModel train_classifier(const ClassifierSpec& spec, const LabeledDataset& ds,
                              std::uint64_t seed);

struct RunReport {
    double accuracy = 0.0;
    ConfusionMatrix cm;
    std::vector<std::string> op_sequence;
    std::vector<std::string> outputs; // files written, relative to output_dir
    std::string report_json;
};

RunReport run_pipeline(const PipelineConfig& cfg);

} // namespace fer
