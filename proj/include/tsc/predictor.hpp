#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsc/control.hpp"
#include "tsc/corpus.hpp"

namespace tsc::predictor {

inline constexpr int kFeatureCount = 7;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "n_words", "n_chars", "max_dep_depth", "word_rank", "mean_aoa", "source_grade", "target_grade"};
inline constexpr int kFeatureSchemaVersion = 1;

/// Fixed-order numeric feature vector: five surface statistics of the
/// source text plus the source and target grade levels.
struct SourceFeatures {
  double n_words = 0;
  double n_chars = 0;
  double max_dep_depth = 0;
  double word_rank = 0;
  double mean_aoa = 0;
  double source_grade = 0;
  double target_grade = 0;

  std::array<double, kFeatureCount> as_array() const {
    return {n_words, n_chars, max_dep_depth, word_rank, mean_aoa, source_grade, target_grade};
  }
};

struct FeatureOptions {
  // Missing parse: throw when false, else use depth 1.
  bool allow_missing_parse = false;
};

/// Features from a record's source text. target_grade is required;
/// source_grade falls back to the ARI grade of the source.
SourceFeatures extract_features(const corpus::DatasetRecord& record,
                                const corpus::ParsedSentence* source_parse,
                                const corpus::Lexicon& freq, const corpus::Lexicon& aoa,
                                const FeatureOptions& options = {});

/// Regression tree with axis-aligned splits and vector-valued leaves.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> leaf;
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at index 0

  const std::vector<double>& leaf_for(std::span<const double> x) const;
  int depth() const;  // edges on the longest root-to-leaf path
};

/// Boosted ensemble: prediction = base + learning_rate * sum of tree leaves.
struct GbdtModel {
  std::vector<double> base_prediction;
  std::vector<Tree> trees;
  double learning_rate = 0.1;
  int max_depth = 6;
  int output_dims = 1;
  std::vector<std::string> feature_schema;
  std::vector<std::string> output_names;
  int schema_version = kFeatureSchemaVersion;

  std::vector<double> predict(std::span<const double> features) const;
  std::string to_json_string() const;
  static GbdtModel from_json_string(const std::string& text);
};

enum class Mode { single, multi };

struct GbdtConfig {
  Mode mode = Mode::multi;
  int n_trees = 500;
  double learning_rate = 0.1;
  int max_depth = 6;
  int min_samples_leaf = 5;
  // Held-out fraction for early stopping; disabled when the split would
  // leave fewer than 2 training rows or no validation rows.
  double validation_fraction = 0.2;
  int early_stopping_patience = 25;
  uint64_t seed = 0;
};

struct TrainReport {
  // One entry per model (5 for single mode, 1 for multi).
  struct PerModel {
    std::vector<double> train_mse;  // after each grown round
    std::vector<double> validation_mse;
    int rounds_grown = 0;
    int rounds_kept = 0;
    bool early_stopping_used = false;
  };
  std::vector<PerModel> models;
};

/// CP-Single (one scalar ensemble per output) or CP-Multi (one ensemble
/// with vector leaves chosen by summed variance reduction across outputs).
struct TrainedPredictor {
  Mode mode = Mode::multi;
  std::vector<GbdtModel> models;  // 1 for multi, one per output for single

  int output_dims() const;
  std::vector<double> predict_raw(const SourceFeatures& features) const;
  std::vector<std::filesystem::path> save(const std::filesystem::path& dir) const;
  static TrainedPredictor load(const std::filesystem::path& dir, Mode mode);
};

TrainedPredictor train_gbdt(const std::vector<SourceFeatures>& X,
                            const std::vector<std::vector<double>>& Y, const GbdtConfig& config,
                            TrainReport* report = nullptr);

/// Raw regression outputs in (w, c, l, wr, dtd) order, quantized onto the
/// control grid.
control::ControlVector predict_controls(const TrainedPredictor& predictor,
                                        const SourceFeatures& features);

struct PredictorEval {
  std::vector<std::optional<double>> pearson;  // per output dimension
  double rmse = 0.0;
};

PredictorEval evaluate_predictor(const TrainedPredictor& predictor,
                                 const std::vector<SourceFeatures>& X,
                                 const std::vector<std::vector<double>>& Y);

}  // namespace tsc::predictor
