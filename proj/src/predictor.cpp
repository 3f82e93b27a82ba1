#include "tsc/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "tsc/textstats.hpp"
#include "tsc/util.hpp"

namespace tsc::predictor {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

SourceFeatures extract_features(const corpus::DatasetRecord& record,
                                const corpus::ParsedSentence* source_parse,
                                const corpus::Lexicon& freq, const corpus::Lexicon& aoa,
                                const FeatureOptions& options) {
  if (!record.target_grade) {
    throw ValidationError("record '" + record.id + "': target grade required for features");
  }
  SourceFeatures f;
  auto stats = textstats::basic_stats(record.source);
  auto words = textstats::word_forms(record.source);
  f.n_words = stats.n_words;
  f.n_chars = stats.n_chars;
  if (source_parse) {
    f.max_dep_depth = textstats::tree_depth(*source_parse);
  } else if (options.allow_missing_parse) {
    f.max_dep_depth = 1;
  } else {
    throw ValidationError("record '" + record.id + "': missing source parse");
  }
  f.word_rank = textstats::word_rank(words, freq);
  f.mean_aoa = textstats::mean_aoa(words, aoa);
  f.source_grade = record.source_grade ? *record.source_grade
                                       : textstats::ari_grade(record.source);
  f.target_grade = *record.target_grade;
  return f;
}

const std::vector<double>& Tree::leaf_for(std::span<const double> x) const {
  int i = 0;
  while (nodes[static_cast<size_t>(i)].feature >= 0) {
    const auto& node = nodes[static_cast<size_t>(i)];
    i = x[static_cast<size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<size_t>(i)].leaf;
}

int Tree::depth() const {
  // Depth of node 0 is 0; leaves report the edge count from the root.
  std::vector<int> depths(nodes.size(), 0);
  int max_depth = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (node.feature >= 0) {
      depths[static_cast<size_t>(node.left)] = depths[i] + 1;
      depths[static_cast<size_t>(node.right)] = depths[i] + 1;
    } else {
      max_depth = std::max(max_depth, depths[i]);
    }
  }
  return max_depth;
}

std::vector<double> GbdtModel::predict(std::span<const double> features) const {
  if (static_cast<int>(features.size()) != static_cast<int>(feature_schema.size())) {
    throw ValidationError("predict: feature width mismatch");
  }
  std::vector<double> out = base_prediction;
  for (const auto& tree : trees) {
    const auto& leaf = tree.leaf_for(features);
    for (size_t d = 0; d < out.size(); ++d) out[d] += learning_rate * leaf[d];
  }
  return out;
}

namespace {

// Row-major feature matrix view used during training.
struct Matrix {
  const std::vector<std::array<double, kFeatureCount>>* rows;
  double at(size_t r, size_t c) const { return (*rows)[r][c]; }
};

struct BuildContext {
  Matrix x;
  std::vector<std::vector<double>>* residuals;  // n rows, dims columns
  int dims = 0;
  int max_depth = 6;
  int min_samples_leaf = 1;
};

std::vector<double> leaf_mean(const BuildContext& ctx, const std::vector<size_t>& idx) {
  std::vector<double> mean(static_cast<size_t>(ctx.dims), 0.0);
  for (size_t i : idx) {
    const auto& r = (*ctx.residuals)[i];
    for (int d = 0; d < ctx.dims; ++d) mean[static_cast<size_t>(d)] += r[static_cast<size_t>(d)];
  }
  for (auto& m : mean) m /= static_cast<double>(idx.size());
  return mean;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Exact greedy search: for every feature, scan split points between
// consecutive distinct sorted values; gain is the summed squared-error
// reduction across output dimensions. Ties keep the lowest feature index,
// then the lowest threshold (guaranteed by scan order and strict >).
SplitChoice best_split(const BuildContext& ctx, const std::vector<size_t>& idx) {
  SplitChoice best;
  const size_t n = idx.size();
  const int dims = ctx.dims;
  std::vector<double> total(static_cast<size_t>(dims), 0.0);
  for (size_t i : idx) {
    for (int d = 0; d < dims; ++d) total[static_cast<size_t>(d)] += (*ctx.residuals)[i][static_cast<size_t>(d)];
  }
  double parent_term = 0.0;
  for (int d = 0; d < dims; ++d) {
    parent_term += total[static_cast<size_t>(d)] * total[static_cast<size_t>(d)];
  }
  parent_term /= static_cast<double>(n);

  std::vector<std::pair<double, size_t>> order(n);
  std::vector<double> left(static_cast<size_t>(dims));
  for (int f = 0; f < kFeatureCount; ++f) {
    for (size_t k = 0; k < n; ++k) order[k] = {ctx.x.at(idx[k], static_cast<size_t>(f)), idx[k]};
    std::sort(order.begin(), order.end());
    std::fill(left.begin(), left.end(), 0.0);
    for (size_t k = 0; k + 1 < n; ++k) {
      const auto& row = (*ctx.residuals)[order[k].second];
      for (int d = 0; d < dims; ++d) left[static_cast<size_t>(d)] += row[static_cast<size_t>(d)];
      if (order[k].first == order[k + 1].first) continue;  // not a boundary
      size_t n_left = k + 1;
      size_t n_right = n - n_left;
      if (n_left < static_cast<size_t>(ctx.min_samples_leaf) ||
          n_right < static_cast<size_t>(ctx.min_samples_leaf)) {
        continue;
      }
      double left_term = 0.0, right_term = 0.0;
      for (int d = 0; d < dims; ++d) {
        double ls = left[static_cast<size_t>(d)];
        double rs = total[static_cast<size_t>(d)] - ls;
        left_term += ls * ls;
        right_term += rs * rs;
      }
      double gain = left_term / static_cast<double>(n_left) +
                    right_term / static_cast<double>(n_right) - parent_term;
      if (gain > best.gain) {
        best.feature = f;
        best.threshold = (order[k].first + order[k + 1].first) / 2.0;
        best.gain = gain;
      }
    }
  }
  return best;
}

int build_node(const BuildContext& ctx, Tree& tree, std::vector<size_t>& idx, int depth) {
  int node_index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  bool can_split = depth < ctx.max_depth &&
                   idx.size() >= 2 * static_cast<size_t>(ctx.min_samples_leaf);
  SplitChoice split;
  if (can_split) split = best_split(ctx, idx);
  if (!can_split || split.feature < 0 || split.gain <= 1e-12) {
    tree.nodes[static_cast<size_t>(node_index)].leaf = leaf_mean(ctx, idx);
    return node_index;
  }
  std::vector<size_t> left_idx, right_idx;
  left_idx.reserve(idx.size());
  right_idx.reserve(idx.size());
  for (size_t i : idx) {
    if (ctx.x.at(i, static_cast<size_t>(split.feature)) <= split.threshold) {
      left_idx.push_back(i);
    } else {
      right_idx.push_back(i);
    }
  }
  idx.clear();
  idx.shrink_to_fit();
  int left = build_node(ctx, tree, left_idx, depth + 1);
  int right = build_node(ctx, tree, right_idx, depth + 1);
  auto& node = tree.nodes[static_cast<size_t>(node_index)];
  node.feature = split.feature;
  node.threshold = split.threshold;
  node.left = left;
  node.right = right;
  return node_index;
}

GbdtModel train_one_ensemble(const std::vector<std::array<double, kFeatureCount>>& x,
                             const std::vector<std::vector<double>>& y, int dims,
                             const GbdtConfig& config, std::vector<std::string> output_names,
                             TrainReport::PerModel* report) {
  const size_t n = x.size();

  // Deterministic held-out split for early stopping.
  std::vector<size_t> train_idx, val_idx;
  size_t n_val = config.validation_fraction > 0.0
                     ? static_cast<size_t>(config.validation_fraction * static_cast<double>(n))
                     : 0;
  bool early_stopping = n_val >= 1 && n - n_val >= 2;
  if (early_stopping) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(config.seed);
    rng.shuffle(order);
    train_idx.assign(order.begin(), order.end() - static_cast<long>(n_val));
    val_idx.assign(order.end() - static_cast<long>(n_val), order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
  } else {
    train_idx.resize(n);
    std::iota(train_idx.begin(), train_idx.end(), 0);
  }

  GbdtModel model;
  model.learning_rate = config.learning_rate;
  model.max_depth = config.max_depth;
  model.output_dims = dims;
  model.feature_schema.assign(kFeatureNames.begin(), kFeatureNames.end());
  model.output_names = std::move(output_names);

  model.base_prediction.assign(static_cast<size_t>(dims), 0.0);
  for (size_t i : train_idx) {
    for (int d = 0; d < dims; ++d) {
      model.base_prediction[static_cast<size_t>(d)] += y[i][static_cast<size_t>(d)];
    }
  }
  for (auto& b : model.base_prediction) b /= static_cast<double>(train_idx.size());

  // Residuals for training rows, running predictions for validation rows.
  std::vector<std::vector<double>> residuals(n);
  for (size_t i : train_idx) {
    residuals[i].resize(static_cast<size_t>(dims));
    for (int d = 0; d < dims; ++d) {
      residuals[i][static_cast<size_t>(d)] =
          y[i][static_cast<size_t>(d)] - model.base_prediction[static_cast<size_t>(d)];
    }
  }
  std::vector<std::vector<double>> val_pred(n);
  for (size_t i : val_idx) val_pred[i] = model.base_prediction;

  BuildContext ctx;
  ctx.x = Matrix{&x};
  ctx.residuals = &residuals;
  ctx.dims = dims;
  ctx.max_depth = config.max_depth;
  ctx.min_samples_leaf = config.min_samples_leaf;

  auto train_mse = [&] {
    double sum = 0.0;
    for (size_t i : train_idx) {
      for (int d = 0; d < dims; ++d) {
        double r = residuals[i][static_cast<size_t>(d)];
        sum += r * r;
      }
    }
    return sum / (static_cast<double>(train_idx.size()) * dims);
  };
  auto val_mse = [&] {
    double sum = 0.0;
    for (size_t i : val_idx) {
      for (int d = 0; d < dims; ++d) {
        double r = y[i][static_cast<size_t>(d)] - val_pred[i][static_cast<size_t>(d)];
        sum += r * r;
      }
    }
    return sum / (static_cast<double>(val_idx.size()) * dims);
  };

  double best_val = std::numeric_limits<double>::infinity();
  int best_round = 0;
  int grown = 0;
  for (int round = 1; round <= config.n_trees; ++round) {
    Tree tree;
    std::vector<size_t> root_idx = train_idx;
    build_node(ctx, tree, root_idx, 0);
    for (size_t i : train_idx) {
      const auto& leaf = tree.leaf_for(x[i]);
      for (int d = 0; d < dims; ++d) {
        residuals[i][static_cast<size_t>(d)] -= config.learning_rate * leaf[static_cast<size_t>(d)];
      }
    }
    for (size_t i : val_idx) {
      const auto& leaf = tree.leaf_for(x[i]);
      for (int d = 0; d < dims; ++d) {
        val_pred[i][static_cast<size_t>(d)] += config.learning_rate * leaf[static_cast<size_t>(d)];
      }
    }
    model.trees.push_back(std::move(tree));
    grown = round;
    double tmse = train_mse();
    if (report) report->train_mse.push_back(tmse);
    if (early_stopping) {
      double vmse = val_mse();
      if (report) report->validation_mse.push_back(vmse);
      if (vmse < best_val) {
        best_val = vmse;
        best_round = round;
      } else if (round - best_round >= config.early_stopping_patience) {
        break;
      }
    }
    if (tmse <= 1e-30) break;  // nothing left to fit
  }

  int kept = early_stopping ? best_round : grown;
  model.trees.resize(static_cast<size_t>(kept));
  if (report) {
    report->rounds_grown = grown;
    report->rounds_kept = kept;
    report->early_stopping_used = early_stopping;
  }
  return model;
}

}  // namespace

TrainedPredictor train_gbdt(const std::vector<SourceFeatures>& X,
                            const std::vector<std::vector<double>>& Y, const GbdtConfig& config,
                            TrainReport* report) {
  if (X.size() != Y.size()) throw ValidationError("train_gbdt: X/Y length mismatch");
  if (X.size() < 2) throw ValidationError("train_gbdt: need at least 2 samples");
  if (config.n_trees < 0 || config.learning_rate <= 0.0 || config.max_depth < 0 ||
      config.min_samples_leaf < 1) {
    throw ValidationError("train_gbdt: bad configuration");
  }
  const int dims = static_cast<int>(Y.front().size());
  if (dims < 1) throw ValidationError("train_gbdt: zero-dimensional targets");
  for (const auto& row : Y) {
    if (static_cast<int>(row.size()) != dims) {
      throw ValidationError("train_gbdt: inconsistent target dimensions");
    }
  }

  std::vector<std::array<double, kFeatureCount>> x(X.size());
  for (size_t i = 0; i < X.size(); ++i) x[i] = X[i].as_array();

  std::vector<std::string> names;
  if (dims == static_cast<int>(control::kControlNames.size())) {
    names.assign(control::kControlNames.begin(), control::kControlNames.end());
  } else {
    for (int d = 0; d < dims; ++d) names.push_back("y" + std::to_string(d));
  }

  TrainedPredictor predictor;
  predictor.mode = config.mode;
  if (report) report->models.clear();
  if (config.mode == Mode::multi) {
    if (report) report->models.emplace_back();
    predictor.models.push_back(train_one_ensemble(x, Y, dims, config, names,
                                                  report ? &report->models.back() : nullptr));
  } else {
    for (int d = 0; d < dims; ++d) {
      std::vector<std::vector<double>> column(Y.size());
      for (size_t i = 0; i < Y.size(); ++i) column[i] = {Y[i][static_cast<size_t>(d)]};
      if (report) report->models.emplace_back();
      predictor.models.push_back(
          train_one_ensemble(x, column, 1, config, {names[static_cast<size_t>(d)]},
                             report ? &report->models.back() : nullptr));
    }
  }
  return predictor;
}

int TrainedPredictor::output_dims() const {
  if (mode == Mode::multi) return models.empty() ? 0 : models.front().output_dims;
  return static_cast<int>(models.size());
}

std::vector<double> TrainedPredictor::predict_raw(const SourceFeatures& features) const {
  auto x = features.as_array();
  if (mode == Mode::multi) {
    if (models.size() != 1) throw ValidationError("predictor: multi mode expects one model");
    return models.front().predict(x);
  }
  std::vector<double> out;
  out.reserve(models.size());
  for (const auto& model : models) {
    if (model.output_dims != 1) throw ValidationError("predictor: single mode expects scalar models");
    out.push_back(model.predict(x)[0]);
  }
  return out;
}

control::ControlVector predict_controls(const TrainedPredictor& predictor,
                                        const SourceFeatures& features) {
  for (const auto& model : predictor.models) {
    if (model.feature_schema !=
        std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end())) {
      throw ValidationError("predict_controls: feature schema mismatch");
    }
  }
  auto raw = predictor.predict_raw(features);
  if (raw.size() != control::kControlNames.size()) {
    throw ValidationError("predict_controls: predictor does not produce 5 control outputs");
  }
  return control::quantize(control::ControlVector::from_primary(
      {raw[0], raw[1], raw[2], raw[3], raw[4]}));
}

PredictorEval evaluate_predictor(const TrainedPredictor& predictor,
                                 const std::vector<SourceFeatures>& X,
                                 const std::vector<std::vector<double>>& Y) {
  if (X.size() != Y.size()) throw ValidationError("evaluate_predictor: X/Y length mismatch");
  if (X.size() < 2) throw ValidationError("evaluate_predictor: need at least 2 samples");
  const size_t n = X.size();
  const int dims = predictor.output_dims();
  for (const auto& row : Y) {
    if (static_cast<int>(row.size()) != dims) {
      throw ValidationError("evaluate_predictor: target dimension mismatch");
    }
  }
  std::vector<std::vector<double>> pred_cols(static_cast<size_t>(dims), std::vector<double>(n));
  std::vector<std::vector<double>> gold_cols(static_cast<size_t>(dims), std::vector<double>(n));
  double squared_error = 0.0;
  for (size_t i = 0; i < n; ++i) {
    auto raw = predictor.predict_raw(X[i]);
    for (int d = 0; d < dims; ++d) {
      double p = raw[static_cast<size_t>(d)];
      double g = Y[i][static_cast<size_t>(d)];
      pred_cols[static_cast<size_t>(d)][i] = p;
      gold_cols[static_cast<size_t>(d)][i] = g;
      squared_error += (p - g) * (p - g);
    }
  }
  PredictorEval eval;
  for (int d = 0; d < dims; ++d) {
    eval.pearson.push_back(pearson(pred_cols[static_cast<size_t>(d)], gold_cols[static_cast<size_t>(d)]));
  }
  eval.rmse = std::sqrt(squared_error / (static_cast<double>(n) * dims));
  return eval;
}

namespace {

ordered_json node_to_json(const Tree& tree, int index) {
  const auto& node = tree.nodes[static_cast<size_t>(index)];
  ordered_json j;
  if (node.feature < 0) {
    j["leaf"] = node.leaf;
    return j;
  }
  j["feature"] = node.feature;
  j["threshold"] = node.threshold;
  j["left"] = node_to_json(tree, node.left);
  j["right"] = node_to_json(tree, node.right);
  return j;
}

int node_from_json(const json& j, Tree& tree, int dims) {
  int index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    auto leaf = j.at("leaf").get<std::vector<double>>();
    if (static_cast<int>(leaf.size()) != dims) {
      throw ValidationError("model: leaf width mismatch");
    }
    tree.nodes[static_cast<size_t>(index)].leaf = std::move(leaf);
    return index;
  }
  int feature = j.at("feature").get<int>();
  double threshold = j.at("threshold").get<double>();
  if (feature < 0 || feature >= kFeatureCount) throw ValidationError("model: bad feature index");
  int left = node_from_json(j.at("left"), tree, dims);
  int right = node_from_json(j.at("right"), tree, dims);
  auto& node = tree.nodes[static_cast<size_t>(index)];
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return index;
}

}  // namespace

std::string GbdtModel::to_json_string() const {
  ordered_json j;
  j["format"] = "tsc-gbdt";
  j["version"] = schema_version;
  j["output_dims"] = output_dims;
  j["output_names"] = output_names;
  j["feature_schema"] = feature_schema;
  j["learning_rate"] = learning_rate;
  j["max_depth"] = max_depth;
  j["base_prediction"] = base_prediction;
  j["trees"] = ordered_json::array();
  for (const auto& tree : trees) j["trees"].push_back(node_to_json(tree, 0));
  return j.dump();
}

GbdtModel GbdtModel::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "tsc-gbdt") {
    throw ValidationError("model: unknown format");
  }
  GbdtModel model;
  try {
    model.schema_version = j.at("version").get<int>();
    model.output_dims = j.at("output_dims").get<int>();
    model.output_names = j.at("output_names").get<std::vector<std::string>>();
    model.feature_schema = j.at("feature_schema").get<std::vector<std::string>>();
    model.learning_rate = j.at("learning_rate").get<double>();
    model.max_depth = j.at("max_depth").get<int>();
    model.base_prediction = j.at("base_prediction").get<std::vector<double>>();
    for (const auto& tree_json : j.at("trees")) {
      Tree tree;
      node_from_json(tree_json, tree, model.output_dims);
      model.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
  if (static_cast<int>(model.base_prediction.size()) != model.output_dims) {
    throw ValidationError("model: base prediction width mismatch");
  }
  return model;
}

std::vector<std::filesystem::path> TrainedPredictor::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  if (mode == Mode::multi) {
    auto path = dir / "cp_multi.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunError("cannot write model file: " + path.string());
    out << models.front().to_json_string() << '\n';
    paths.push_back(path);
  } else {
    for (const auto& model : models) {
      auto path = dir / ("cp_" + model.output_names.front() + ".json");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw RunError("cannot write model file: " + path.string());
      out << model.to_json_string() << '\n';
      paths.push_back(path);
    }
  }
  return paths;
}

TrainedPredictor TrainedPredictor::load(const std::filesystem::path& dir, Mode mode) {
  auto read_file = [](const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open model file: " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  TrainedPredictor predictor;
  predictor.mode = mode;
  if (mode == Mode::multi) {
    predictor.models.push_back(GbdtModel::from_json_string(read_file(dir / "cp_multi.json")));
  } else {
    for (auto name : control::kControlNames) {
      predictor.models.push_back(GbdtModel::from_json_string(
          read_file(dir / ("cp_" + std::string(name) + ".json"))));
    }
  }
  return predictor;
}

}  // namespace tsc::predictor
