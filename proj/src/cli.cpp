#include "tsc/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsc/control.hpp"
#include "tsc/corpus.hpp"
#include "tsc/fixtures.hpp"
#include "tsc/metrics.hpp"
#include "tsc/predictor.hpp"
#include "tsc/search.hpp"
#include "tsc/simplify.hpp"
#include "tsc/strategies.hpp"
#include "tsc/textstats.hpp"
#include "tsc/util.hpp"

namespace tsc::cli {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct CommonOptions {
  std::string dataset;
  std::string format = "jsonl";
  std::string conllu;
  std::string freq;
  std::string aoa;
  uint64_t seed = 0;
  int jobs = 1;
};

corpus::DatasetFormat parse_format(const std::string& format) {
  if (format == "jsonl") return corpus::DatasetFormat::jsonl;
  if (format == "tsv") return corpus::DatasetFormat::tsv;
  throw ValidationError("unknown dataset format: " + format);
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ValidationError(what + " path is required");
  if (!std::filesystem::exists(path)) throw ValidationError(what + " file not found: " + path);
}

struct LoadedInputs {
  std::vector<corpus::DatasetRecord> records;
  corpus::ParseMap parses;
  std::optional<corpus::Lexicon> freq;
  std::optional<corpus::Lexicon> aoa;
};

LoadedInputs load_inputs(const CommonOptions& opts, bool need_freq, bool need_aoa) {
  LoadedInputs in;
  require_file(opts.dataset, "dataset");
  in.records = corpus::load_dataset(opts.dataset, parse_format(opts.format));
  if (!opts.conllu.empty()) {
    require_file(opts.conllu, "conllu");
    in.parses = corpus::load_conllu(opts.conllu);
  }
  if (!opts.freq.empty() || need_freq) {
    require_file(opts.freq, "frequency lexicon");
    in.freq = corpus::load_lexicon(opts.freq, corpus::Lexicon::Kind::frequency_rank);
  }
  if (!opts.aoa.empty() || need_aoa) {
    require_file(opts.aoa, "age-of-acquisition lexicon");
    in.aoa = corpus::load_lexicon(opts.aoa, corpus::Lexicon::Kind::age_of_acquisition);
  }
  return in;
}

struct OracleRow {
  std::string id;
  control::ControlVector controls;
  std::optional<int> source_grade;
  std::optional<int> target_grade;
};

/// Oracle vectors for every record with a reference. Missing parses fall
/// back to dtd = 1 and are counted, matching the pipeline's degradation
/// rule.
std::vector<OracleRow> oracle_rows(const LoadedInputs& in, bool invert_ratios, int* skipped,
                                   int* missing_parses) {
  std::vector<OracleRow> rows;
  control::ControlOptions copts;
  copts.invert_ratios = invert_ratios;
  copts.require_parse = false;
  for (const auto& record : in.records) {
    if (!record.reference) {
      if (skipped) ++*skipped;
      continue;
    }
    const auto* src = in.parses.find(record.id, corpus::Side::source);
    const auto* ref = in.parses.find(record.id, corpus::Side::reference);
    if ((!src || !ref) && missing_parses) ++*missing_parses;
    OracleRow row;
    row.id = record.id;
    row.controls = control::compute_controls(record.source, *record.reference, src, ref, *in.freq,
                                             copts);
    row.source_grade = record.source_grade;
    row.target_grade = record.target_grade;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, double> load_adequacy(const std::string& path) {
  std::map<std::string, double> scores;
  std::ifstream file(path);
  if (!file) throw ValidationError("cannot open adequacy file: " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw ValidationError("adequacy line " + std::to_string(lineno) + ": expected id<TAB>score");
    }
    char* end = nullptr;
    std::string value(fields[1]);
    double score = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size()) {
      throw ValidationError("adequacy line " + std::to_string(lineno) + ": bad score");
    }
    scores[std::string(fields[0])] = score;
  }
  return scores;
}

control::ControlVector parse_vector_arg(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 5) {
    throw ValidationError("--vector expects five comma-separated values: w,c,l,wr,dtd");
  }
  std::array<double, 5> values{};
  for (size_t i = 0; i < 5; ++i) {
    std::string field(trim(parts[i]));
    char* end = nullptr;
    values[i] = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
      throw ValidationError("--vector: bad value '" + field + "'");
    }
  }
  return control::ControlVector::from_primary(values);
}

control::ControlVector load_vector_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ValidationError("cannot open vector file: " + path);
  json j;
  try {
    j = json::parse(file);
    return control::ControlVector::from_primary({j.at("w").get<double>(), j.at("c").get<double>(),
                                                 j.at("l").get<double>(), j.at("wr").get<double>(),
                                                 j.at("dtd").get<double>()});
  } catch (const json::exception& e) {
    throw ValidationError("vector file '" + path + "': " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write file: " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// Subcommand implementations

struct ExtractArgs {
  CommonOptions common;
  std::string out;
  bool invert_ratios = false;
};

void cmd_extract_controls(const ExtractArgs& args) {
  auto in = load_inputs(args.common, true, false);
  int skipped = 0, missing_parses = 0;
  auto rows = oracle_rows(in, args.invert_ratios, &skipped, &missing_parses);
  std::vector<std::pair<std::string, control::ControlVector>> out_rows;
  out_rows.reserve(rows.size());
  for (const auto& row : rows) out_rows.emplace_back(row.id, row.controls);
  control::write_controls_jsonl(args.out, out_rows);
  std::cerr << "extract-controls: wrote " << out_rows.size() << " vectors to " << args.out
            << " (skipped " << skipped << " records without references, " << missing_parses
            << " without parses)\n";
}

struct TrainArgs {
  CommonOptions common;
  std::string controls;   // optional precomputed oracle controls
  std::string mode = "multi";
  std::string out_dir;
  std::string eval_out;
  predictor::GbdtConfig config;
};

predictor::Mode parse_mode(const std::string& mode) {
  if (mode == "single") return predictor::Mode::single;
  if (mode == "multi") return predictor::Mode::multi;
  throw ValidationError("unknown predictor mode: " + mode + " (expected single or multi)");
}

ordered_json eval_to_json(const predictor::PredictorEval& eval) {
  ordered_json j;
  j["rmse"] = eval.rmse;
  ordered_json correlations = ordered_json::object();
  for (size_t d = 0; d < eval.pearson.size(); ++d) {
    auto name = std::string(control::kControlNames[d]);
    if (eval.pearson[d]) {
      correlations[name] = *eval.pearson[d];
    } else {
      correlations[name] = nullptr;
    }
  }
  j["pearson"] = correlations;
  return j;
}

void cmd_train_predictor(const TrainArgs& args) {
  auto in = load_inputs(args.common, true, true);

  std::map<std::string, control::ControlVector> controls_by_id;
  if (!args.controls.empty()) {
    require_file(args.controls, "controls");
    for (auto& [id, v] : control::read_controls_jsonl(args.controls)) controls_by_id[id] = v;
  } else {
    int skipped = 0, missing = 0;
    for (const auto& row : oracle_rows(in, false, &skipped, &missing)) {
      controls_by_id[row.id] = row.controls;
    }
  }

  std::vector<predictor::SourceFeatures> X;
  std::vector<std::vector<double>> Y;
  int unusable = 0;
  predictor::FeatureOptions fopts;
  fopts.allow_missing_parse = true;
  for (const auto& record : in.records) {
    auto it = controls_by_id.find(record.id);
    if (it == controls_by_id.end() || !record.target_grade) {
      ++unusable;
      continue;
    }
    const auto* parse = in.parses.find(record.id, corpus::Side::source);
    X.push_back(predictor::extract_features(record, parse, *in.freq, *in.aoa, fopts));
    const auto& v = it->second;
    Y.push_back({v.w, v.c, v.l, v.wr, v.dtd});
  }
  if (X.size() < 2) throw ValidationError("train-predictor: fewer than 2 usable records");

  auto config = args.config;
  config.mode = parse_mode(args.mode);
  config.seed = args.common.seed;
  predictor::TrainReport train_report;
  auto predictor_model = predictor::train_gbdt(X, Y, config, &train_report);

  std::filesystem::create_directories(args.out_dir);
  auto paths = predictor_model.save(args.out_dir);

  auto eval = predictor::evaluate_predictor(predictor_model, X, Y);
  ordered_json j;
  j["mode"] = args.mode;
  j["n_train_records"] = static_cast<int>(X.size());
  j["n_unusable_records"] = unusable;
  j["train"] = eval_to_json(eval);
  ordered_json rounds = ordered_json::array();
  for (const auto& m : train_report.models) {
    ordered_json r;
    r["rounds_grown"] = m.rounds_grown;
    r["rounds_kept"] = m.rounds_kept;
    r["early_stopping"] = m.early_stopping_used;
    rounds.push_back(r);
  }
  j["models"] = rounds;
  std::string eval_path = args.eval_out.empty()
                              ? (std::filesystem::path(args.out_dir) / "intrinsic_eval.json").string()
                              : args.eval_out;
  write_text_file(eval_path, j.dump(2) + "\n");
  std::cerr << "train-predictor: " << paths.size() << " model file(s) in " << args.out_dir
            << ", eval in " << eval_path << "\n";
}

struct PredictArgs {
  CommonOptions common;
  std::string model_dir;
  std::string mode = "multi";
  std::string out;
};

void cmd_predict(const PredictArgs& args) {
  auto in = load_inputs(args.common, true, true);
  auto model = predictor::TrainedPredictor::load(args.model_dir, parse_mode(args.mode));
  std::vector<std::pair<std::string, control::ControlVector>> rows;
  int skipped = 0;
  predictor::FeatureOptions fopts;
  fopts.allow_missing_parse = true;
  for (const auto& record : in.records) {
    if (!record.target_grade) {
      ++skipped;
      continue;
    }
    const auto* parse = in.parses.find(record.id, corpus::Side::source);
    auto features = predictor::extract_features(record, parse, *in.freq, *in.aoa, fopts);
    rows.emplace_back(record.id, predictor::predict_controls(model, features));
  }
  control::write_controls_jsonl(args.out, rows);
  std::cerr << "predict: wrote " << rows.size() << " vectors to " << args.out << " (skipped "
            << skipped << " without target grade)\n";
}

struct SearchArgs {
  CommonOptions common;
  std::string method = "one-plus-one";
  std::string simplifier = "rule";
  int budget = 64;
  double sigma0 = 0.2;
  std::string out;
  std::string trace;
};

strategies::StrategyContext make_context(const LoadedInputs& in) {
  strategies::StrategyContext ctx;
  ctx.parses = &in.parses;
  if (in.freq) ctx.freq = &*in.freq;
  if (in.aoa) ctx.aoa = &*in.aoa;
  return ctx;
}

double corpus_sari_for_vector(const std::vector<corpus::DatasetRecord>& records,
                              const control::ControlVector& vector,
                              simplify::Simplifier& simplifier,
                              const strategies::StrategyContext& ctx, int jobs) {
  strategies::Strategy strategy;
  strategy.kind = strategies::StrategyKind::corpus_level;
  strategy.corpus_vector = vector;
  strategies::PipelineConfig config;
  config.jobs = jobs;
  auto result = strategies::run_pipeline(records, strategy, simplifier, ctx, config);
  return result.report.corpus_sari.sari;
}

void cmd_search(const SearchArgs& args) {
  auto in = load_inputs(args.common, true, false);
  auto simplifier = simplify::make_simplifier(args.simplifier, in.freq ? &*in.freq : nullptr);
  auto ctx = make_context(in);

  search::SearchConfig config;
  config.budget = args.budget;
  config.sigma0 = args.sigma0;
  config.seed = args.common.seed;
  if (args.method == "one-plus-one") {
    config.strategy = search::SearchStrategy::one_plus_one;
  } else if (args.method == "random") {
    config.strategy = search::SearchStrategy::random_search;
  } else {
    throw ValidationError("unknown search method: " + args.method);
  }

  auto eval_fn = [&](const control::ControlVector& v) {
    return corpus_sari_for_vector(in.records, v, *simplifier, ctx, args.common.jobs);
  };
  auto result = search::run_search(eval_fn, config);

  ordered_json j;
  j["w"] = result.best.w;
  j["c"] = result.best.c;
  j["l"] = result.best.l;
  j["wr"] = result.best.wr;
  j["dtd"] = result.best.dtd;
  j["score"] = result.best_score;
  j["evaluations"] = static_cast<int>(result.trace.size());
  write_text_file(args.out, j.dump(2) + "\n");
  if (!args.trace.empty()) search::write_trace_csv(args.trace, result.trace);
  std::cerr << "search: best sari " << format_double(result.best_score, 4) << " after "
            << result.trace.size() << " evaluations -> " << args.out << "\n";
}

struct EvaluateArgs {
  CommonOptions common;
  std::string strategy = "oracle";
  std::string simplifier = "rule";
  std::string vector_arg;
  std::string vector_file;
  std::string controls;  // oracle controls for avg-grade
  std::string model_dir;
  std::string adequacy;
  std::string out_dir = ".";
};

void cmd_evaluate(const EvaluateArgs& args) {
  auto kind = strategies::strategy_from_name(args.strategy);
  if (!kind) throw ValidationError("unknown strategy: " + args.strategy);

  bool needs_aoa = *kind == strategies::StrategyKind::cp_single ||
                   *kind == strategies::StrategyKind::cp_multi;
  auto in = load_inputs(args.common, true, needs_aoa);
  auto ctx = make_context(in);
  auto simplifier = simplify::make_simplifier(args.simplifier, in.freq ? &*in.freq : nullptr);

  strategies::Strategy strategy;
  strategy.kind = *kind;
  control::AvgGradeTable table;
  predictor::TrainedPredictor model;

  switch (*kind) {
    case strategies::StrategyKind::corpus_level: {
      if (!args.vector_file.empty()) {
        strategy.corpus_vector = load_vector_file(args.vector_file);
      } else if (!args.vector_arg.empty()) {
        strategy.corpus_vector = parse_vector_arg(args.vector_arg);
      } else {
        throw ValidationError("corpus-level strategy needs --vector or --vector-file");
      }
      break;
    }
    case strategies::StrategyKind::avg_grade: {
      std::vector<control::GradedControls> graded;
      if (!args.controls.empty()) {
        require_file(args.controls, "controls");
        std::map<std::string, const corpus::DatasetRecord*> by_id;
        for (const auto& r : in.records) by_id[r.id] = &r;
        for (const auto& [id, v] : control::read_controls_jsonl(args.controls)) {
          auto it = by_id.find(id);
          if (it == by_id.end() || !it->second->target_grade) continue;
          int sg = it->second->source_grade ? *it->second->source_grade
                                            : textstats::ari_grade(it->second->source);
          graded.push_back({sg, *it->second->target_grade, v});
        }
      } else {
        for (const auto& row : oracle_rows(in, false, nullptr, nullptr)) {
          if (!row.target_grade) continue;
          int sg = row.source_grade ? *row.source_grade : 0;
          if (sg == 0) continue;
          graded.push_back({sg, *row.target_grade, row.controls});
        }
      }
      if (graded.empty()) throw ValidationError("avg-grade: no graded control vectors available");
      table = control::build_avg_grade_table(graded);
      strategy.table = &table;
      break;
    }
    case strategies::StrategyKind::cp_single:
    case strategies::StrategyKind::cp_multi: {
      if (args.model_dir.empty()) throw ValidationError("cp strategies need --model-dir");
      model = predictor::TrainedPredictor::load(
          args.model_dir, *kind == strategies::StrategyKind::cp_single ? predictor::Mode::single
                                                                       : predictor::Mode::multi);
      strategy.predictor = &model;
      break;
    }
    case strategies::StrategyKind::oracle:
    case strategies::StrategyKind::grade_tokens:
      break;
  }

  strategies::PipelineConfig config;
  config.jobs = args.common.jobs;
  if (!args.adequacy.empty()) config.adequacy = load_adequacy(args.adequacy);

  auto result = strategies::run_pipeline(in.records, strategy, *simplifier, ctx, config);

  std::filesystem::path out_dir(args.out_dir);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "summary.json", result.report.to_json_string() + "\n");

  std::ofstream outputs(out_dir / "outputs.jsonl", std::ios::binary);
  for (const auto& [id, text] : result.outputs) {
    ordered_json j;
    j["id"] = id;
    j["output"] = text;
    outputs << j.dump() << '\n';
  }
  std::vector<std::pair<std::string, control::ControlVector>> resolved;
  for (const auto& input : result.inputs) {
    if (input.controls) resolved.emplace_back(input.id, *input.controls);
  }
  if (!resolved.empty()) {
    control::write_controls_jsonl(out_dir / "controls.jsonl", resolved);
  }
  if (!result.report.per_grade.empty()) {
    metrics::write_edit_report_csv(out_dir / "report_edit_ops.csv", result.report.per_grade);
  }
  metrics::write_over_under_csv(out_dir / "report_over_under.csv", result.report.over_under);
  if (!result.report.control_distribution.empty()) {
    metrics::write_distribution_csv(out_dir / "report_distribution.csv",
                                    result.report.control_distribution);
  }
  std::cerr << "evaluate[" << args.strategy << "]: sari "
            << format_double(result.report.corpus_sari.sari, 2) << ", ari-accuracy "
            << format_double(result.report.ari_accuracy_pct, 1) << "%, unchanged "
            << format_double(result.report.pct_unchanged_pct, 1) << "% ("
            << result.report.n_scored << "/" << result.report.n_records << " scored) -> "
            << out_dir.string() << "\n";
}

struct ReportArgs {
  CommonOptions common;
  std::string outputs;
  std::vector<std::string> controls;  // name=path pairs
  std::string out_dir = ".";
  int correlation_samples = 0;
  std::string simplifier = "rule";
};

void cmd_report(const ReportArgs& args) {
  auto in = load_inputs(args.common, !args.outputs.empty() || args.correlation_samples > 0, false);
  std::filesystem::path out_dir(args.out_dir);
  std::filesystem::create_directories(out_dir);
  bool wrote_anything = false;

  if (!args.outputs.empty()) {
    strategies::Strategy strategy;
    strategy.kind = strategies::StrategyKind::oracle;
    auto ctx = make_context(in);
    auto replay = simplify::make_simplifier("replay:" + args.outputs, nullptr);
    // Oracle resolution only feeds the control-distribution table here;
    // scoring uses the replayed outputs.
    auto result = strategies::run_pipeline(in.records, strategy, *replay, ctx, {});
    metrics::write_over_under_csv(out_dir / "report_over_under.csv", result.report.over_under);
    if (!result.report.per_grade.empty()) {
      metrics::write_edit_report_csv(out_dir / "report_edit_ops.csv", result.report.per_grade);
    }
    write_text_file(out_dir / "summary.json", result.report.to_json_string() + "\n");
    wrote_anything = true;
  }

  if (!args.controls.empty()) {
    std::map<std::string, std::vector<control::ControlVector>> by_strategy;
    for (const auto& spec : args.controls) {
      auto eq = spec.find('=');
      if (eq == std::string::npos) {
        throw ValidationError("--controls expects name=path, got: " + spec);
      }
      std::string name = spec.substr(0, eq);
      std::string path = spec.substr(eq + 1);
      require_file(path, "controls");
      for (const auto& [id, v] : control::read_controls_jsonl(path)) {
        by_strategy[name].push_back(v);
      }
    }
    metrics::write_distribution_csv(out_dir / "report_distribution.csv",
                                    metrics::control_distribution_report(by_strategy));
    wrote_anything = true;
  }

  if (args.correlation_samples > 0) {
    if (args.correlation_samples < 3) {
      throw ValidationError("--correlation-samples must be at least 3");
    }
    auto ctx = make_context(in);
    auto simplifier = simplify::make_simplifier(args.simplifier, in.freq ? &*in.freq : nullptr);
    Rng rng(args.common.seed);
    std::vector<control::ControlVector> samples;
    std::vector<std::vector<double>> metric_rows;
    std::vector<std::string> metric_names = {"sari", "ari_accuracy", "flesch", "pct_unchanged"};
    for (int s = 0; s < args.correlation_samples; ++s) {
      std::array<double, 5> p{};
      for (auto& x : p) x = static_cast<double>(rng.bounded(control::kGridSize) + 1) / 20.0;
      auto vector = control::ControlVector::from_primary(p);
      strategies::Strategy strategy;
      strategy.kind = strategies::StrategyKind::corpus_level;
      strategy.corpus_vector = vector;
      strategies::PipelineConfig config;
      config.jobs = args.common.jobs;
      auto result = strategies::run_pipeline(in.records, strategy, *simplifier, ctx, config);
      double flesch_sum = 0.0;
      int flesch_count = 0;
      for (const auto& [id, text] : result.outputs) {
        if (trim(text).empty()) continue;
        flesch_sum += textstats::flesch_reading_ease(text);
        ++flesch_count;
      }
      samples.push_back(vector);
      metric_rows.push_back({result.report.corpus_sari.sari, result.report.ari_accuracy_pct,
                             flesch_count ? flesch_sum / flesch_count : 0.0,
                             result.report.pct_unchanged_pct});
    }
    auto table = metrics::control_metric_correlation(samples, metric_names, metric_rows);
    metrics::write_correlation_csv(out_dir / "report_correlation.csv", table);
    wrote_anything = true;
  }

  if (!wrote_anything) {
    throw ValidationError("report: nothing to do (pass --outputs, --controls, or --correlation-samples)");
  }
  std::cerr << "report: wrote analysis files to " << out_dir.string() << "\n";
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Grade-targeted text simplification control toolkit"};
  app.set_config("--config", "", "Read options from an INI-style config file");
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--seed", common.seed, "Seed for every stochastic component");
  app.add_option("--jobs", common.jobs, "Worker thread cap for per-record parallelism");

  auto add_common = [&](CLI::App* cmd, CommonOptions& opts, bool need_freq, bool need_aoa,
                        bool need_conllu) {
    cmd->add_option("--dataset", opts.dataset, "Dataset file (JSONL or TSV)")->required();
    cmd->add_option("--format", opts.format, "Dataset format: jsonl or tsv");
    auto* conllu = cmd->add_option("--conllu", opts.conllu, "CoNLL-U sidecar with parses");
    if (need_conllu) conllu->required();
    auto* freq = cmd->add_option("--freq", opts.freq, "Frequency-rank lexicon TSV");
    if (need_freq) freq->required();
    auto* aoa = cmd->add_option("--aoa", opts.aoa, "Age-of-acquisition lexicon TSV");
    if (need_aoa) aoa->required();
  };

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract-controls", "Compute oracle control vectors");
  add_common(extract_cmd, extract.common, true, false, false);
  extract_cmd->add_option("--out", extract.out, "Output controls JSONL")->required();
  extract_cmd->add_flag("--invert-ratios", extract.invert_ratios,
                        "Flip every ratio to the opposite direction convention");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train-predictor", "Train the control predictor");
  add_common(train_cmd, train.common, true, true, false);
  train_cmd->add_option("--controls", train.controls, "Precomputed oracle controls JSONL");
  train_cmd->add_option("--mode", train.mode, "single (one model per control) or multi");
  train_cmd->add_option("--out-dir", train.out_dir, "Directory for model files")->required();
  train_cmd->add_option("--eval-out", train.eval_out, "Intrinsic eval JSON path");
  train_cmd->add_option("--n-trees", train.config.n_trees, "Boosting rounds");
  train_cmd->add_option("--learning-rate", train.config.learning_rate, "Shrinkage per round");
  train_cmd->add_option("--max-depth", train.config.max_depth, "Tree depth cap");
  train_cmd->add_option("--min-samples-leaf", train.config.min_samples_leaf, "Leaf size floor");
  train_cmd->add_option("--validation-fraction", train.config.validation_fraction,
                        "Held-out fraction for early stopping (0 disables)");
  train_cmd->add_option("--patience", train.config.early_stopping_patience,
                        "Early stopping patience in rounds");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict control vectors for a dataset");
  add_common(predict_cmd, predict.common, true, true, false);
  predict_cmd->add_option("--model-dir", predict.model_dir, "Trained model directory")->required();
  predict_cmd->add_option("--mode", predict.mode, "single or multi");
  predict_cmd->add_option("--out", predict.out, "Output predictions JSONL")->required();

  SearchArgs search_args;
  auto* search_cmd = app.add_subcommand("search", "Corpus-level control vector search");
  add_common(search_cmd, search_args.common, true, false, false);
  search_cmd->add_option("--method", search_args.method, "one-plus-one or random");
  search_cmd->add_option("--simplifier", search_args.simplifier,
                         "replay:<file> | exec:<cmd> | http:<url> | rule");
  search_cmd->add_option("--budget", search_args.budget, "Evaluation budget");
  search_cmd->add_option("--sigma0", search_args.sigma0, "Initial mutation scale");
  search_cmd->add_option("--out", search_args.out, "Best vector JSON path")->required();
  search_cmd->add_option("--trace", search_args.trace, "Trace CSV path");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run a strategy end to end and score it");
  add_common(evaluate_cmd, evaluate.common, true, false, false);
  evaluate_cmd->add_option("--strategy", evaluate.strategy,
                           "corpus-level|avg-grade|cp-single|cp-multi|oracle|grade-tokens");
  evaluate_cmd->add_option("--simplifier", evaluate.simplifier,
                           "replay:<file> | exec:<cmd> | http:<url> | rule");
  evaluate_cmd->add_option("--vector", evaluate.vector_arg, "Corpus-level vector w,c,l,wr,dtd");
  evaluate_cmd->add_option("--vector-file", evaluate.vector_file, "Corpus-level vector JSON file");
  evaluate_cmd->add_option("--controls", evaluate.controls, "Oracle controls JSONL for avg-grade");
  evaluate_cmd->add_option("--model-dir", evaluate.model_dir, "Model directory for cp strategies");
  evaluate_cmd->add_option("--adequacy", evaluate.adequacy, "TSV id<TAB>score merged into report");
  evaluate_cmd->add_option("--out-dir", evaluate.out_dir, "Report output directory");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Emit analysis reports from stored artifacts");
  add_common(report_cmd, report.common, false, false, false);
  report_cmd->add_option("--outputs", report.outputs, "Replay outputs JSONL to score");
  report_cmd->add_option("--controls", report.controls,
                         "name=path controls JSONL, repeatable, for the distribution table");
  report_cmd->add_option("--correlation-samples", report.correlation_samples,
                         "Random corpus-level vectors to sample for the correlation table");
  report_cmd->add_option("--simplifier", report.simplifier, "Simplifier for correlation sampling");
  report_cmd->add_option("--out-dir", report.out_dir, "Report output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    extract.common.seed = common.seed;
    extract.common.jobs = common.jobs;
    train.common.seed = common.seed;
    train.common.jobs = common.jobs;
    predict.common.seed = common.seed;
    predict.common.jobs = common.jobs;
    search_args.common.seed = common.seed;
    search_args.common.jobs = common.jobs;
    evaluate.common.seed = common.seed;
    evaluate.common.jobs = common.jobs;
    report.common.seed = common.seed;
    report.common.jobs = common.jobs;

    if (extract_cmd->parsed()) cmd_extract_controls(extract);
    if (train_cmd->parsed()) cmd_train_predictor(train);
    if (predict_cmd->parsed()) cmd_predict(predict);
    if (search_cmd->parsed()) cmd_search(search_args);
    if (evaluate_cmd->parsed()) cmd_evaluate(evaluate);
    if (report_cmd->parsed()) cmd_report(report);
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace tsc::cli
