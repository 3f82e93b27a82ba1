#include "tsc/strategies.hpp"

#include <algorithm>

#include "tsc/textstats.hpp"
#include "tsc/util.hpp"

namespace tsc::strategies {

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::corpus_level: return "corpus-level";
    case StrategyKind::avg_grade: return "avg-grade";
    case StrategyKind::cp_single: return "cp-single";
    case StrategyKind::cp_multi: return "cp-multi";
    case StrategyKind::oracle: return "oracle";
    case StrategyKind::grade_tokens: return "grade-tokens";
  }
  return "?";
}

std::optional<StrategyKind> strategy_from_name(std::string_view name) {
  for (auto kind : {StrategyKind::corpus_level, StrategyKind::avg_grade, StrategyKind::cp_single,
                    StrategyKind::cp_multi, StrategyKind::oracle, StrategyKind::grade_tokens}) {
    if (strategy_name(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

int resolve_source_grade(const corpus::DatasetRecord& record) {
  if (record.source_grade) return *record.source_grade;
  return textstats::ari_grade(record.source);
}

int require_target_grade(const corpus::DatasetRecord& record) {
  if (!record.target_grade) {
    throw ValidationError("record '" + record.id + "': target grade required by strategy");
  }
  return *record.target_grade;
}

}  // namespace

ResolvedInput resolve_input(const Strategy& strategy, const corpus::DatasetRecord& record,
                            const StrategyContext& context) {
  ResolvedInput out;
  out.id = record.id;
  out.source = record.source;

  switch (strategy.kind) {
    case StrategyKind::corpus_level: {
      out.controls = control::quantize(strategy.corpus_vector);
      break;
    }
    case StrategyKind::avg_grade: {
      if (!strategy.table) throw ValidationError("avg-grade strategy without a table");
      int sg = resolve_source_grade(record);
      int tg = require_target_grade(record);
      out.grades = {sg, tg};
      out.controls = control::quantize(strategy.table->lookup(sg, tg));
      break;
    }
    case StrategyKind::cp_single:
    case StrategyKind::cp_multi: {
      if (!strategy.predictor) throw ValidationError("cp strategy without a trained predictor");
      if (!context.freq || !context.aoa) {
        throw ValidationError("cp strategy requires frequency and age-of-acquisition lexicons");
      }
      int sg = resolve_source_grade(record);
      int tg = require_target_grade(record);
      out.grades = {sg, tg};
      const corpus::ParsedSentence* parse =
          context.parses ? context.parses->find(record.id, corpus::Side::source) : nullptr;
      predictor::FeatureOptions fopts;
      fopts.allow_missing_parse = !context.require_parse;
      auto features = predictor::extract_features(record, parse, *context.freq, *context.aoa, fopts);
      out.controls = predictor::predict_controls(*strategy.predictor, features);
      break;
    }
    case StrategyKind::oracle: {
      if (!record.reference) {
        throw ValidationError("record '" + record.id + "': oracle strategy requires a reference");
      }
      if (!context.freq) throw ValidationError("oracle strategy requires a frequency lexicon");
      const corpus::ParsedSentence* src_parse =
          context.parses ? context.parses->find(record.id, corpus::Side::source) : nullptr;
      const corpus::ParsedSentence* ref_parse =
          context.parses ? context.parses->find(record.id, corpus::Side::reference) : nullptr;
      auto opts = context.control_options;
      opts.require_parse = context.require_parse;
      out.controls = control::quantize(
          control::compute_controls(record.source, *record.reference, src_parse, ref_parse,
                                    *context.freq, opts));
      break;
    }
    case StrategyKind::grade_tokens: {
      int sg = resolve_source_grade(record);
      int tg = require_target_grade(record);
      out.grades = {sg, tg};
      out.prefixed_input = control::format_grade_prefix(sg, tg, record.source);
      return out;
    }
  }

  out.prefixed_input = control::format_control_prefix(*out.controls, record.source);
  return out;
}

PipelineResult run_pipeline(const std::vector<corpus::DatasetRecord>& records,
                            const Strategy& strategy, simplify::Simplifier& simplifier,
                            const StrategyContext& context, const PipelineConfig& config) {
  if (records.empty()) throw ValidationError("run_pipeline: empty dataset");

  PipelineResult result;
  auto& report = result.report;
  report.strategy = std::string(strategy_name(strategy.kind));
  report.n_records = static_cast<int>(records.size());

  // Resolve inputs; failures drop the record from scoring.
  struct Slot {
    bool ok = false;
    ResolvedInput input;
    std::string error;
  };
  std::vector<Slot> slots(records.size());
  parallel_for(records.size(), config.jobs, [&](size_t i) {
    try {
      slots[i].input = resolve_input(strategy, records[i], context);
      slots[i].ok = true;
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  std::vector<size_t> live;
  std::vector<simplify::SimplifierRequest> requests;
  for (size_t i = 0; i < records.size(); ++i) {
    if (!slots[i].ok) {
      report.failures.push_back({records[i].id, "resolve: " + slots[i].error});
      continue;
    }
    live.push_back(i);
    requests.push_back({records[i].id, slots[i].input.prefixed_input, config.request_timeout});
  }
  if (live.empty()) throw RunError("run_pipeline: every record failed to resolve");

  auto outcomes = simplifier.simplify_batch(requests);

  // Score records that produced an output and carry a reference.
  std::vector<std::string> scored_sources, scored_outputs, scored_references;
  std::vector<std::pair<int, metrics::SariScore>> graded_scores;
  std::vector<metrics::SariScore> sari_scores;
  std::vector<control::ControlVector> resolved_controls;
  double adequacy_sum = 0.0;
  int adequacy_count = 0;

  for (size_t k = 0; k < live.size(); ++k) {
    size_t i = live[k];
    const auto& record = records[i];
    auto& slot = slots[i];
    result.inputs.push_back(slot.input);
    if (!outcomes[k].ok()) {
      report.failures.push_back({record.id, "simplify: " + *outcomes[k].error});
      continue;
    }
    const std::string& output = outcomes[k].response.output;
    result.outputs.emplace_back(record.id, output);
    if (!record.reference) {
      report.failures.push_back({record.id, "score: record has no reference"});
      continue;
    }
    if (trim(output).empty()) {
      report.failures.push_back({record.id, "score: empty output"});
      continue;
    }
    auto score = metrics::sari(record.source, output, {*record.reference}, config.sari_max_n);
    sari_scores.push_back(score);
    scored_sources.push_back(record.source);
    scored_outputs.push_back(output);
    scored_references.push_back(*record.reference);
    if (record.target_grade) graded_scores.emplace_back(*record.target_grade, score);
    if (slot.input.controls) resolved_controls.push_back(*slot.input.controls);
    auto adequacy = config.adequacy.find(record.id);
    if (adequacy != config.adequacy.end()) {
      adequacy_sum += adequacy->second;
      ++adequacy_count;
    }
  }

  if (sari_scores.empty()) {
    throw RunError("run_pipeline: no scorable records (references missing or all records failed)");
  }
  report.n_scored = static_cast<int>(sari_scores.size());

  metrics::SariScore corpus;
  corpus.max_n = config.sari_max_n;
  for (const auto& s : sari_scores) {
    corpus.sari += s.sari;
    corpus.add_f1 += s.add_f1;
    corpus.keep_f1 += s.keep_f1;
    corpus.del_p += s.del_p;
  }
  double n = static_cast<double>(sari_scores.size());
  corpus.sari /= n;
  corpus.add_f1 /= n;
  corpus.keep_f1 /= n;
  corpus.del_p /= n;
  report.corpus_sari = corpus;

  report.ari_accuracy_pct = metrics::ari_accuracy(scored_outputs, scored_references);
  report.pct_unchanged_pct = metrics::pct_unchanged(scored_sources, scored_outputs);
  report.over_under = metrics::over_under_report(scored_outputs, scored_references);
  if (!graded_scores.empty()) report.per_grade = metrics::edit_report_by_grade(graded_scores);
  if (!resolved_controls.empty()) {
    std::map<std::string, std::vector<control::ControlVector>> by_strategy;
    by_strategy[report.strategy] = std::move(resolved_controls);
    report.control_distribution = metrics::control_distribution_report(by_strategy);
  }
  if (adequacy_count > 0) report.mean_adequacy = adequacy_sum / adequacy_count;
  return result;
}

}  // namespace tsc::strategies
