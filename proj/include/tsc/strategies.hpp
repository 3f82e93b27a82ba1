#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsc/control.hpp"
#include "tsc/corpus.hpp"
#include "tsc/metrics.hpp"
#include "tsc/predictor.hpp"
#include "tsc/simplify.hpp"

namespace tsc::strategies {

enum class StrategyKind { corpus_level, avg_grade, cp_single, cp_multi, oracle, grade_tokens };

std::string_view strategy_name(StrategyKind kind);
std::optional<StrategyKind> strategy_from_name(std::string_view name);

/// How control inputs are set for each record. Non-owning: the vector,
/// table, or predictor must outlive the strategy.
struct Strategy {
  StrategyKind kind = StrategyKind::oracle;
  control::ControlVector corpus_vector;                        // corpus_level
  const control::AvgGradeTable* table = nullptr;               // avg_grade
  const predictor::TrainedPredictor* predictor = nullptr;      // cp_single / cp_multi
};

struct StrategyContext {
  const corpus::ParseMap* parses = nullptr;
  const corpus::Lexicon* freq = nullptr;
  const corpus::Lexicon* aoa = nullptr;  // needed by cp_* strategies
  // Records without parses degrade to dtd = 1 instead of failing when false.
  bool require_parse = false;
  control::ControlOptions control_options{};
};

struct ResolvedInput {
  std::string id;
  std::string prefixed_input;
  std::string source;
  std::optional<control::ControlVector> controls;       // absent for grade_tokens
  std::optional<std::pair<int, int>> grades;            // (source, target)
};

/// Builds the model input for one record under the given strategy. The
/// source grade falls back to the ARI grade of the source text.
ResolvedInput resolve_input(const Strategy& strategy, const corpus::DatasetRecord& record,
                            const StrategyContext& context);

struct PipelineConfig {
  int jobs = 1;
  int sari_max_n = 4;
  std::chrono::milliseconds request_timeout{10000};
  // Optional per-record adequacy scores merged into the report.
  std::map<std::string, double> adequacy;
};

struct PipelineResult {
  metrics::EvalReport report;
  std::vector<ResolvedInput> inputs;                     // per resolved record
  std::vector<std::pair<std::string, std::string>> outputs;  // (id, output text)
};

/// resolve → simplify → score. Per-record failures are recorded in the
/// report, not fatal; an empty dataset is an error.
PipelineResult run_pipeline(const std::vector<corpus::DatasetRecord>& records,
                            const Strategy& strategy, simplify::Simplifier& simplifier,
                            const StrategyContext& context, const PipelineConfig& config = {});

}  // namespace tsc::strategies
