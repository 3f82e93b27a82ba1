#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsc/control.hpp"

namespace tsc::metrics {

/// SARI with its three per-operation components, each averaged over
/// n-gram orders 1..max_n. sari = 100 * (add_f1 + keep_f1 + del_p) / 3.
struct SariScore {
  double sari = 0.0;
  double add_f1 = 0.0;
  double keep_f1 = 0.0;
  double del_p = 0.0;
  int max_n = 4;
};

/// N-gram set comparison of output edits against reference edits relative
/// to the source. Tokens are lowercased word tokens. With several
/// references the reference side of each component weights an n-gram by
/// the fraction of references exhibiting the edit. Empty-set conventions:
/// empty system set scores 1 against an empty reference side and 0
/// against a non-empty one; a non-empty system set scores 0 precision
/// against an empty reference side.
SariScore sari(std::string_view source, std::string_view output,
               const std::vector<std::string>& references, int max_n = 4);

/// Percentage of pairs whose output ARI grade is within one grade of the
/// reference ARI grade.
double ari_accuracy(const std::vector<std::string>& outputs,
                    const std::vector<std::string>& references);

/// Percentage of outputs byte-identical to their source after trimming
/// outer whitespace.
double pct_unchanged(const std::vector<std::string>& sources,
                     const std::vector<std::string>& outputs);

struct EditRow {
  int target_grade = 0;
  int count = 0;
  double add_f1 = 0.0;
  double keep_f1 = 0.0;
  double del_p = 0.0;
};

/// Mean per-operation scores grouped by target grade, ascending.
std::vector<EditRow> edit_report_by_grade(const std::vector<std::pair<int, SariScore>>& scored);

struct OverUnderReport {
  std::map<int, int> histogram;  // ari_grade(output) - ari_grade(reference)
  double exact_match_rate = 0.0;
};

OverUnderReport over_under_report(const std::vector<std::string>& outputs,
                                  const std::vector<std::string>& references);

struct CorrelationTable {
  std::vector<std::string> control_names;
  std::vector<std::string> metric_names;
  // cells[i][j]: correlation of control i with metric j; empty when a
  // column has zero variance.
  std::vector<std::vector<std::optional<double>>> cells;
};

/// Pearson correlation between each control dimension and each metric
/// column across samples (needs at least 3).
CorrelationTable control_metric_correlation(const std::vector<control::ControlVector>& controls,
                                            const std::vector<std::string>& metric_names,
                                            const std::vector<std::vector<double>>& metric_values);

struct DistributionRow {
  std::string strategy;
  std::string control;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Five-number summary per control dimension per strategy.
std::vector<DistributionRow> control_distribution_report(
    const std::map<std::string, std::vector<control::ControlVector>>& by_strategy);

void write_edit_report_csv(const std::filesystem::path& path, const std::vector<EditRow>& rows);
void write_over_under_csv(const std::filesystem::path& path, const OverUnderReport& report);
void write_correlation_csv(const std::filesystem::path& path, const CorrelationTable& table);
void write_distribution_csv(const std::filesystem::path& path,
                            const std::vector<DistributionRow>& rows);

struct RecordFailure {
  std::string id;
  std::string error;
};

/// Corpus-level evaluation summary plus the per-grade and distribution
/// tables behind the analysis reports.
struct EvalReport {
  std::string strategy;
  int n_records = 0;
  int n_scored = 0;
  SariScore corpus_sari;
  double ari_accuracy_pct = 0.0;
  double pct_unchanged_pct = 0.0;
  std::optional<double> mean_adequacy;
  std::vector<EditRow> per_grade;
  std::vector<DistributionRow> control_distribution;
  OverUnderReport over_under;
  std::vector<RecordFailure> failures;

  std::string to_json_string() const;
};

}  // namespace tsc::metrics
