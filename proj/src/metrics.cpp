#include "tsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "tsc/textstats.hpp"
#include "tsc/util.hpp"

namespace tsc::metrics {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> lower_tokens(std::string_view text) {
  auto words = textstats::word_forms(text);
  for (auto& w : words) w = lower_ascii(w);
  return words;
}

std::unordered_set<std::string> ngram_set(const std::vector<std::string>& tokens, int n) {
  std::unordered_set<std::string> out;
  if (static_cast<int>(tokens.size()) < n) return out;
  for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
    std::string g = tokens[i];
    for (int k = 1; k < n; ++k) {
      g += '\x1f';
      g += tokens[i + static_cast<size_t>(k)];
    }
    out.insert(std::move(g));
  }
  return out;
}

double f1_with_conventions(size_t system_size, double good, double reference_mass) {
  if (system_size == 0) return reference_mass == 0.0 ? 1.0 : 0.0;
  if (reference_mass == 0.0) return 0.0;
  double precision = good / static_cast<double>(system_size);
  double recall = good / reference_mass;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double precision_with_conventions(size_t system_size, double good, double reference_mass) {
  if (system_size == 0) return reference_mass == 0.0 ? 1.0 : 0.0;
  return good / static_cast<double>(system_size);
}

}  // namespace

SariScore sari(std::string_view source, std::string_view output,
               const std::vector<std::string>& references, int max_n) {
  if (references.empty()) throw ValidationError("sari: at least one reference is required");
  if (max_n < 1) throw ValidationError("sari: max_n must be at least 1");

  auto source_tokens = lower_tokens(source);
  auto output_tokens = lower_tokens(output);
  std::vector<std::vector<std::string>> reference_tokens;
  reference_tokens.reserve(references.size());
  for (const auto& ref : references) reference_tokens.push_back(lower_tokens(ref));
  const double n_refs = static_cast<double>(references.size());

  double add_sum = 0.0, keep_sum = 0.0, del_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    auto src = ngram_set(source_tokens, n);
    auto out = ngram_set(output_tokens, n);
    // For each n-gram, the number of references containing it.
    std::unordered_map<std::string, int> ref_contains;
    for (const auto& toks : reference_tokens) {
      for (const auto& g : ngram_set(toks, n)) ++ref_contains[g];
    }
    auto ref_frac = [&](const std::string& g) {
      auto it = ref_contains.find(g);
      return it == ref_contains.end() ? 0.0 : static_cast<double>(it->second) / n_refs;
    };

    // ADD: n-grams in the output but not the source, against n-grams some
    // reference introduced.
    size_t add_size = 0;
    double add_good = 0.0;
    for (const auto& g : out) {
      if (src.count(g)) continue;
      ++add_size;
      add_good += ref_frac(g);
    }
    double add_ref_mass = 0.0;
    for (const auto& [g, cnt] : ref_contains) {
      if (!src.count(g)) add_ref_mass += static_cast<double>(cnt) / n_refs;
    }
    add_sum += f1_with_conventions(add_size, add_good, add_ref_mass);

    // KEEP: n-grams retained from the source.
    size_t keep_size = 0;
    double keep_good = 0.0, keep_ref_mass = 0.0;
    for (const auto& g : src) {
      double frac = ref_frac(g);
      keep_ref_mass += frac;
      if (out.count(g)) {
        ++keep_size;
        keep_good += frac;
      }
    }
    keep_sum += f1_with_conventions(keep_size, keep_good, keep_ref_mass);

    // DEL: n-grams removed from the source, weighted by the fraction of
    // references that also removed them. Precision only.
    size_t del_size = 0;
    double del_good = 0.0, del_ref_mass = 0.0;
    for (const auto& g : src) {
      double deleted_frac = 1.0 - ref_frac(g);
      del_ref_mass += deleted_frac;
      if (!out.count(g)) {
        ++del_size;
        del_good += deleted_frac;
      }
    }
    del_sum += precision_with_conventions(del_size, del_good, del_ref_mass);
  }

  SariScore score;
  score.max_n = max_n;
  score.add_f1 = add_sum / max_n;
  score.keep_f1 = keep_sum / max_n;
  score.del_p = del_sum / max_n;
  score.sari = 100.0 * (score.add_f1 + score.keep_f1 + score.del_p) / 3.0;
  return score;
}

double ari_accuracy(const std::vector<std::string>& outputs,
                    const std::vector<std::string>& references) {
  if (outputs.size() != references.size()) throw ValidationError("ari_accuracy: length mismatch");
  if (outputs.empty()) throw ValidationError("ari_accuracy: empty input");
  int hits = 0;
  for (size_t i = 0; i < outputs.size(); ++i) {
    int og = textstats::ari_grade(outputs[i]);
    int rg = textstats::ari_grade(references[i]);
    if (std::abs(og - rg) <= 1) ++hits;
  }
  return 100.0 * hits / static_cast<double>(outputs.size());
}

double pct_unchanged(const std::vector<std::string>& sources,
                     const std::vector<std::string>& outputs) {
  if (sources.size() != outputs.size()) throw ValidationError("pct_unchanged: length mismatch");
  if (sources.empty()) throw ValidationError("pct_unchanged: empty input");
  int copies = 0;
  for (size_t i = 0; i < sources.size(); ++i) {
    if (trim(sources[i]) == trim(outputs[i])) ++copies;
  }
  return 100.0 * copies / static_cast<double>(sources.size());
}

std::vector<EditRow> edit_report_by_grade(const std::vector<std::pair<int, SariScore>>& scored) {
  if (scored.empty()) throw ValidationError("edit_report_by_grade: no graded records");
  std::map<int, EditRow> rows;
  for (const auto& [grade, score] : scored) {
    auto& row = rows[grade];
    row.target_grade = grade;
    row.count += 1;
    row.add_f1 += score.add_f1;
    row.keep_f1 += score.keep_f1;
    row.del_p += score.del_p;
  }
  std::vector<EditRow> out;
  out.reserve(rows.size());
  for (auto& [grade, row] : rows) {
    row.add_f1 /= row.count;
    row.keep_f1 /= row.count;
    row.del_p /= row.count;
    out.push_back(row);
  }
  return out;
}

OverUnderReport over_under_report(const std::vector<std::string>& outputs,
                                  const std::vector<std::string>& references) {
  if (outputs.size() != references.size()) throw ValidationError("over_under_report: length mismatch");
  if (outputs.empty()) throw ValidationError("over_under_report: empty input");
  OverUnderReport report;
  for (size_t i = 0; i < outputs.size(); ++i) {
    int diff = textstats::ari_grade(outputs[i]) - textstats::ari_grade(references[i]);
    ++report.histogram[diff];
  }
  auto zero = report.histogram.find(0);
  report.exact_match_rate =
      zero == report.histogram.end()
          ? 0.0
          : static_cast<double>(zero->second) / static_cast<double>(outputs.size());
  return report;
}

CorrelationTable control_metric_correlation(const std::vector<control::ControlVector>& controls,
                                            const std::vector<std::string>& metric_names,
                                            const std::vector<std::vector<double>>& metric_values) {
  if (controls.size() < 3) throw ValidationError("control_metric_correlation: need at least 3 samples");
  if (controls.size() != metric_values.size()) {
    throw ValidationError("control_metric_correlation: length mismatch");
  }
  for (const auto& row : metric_values) {
    if (row.size() != metric_names.size()) {
      throw ValidationError("control_metric_correlation: metric row width mismatch");
    }
  }
  CorrelationTable table;
  table.control_names.assign(control::kControlNames.begin(), control::kControlNames.end());
  table.metric_names = metric_names;
  const size_t n = controls.size();
  for (size_t ci = 0; ci < table.control_names.size(); ++ci) {
    std::vector<double> control_col(n);
    for (size_t i = 0; i < n; ++i) control_col[i] = controls[i].primary()[ci];
    std::vector<std::optional<double>> row;
    for (size_t mi = 0; mi < metric_names.size(); ++mi) {
      std::vector<double> metric_col(n);
      for (size_t i = 0; i < n; ++i) metric_col[i] = metric_values[i][mi];
      row.push_back(pearson(control_col, metric_col));
    }
    table.cells.push_back(std::move(row));
  }
  return table;
}

std::vector<DistributionRow> control_distribution_report(
    const std::map<std::string, std::vector<control::ControlVector>>& by_strategy) {
  std::vector<DistributionRow> rows;
  for (const auto& [strategy, vectors] : by_strategy) {
    if (vectors.empty()) {
      throw ValidationError("control_distribution_report: empty bucket for strategy '" + strategy +
                            "'");
    }
    for (size_t ci = 0; ci < control::kControlNames.size(); ++ci) {
      std::vector<double> values(vectors.size());
      for (size_t i = 0; i < vectors.size(); ++i) values[i] = vectors[i].primary()[ci];
      std::sort(values.begin(), values.end());
      DistributionRow row;
      row.strategy = strategy;
      row.control = std::string(control::kControlNames[ci]);
      row.min = values.front();
      row.q1 = quantile_sorted(values, 0.25);
      row.median = quantile_sorted(values, 0.5);
      row.q3 = quantile_sorted(values, 0.75);
      row.max = values.back();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write report file: " + path.string());
  return out;
}

}  // namespace

void write_edit_report_csv(const std::filesystem::path& path, const std::vector<EditRow>& rows) {
  auto out = open_csv(path);
  out << csv_row({"target_grade", "count", "add_f1", "keep_f1", "del_p"});
  for (const auto& row : rows) {
    out << csv_row({std::to_string(row.target_grade), std::to_string(row.count),
                    format_double(row.add_f1, 6), format_double(row.keep_f1, 6),
                    format_double(row.del_p, 6)});
  }
}

void write_over_under_csv(const std::filesystem::path& path, const OverUnderReport& report) {
  auto out = open_csv(path);
  out << csv_row({"grade_diff", "count"});
  for (const auto& [diff, count] : report.histogram) {
    out << csv_row({std::to_string(diff), std::to_string(count)});
  }
}

void write_correlation_csv(const std::filesystem::path& path, const CorrelationTable& table) {
  auto out = open_csv(path);
  std::vector<std::string> header = {"control"};
  header.insert(header.end(), table.metric_names.begin(), table.metric_names.end());
  out << csv_row(header);
  for (size_t i = 0; i < table.control_names.size(); ++i) {
    std::vector<std::string> row = {table.control_names[i]};
    for (const auto& cell : table.cells[i]) {
      row.push_back(cell ? format_double(*cell, 6) : "");
    }
    out << csv_row(row);
  }
}

void write_distribution_csv(const std::filesystem::path& path,
                            const std::vector<DistributionRow>& rows) {
  auto out = open_csv(path);
  out << csv_row({"strategy", "control", "min", "q1", "median", "q3", "max"});
  for (const auto& row : rows) {
    out << csv_row({row.strategy, row.control, format_double(row.min, 6),
                    format_double(row.q1, 6), format_double(row.median, 6),
                    format_double(row.q3, 6), format_double(row.max, 6)});
  }
}

std::string EvalReport::to_json_string() const {
  ordered_json j;
  j["strategy"] = strategy;
  j["n_records"] = n_records;
  j["n_scored"] = n_scored;
  j["n_failed"] = static_cast<int>(failures.size());
  j["sari"] = corpus_sari.sari;
  j["add_f1"] = corpus_sari.add_f1;
  j["keep_f1"] = corpus_sari.keep_f1;
  j["del_p"] = corpus_sari.del_p;
  j["ari_accuracy"] = ari_accuracy_pct;
  j["pct_unchanged"] = pct_unchanged_pct;
  if (mean_adequacy) {
    j["adequacy"] = *mean_adequacy;
  } else {
    j["adequacy"] = nullptr;
  }
  j["per_grade"] = ordered_json::array();
  for (const auto& row : per_grade) {
    ordered_json r;
    r["target_grade"] = row.target_grade;
    r["count"] = row.count;
    r["add_f1"] = row.add_f1;
    r["keep_f1"] = row.keep_f1;
    r["del_p"] = row.del_p;
    j["per_grade"].push_back(r);
  }
  j["control_distribution"] = ordered_json::array();
  for (const auto& row : control_distribution) {
    ordered_json r;
    r["strategy"] = row.strategy;
    r["control"] = row.control;
    r["min"] = row.min;
    r["q1"] = row.q1;
    r["median"] = row.median;
    r["q3"] = row.q3;
    r["max"] = row.max;
    j["control_distribution"].push_back(r);
  }
  j["over_under"] = ordered_json::object();
  for (const auto& [diff, count] : over_under.histogram) {
    j["over_under"][std::to_string(diff)] = count;
  }
  j["failures"] = ordered_json::array();
  for (const auto& failure : failures) {
    ordered_json f;
    f["id"] = failure.id;
    f["error"] = failure.error;
    j["failures"].push_back(f);
  }
  return j.dump(2);
}

}  // namespace tsc::metrics
