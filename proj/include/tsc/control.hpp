#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsc/corpus.hpp"

namespace tsc::control {

inline constexpr double kGridStep = 0.05;
inline constexpr double kGridMin = 0.05;
inline constexpr double kGridMax = 2.00;
inline constexpr int kGridSize = 40;  // 0.05 .. 2.00

inline constexpr std::array<std::string_view, 5> kControlNames = {"w", "c", "l", "wr", "dtd"};

/// The low-level control values for one complex→simple pair. w, c, l, wr,
/// dtd are always present; rl and cc are the optional extended pair.
struct ControlVector {
  double w = 1.0;
  double c = 1.0;
  double l = 1.0;
  double wr = 1.0;
  double dtd = 1.0;
  std::optional<double> rl;
  std::optional<double> cc;

  std::array<double, 5> primary() const { return {w, c, l, wr, dtd}; }
  static ControlVector from_primary(const std::array<double, 5>& p) {
    return {p[0], p[1], p[2], p[3], p[4], std::nullopt, std::nullopt};
  }
  static ControlVector all_ones() { return {}; }

  bool operator==(const ControlVector&) const = default;
};

struct ControlOptions {
  // Default direction: w, c, wr are target/source and dtd is source/target.
  // invert_ratios flips every ratio to the opposite convention.
  bool invert_ratios = false;
  bool with_extended = true;  // compute rl and cc
  // When a parse is missing: throw if true, else fall back to dtd = 1.
  bool require_parse = true;
};

/// Oracle controls measured from a (source, target) pair. Parses may be
/// null only when options.require_parse is false.
ControlVector compute_controls(std::string_view source, std::string_view target,
                               const corpus::ParsedSentence* source_parse,
                               const corpus::ParsedSentence* target_parse,
                               const corpus::Lexicon& freq, const ControlOptions& options = {});

/// Nearest 0.05 grid value, ties rounding up, clamped to [0.05, 2.00].
double quantize_value(double v);
ControlVector quantize(const ControlVector& v);
bool is_quantized(const ControlVector& v);

/// `W_<w> C_<c> L_<l> WR_<wr> DTD_<dtd> <source>` with two-decimal values.
/// The vector must already be quantized.
std::string format_control_prefix(const ControlVector& v, std::string_view source);

/// `SG_<sg> TG_<tg> <source>`; grades must be within [1, 13].
std::string format_grade_prefix(int source_grade, int target_grade, std::string_view source);

struct ParsedControlPrefix {
  ControlVector controls;
  std::string source;
};
std::optional<ParsedControlPrefix> parse_control_prefix(std::string_view input);

struct ParsedGradePrefix {
  int source_grade = 0;
  int target_grade = 0;
  std::string source;
};
std::optional<ParsedGradePrefix> parse_grade_prefix(std::string_view input);

/// One oracle vector with its grade pair, the unit AvgGradeTable aggregates.
struct GradedControls {
  int source_grade = 0;
  int target_grade = 0;
  ControlVector controls;
};

/// Element-wise mean control vector per (source grade, target grade) pair.
/// Lookups of unseen pairs fall back to the global mean.
class AvgGradeTable {
 public:
  struct Cell {
    ControlVector mean;
    int count = 0;
  };

  const ControlVector& lookup(int source_grade, int target_grade) const;
  const Cell* cell(int source_grade, int target_grade) const;
  const std::map<std::pair<int, int>, Cell>& cells() const { return cells_; }
  const ControlVector& global_mean() const { return global_mean_; }
  int total_count() const { return total_; }

  friend AvgGradeTable build_avg_grade_table(const std::vector<GradedControls>& rows);

 private:
  std::map<std::pair<int, int>, Cell> cells_;
  ControlVector global_mean_;
  int total_ = 0;
};

AvgGradeTable build_avg_grade_table(const std::vector<GradedControls>& rows);

/// Controls JSONL: {"id":…, "w":…, "c":…, "l":…, "wr":…, "dtd":…, "rl":…, "cc":…}
/// with rl/cc omitted when absent.
void write_controls_jsonl(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, ControlVector>>& rows);
std::vector<std::pair<std::string, ControlVector>> read_controls_jsonl(const std::filesystem::path& path);

}  // namespace tsc::control
