#include "tsc/control.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "tsc/textstats.hpp"
#include "tsc/util.hpp"

namespace tsc::control {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

double ratio(double numerator, double denominator) {
  if (denominator == 0.0) return 1.0;  // neutral when undefined
  return numerator / denominator;
}

double copy_fraction(const std::vector<std::string>& source_words,
                     const std::vector<std::string>& target_words) {
  if (target_words.empty()) return 1.0;  // vacuously all copied
  std::unordered_set<std::string> source_set;
  for (const auto& w : source_words) source_set.insert(lower_ascii(w));
  int copied = 0;
  for (const auto& w : target_words) {
    if (source_set.count(lower_ascii(w))) ++copied;
  }
  return static_cast<double>(copied) / static_cast<double>(target_words.size());
}

}  // namespace

ControlVector compute_controls(std::string_view source, std::string_view target,
                               const corpus::ParsedSentence* source_parse,
                               const corpus::ParsedSentence* target_parse,
                               const corpus::Lexicon& freq, const ControlOptions& options) {
  if (trim(source).empty()) throw ValidationError("compute_controls: empty source");
  if (trim(target).empty()) throw ValidationError("compute_controls: zero-length target");

  auto source_stats = textstats::basic_stats(source);
  auto target_stats = textstats::basic_stats(target);
  auto source_words = textstats::word_forms(source);
  auto target_words = textstats::word_forms(target);

  // tgt/src for w, c, wr and src/tgt for dtd by default; the flag flips all.
  bool inv = options.invert_ratios;
  ControlVector v;
  v.w = inv ? ratio(source_stats.n_words, target_stats.n_words)
            : ratio(target_stats.n_words, source_stats.n_words);
  v.c = inv ? ratio(source_stats.n_chars, target_stats.n_chars)
            : ratio(target_stats.n_chars, source_stats.n_chars);
  v.l = textstats::levenshtein_similarity(source, target);

  double source_rank = textstats::word_rank(source_words, freq);
  double target_rank = textstats::word_rank(target_words, freq);
  if (inv) std::swap(source_rank, target_rank);
  v.wr = source_rank == 0.0 ? 1.0 : target_rank / source_rank;

  if (source_parse && target_parse) {
    double source_depth = textstats::tree_depth(*source_parse);
    double target_depth = textstats::tree_depth(*target_parse);
    v.dtd = inv ? target_depth / source_depth : source_depth / target_depth;
  } else if (options.require_parse) {
    throw ValidationError("compute_controls: missing parse for dtd");
  } else {
    v.dtd = 1.0;
  }

  if (options.with_extended) {
    v.rl = textstats::replace_levenshtein_similarity(source, target);
    v.cc = copy_fraction(source_words, target_words);
  }
  return v;
}

double quantize_value(double v) {
  // floor(v * 20 + 0.5) rounds ties up; the epsilon keeps decimal literals
  // like 1.025 (stored just below the true tie) on the round-up side.
  double steps = std::floor(v * 20.0 + 0.5 + 1e-9);
  double snapped = steps / 20.0;
  return std::min(std::max(snapped, kGridMin), kGridMax);
}

ControlVector quantize(const ControlVector& v) {
  ControlVector q = v;
  q.w = quantize_value(v.w);
  q.c = quantize_value(v.c);
  q.l = quantize_value(v.l);
  q.wr = quantize_value(v.wr);
  q.dtd = quantize_value(v.dtd);
  if (v.rl) q.rl = quantize_value(*v.rl);
  if (v.cc) q.cc = quantize_value(*v.cc);
  return q;
}

bool is_quantized(const ControlVector& v) {
  for (double x : v.primary()) {
    if (std::fabs(quantize_value(x) - x) > 1e-9) return false;
  }
  return true;
}

std::string format_control_prefix(const ControlVector& v, std::string_view source) {
  if (!is_quantized(v)) {
    throw ValidationError("format_control_prefix: control vector is not quantized");
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "W_%.2f C_%.2f L_%.2f WR_%.2f DTD_%.2f ", v.w, v.c, v.l, v.wr,
                v.dtd);
  return std::string(buf) + std::string(source);
}

std::string format_grade_prefix(int source_grade, int target_grade, std::string_view source) {
  auto in_range = [](int g) { return g >= corpus::kMinGrade && g <= corpus::kMaxGrade; };
  if (!in_range(source_grade) || !in_range(target_grade)) {
    throw ValidationError("format_grade_prefix: grade out of range");
  }
  return "SG_" + std::to_string(source_grade) + " TG_" + std::to_string(target_grade) + " " +
         std::string(source);
}

namespace {

// Reads `<tag><number> ` from the front of input; advances past it.
std::optional<double> take_tagged_number(std::string_view& input, std::string_view tag) {
  if (input.substr(0, tag.size()) != tag) return std::nullopt;
  input.remove_prefix(tag.size());
  size_t space = input.find(' ');
  if (space == std::string_view::npos) return std::nullopt;
  std::string number(input.substr(0, space));
  char* end = nullptr;
  double value = std::strtod(number.c_str(), &end);
  if (end != number.c_str() + number.size() || number.empty()) return std::nullopt;
  input.remove_prefix(space + 1);
  return value;
}

}  // namespace

std::optional<ParsedControlPrefix> parse_control_prefix(std::string_view input) {
  std::string_view rest = input;
  auto w = take_tagged_number(rest, "W_");
  if (!w) return std::nullopt;
  auto c = take_tagged_number(rest, "C_");
  if (!c) return std::nullopt;
  auto l = take_tagged_number(rest, "L_");
  if (!l) return std::nullopt;
  auto wr = take_tagged_number(rest, "WR_");
  if (!wr) return std::nullopt;
  auto dtd = take_tagged_number(rest, "DTD_");
  if (!dtd) return std::nullopt;
  ParsedControlPrefix out;
  out.controls = {*w, *c, *l, *wr, *dtd, std::nullopt, std::nullopt};
  out.source = std::string(rest);
  return out;
}

std::optional<ParsedGradePrefix> parse_grade_prefix(std::string_view input) {
  std::string_view rest = input;
  auto sg = take_tagged_number(rest, "SG_");
  if (!sg) return std::nullopt;
  auto tg = take_tagged_number(rest, "TG_");
  if (!tg) return std::nullopt;
  if (*sg != std::floor(*sg) || *tg != std::floor(*tg)) return std::nullopt;
  ParsedGradePrefix out;
  out.source_grade = static_cast<int>(*sg);
  out.target_grade = static_cast<int>(*tg);
  out.source = std::string(rest);
  return out;
}

const ControlVector& AvgGradeTable::lookup(int source_grade, int target_grade) const {
  auto it = cells_.find({source_grade, target_grade});
  return it == cells_.end() ? global_mean_ : it->second.mean;
}

const AvgGradeTable::Cell* AvgGradeTable::cell(int source_grade, int target_grade) const {
  auto it = cells_.find({source_grade, target_grade});
  return it == cells_.end() ? nullptr : &it->second;
}

namespace {

struct MeanAccumulator {
  std::array<double, 5> primary{};
  double rl = 0.0, cc = 0.0;
  int count = 0, rl_count = 0, cc_count = 0;

  void add(const ControlVector& v) {
    auto p = v.primary();
    for (size_t i = 0; i < 5; ++i) primary[i] += p[i];
    if (v.rl) {
      rl += *v.rl;
      ++rl_count;
    }
    if (v.cc) {
      cc += *v.cc;
      ++cc_count;
    }
    ++count;
  }

  ControlVector mean() const {
    std::array<double, 5> p = primary;
    for (auto& x : p) x /= count;
    ControlVector v = ControlVector::from_primary(p);
    if (rl_count) v.rl = rl / rl_count;
    if (cc_count) v.cc = cc / cc_count;
    return v;
  }
};

}  // namespace

AvgGradeTable build_avg_grade_table(const std::vector<GradedControls>& rows) {
  if (rows.empty()) throw ValidationError("build_avg_grade_table: no input vectors");
  std::map<std::pair<int, int>, MeanAccumulator> acc;
  MeanAccumulator global;
  for (const auto& row : rows) {
    acc[{row.source_grade, row.target_grade}].add(row.controls);
    global.add(row.controls);
  }
  AvgGradeTable table;
  for (const auto& [key, a] : acc) {
    table.cells_[key] = {a.mean(), a.count};
  }
  table.global_mean_ = global.mean();
  table.total_ = global.count;
  return table;
}

void write_controls_jsonl(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, ControlVector>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write controls file: " + path.string());
  for (const auto& [id, v] : rows) {
    ordered_json j;
    j["id"] = id;
    j["w"] = v.w;
    j["c"] = v.c;
    j["l"] = v.l;
    j["wr"] = v.wr;
    j["dtd"] = v.dtd;
    if (v.rl) j["rl"] = *v.rl;
    if (v.cc) j["cc"] = *v.cc;
    out << j.dump() << '\n';
  }
}

std::vector<std::pair<std::string, ControlVector>> read_controls_jsonl(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open controls file: " + path.string());
  std::vector<std::pair<std::string, ControlVector>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("controls line " + std::to_string(lineno) + ": malformed JSON: " +
                            e.what());
    }
    ControlVector v;
    try {
      v.w = j.at("w").get<double>();
      v.c = j.at("c").get<double>();
      v.l = j.at("l").get<double>();
      v.wr = j.at("wr").get<double>();
      v.dtd = j.at("dtd").get<double>();
      if (j.contains("rl") && !j["rl"].is_null()) v.rl = j["rl"].get<double>();
      if (j.contains("cc") && !j["cc"].is_null()) v.cc = j["cc"].get<double>();
      rows.emplace_back(j.at("id").get<std::string>(), v);
    } catch (const json::exception& e) {
      throw ValidationError("controls line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace tsc::control
