#include "tsc/search.hpp"

#include <cmath>
#include <fstream>

#include "tsc/util.hpp"

namespace tsc::search {

namespace {

void validate(const SearchConfig& config) {
  if (config.budget < 1) throw ValidationError("search: budget must be at least 1");
  if (config.sigma0 <= 0.0) throw ValidationError("search: sigma0 must be positive");
}

double checked_eval(const EvalFn& eval_fn, const control::ControlVector& v) {
  double score = eval_fn(v);
  if (!std::isfinite(score)) throw RunError("search: objective returned a non-finite score");
  return score;
}

}  // namespace

SearchResult one_plus_one_search(const EvalFn& eval_fn, const SearchConfig& config) {
  validate(config);
  Rng rng(config.seed);
  SearchResult result;

  control::ControlVector current = control::ControlVector::all_ones();
  double current_score = checked_eval(eval_fn, current);
  result.trace.push_back({1, current_score, current, true});
  result.best = current;
  result.best_score = current_score;

  double sigma = config.sigma0;
  for (int step = 2; step <= config.budget; ++step) {
    auto p = current.primary();
    for (auto& x : p) x += sigma * rng.normal();
    auto candidate = control::quantize(control::ControlVector::from_primary(p));
    double score = checked_eval(eval_fn, candidate);
    bool accepted = score > current_score;
    result.trace.push_back({step, score, candidate, accepted});
    if (accepted) {
      current = candidate;
      current_score = score;
      sigma *= 1.5;
      if (score > result.best_score) {
        result.best = candidate;
        result.best_score = score;
      }
    } else {
      sigma *= 0.9;
    }
  }
  return result;
}

SearchResult random_search(const EvalFn& eval_fn, const SearchConfig& config) {
  validate(config);
  Rng rng(config.seed);
  SearchResult result;
  for (int step = 1; step <= config.budget; ++step) {
    std::array<double, 5> p;
    for (auto& x : p) {
      x = static_cast<double>(rng.bounded(control::kGridSize) + 1) / 20.0;
    }
    auto candidate = control::ControlVector::from_primary(p);
    double score = checked_eval(eval_fn, candidate);
    bool improved = step == 1 || score > result.best_score;
    result.trace.push_back({step, score, candidate, improved});
    if (improved) {
      result.best = candidate;
      result.best_score = score;
    }
  }
  return result;
}

SearchResult run_search(const EvalFn& eval_fn, const SearchConfig& config) {
  return config.strategy == SearchStrategy::one_plus_one ? one_plus_one_search(eval_fn, config)
                                                         : random_search(eval_fn, config);
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write trace file: " + path.string());
  out << csv_row({"step", "score", "w", "c", "l", "wr", "dtd", "accepted"});
  for (const auto& entry : trace) {
    const auto& v = entry.candidate;
    out << csv_row({std::to_string(entry.step), format_double(entry.score, 6),
                    format_double(v.w, 2), format_double(v.c, 2), format_double(v.l, 2),
                    format_double(v.wr, 2), format_double(v.dtd, 2),
                    entry.accepted ? "1" : "0"});
  }
}

}  // namespace tsc::search
