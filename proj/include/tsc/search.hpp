#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "tsc/control.hpp"

namespace tsc::search {

enum class SearchStrategy { one_plus_one, random_search };

struct SearchConfig {
  int budget = 64;
  double sigma0 = 0.2;
  uint64_t seed = 0;
  SearchStrategy strategy = SearchStrategy::one_plus_one;
};

struct TraceEntry {
  int step = 0;  // 1-based evaluation index
  double score = 0.0;
  control::ControlVector candidate;
  bool accepted = false;
};

struct SearchResult {
  control::ControlVector best;
  double best_score = 0.0;
  std::vector<TraceEntry> trace;
};

using EvalFn = std::function<double(const control::ControlVector&)>;

/// (1+1)-ES over the quantized control grid. Starts from the all-ones
/// vector, perturbs every dimension with Gaussian noise of scale sigma,
/// accepts only strict improvements, and adapts sigma by x1.5 on accept
/// and x0.9 on reject. Uses exactly budget evaluations, start included.
SearchResult one_plus_one_search(const EvalFn& eval_fn, const SearchConfig& config);

/// Uniform samples on the control grid; returns the argmax.
SearchResult random_search(const EvalFn& eval_fn, const SearchConfig& config);

SearchResult run_search(const EvalFn& eval_fn, const SearchConfig& config);

/// CSV: step,score,w,c,l,wr,dtd,accepted
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace);

}  // namespace tsc::search
