#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracles {

namespace {

using Gram = std::vector<std::string>;
using GramSet = std::set<Gram>;

GramSet grams_of(const std::vector<std::string>& tokens, int n) {
  GramSet out;
  for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
    out.insert(Gram(tokens.begin() + static_cast<long>(i),
                    tokens.begin() + static_cast<long>(i) + n));
  }
  return out;
}

GramSet minus(const GramSet& a, const GramSet& b) {
  GramSet out;
  for (const auto& g : a) {
    if (!b.count(g)) out.insert(g);
  }
  return out;
}

GramSet intersect(const GramSet& a, const GramSet& b) {
  GramSet out;
  for (const auto& g : a) {
    if (b.count(g)) out.insert(g);
  }
  return out;
}

// Shared scoring shape: the system set against one weighted reference set
// per reference; an n-gram's reference weight is the fraction of
// references whose set contains it.
struct WeightedSide {
  GramSet system;
  std::vector<GramSet> reference_sides;

  double weight(const Gram& g) const {
    int hits = 0;
    for (const auto& side : reference_sides) {
      if (side.count(g)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(reference_sides.size());
  }

  double reference_mass() const {
    GramSet all;
    for (const auto& side : reference_sides) {
      for (const auto& g : side) all.insert(g);
    }
    double mass = 0.0;
    for (const auto& g : all) mass += weight(g);
    return mass;
  }

  double good() const {
    double sum = 0.0;
    for (const auto& g : system) sum += weight(g);
    return sum;
  }
};

double f1(const WeightedSide& side) {
  double ref_mass = side.reference_mass();
  if (side.system.empty()) return ref_mass == 0.0 ? 1.0 : 0.0;
  if (ref_mass == 0.0) return 0.0;
  double good = side.good();
  double precision = good / static_cast<double>(side.system.size());
  double recall = good / ref_mass;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double precision_only(const WeightedSide& side) {
  double ref_mass = side.reference_mass();
  if (side.system.empty()) return ref_mass == 0.0 ? 1.0 : 0.0;
  return side.good() / static_cast<double>(side.system.size());
}

}  // namespace

tsc::metrics::SariScore sari(const std::vector<std::string>& source_tokens,
                             const std::vector<std::string>& output_tokens,
                             const std::vector<std::vector<std::string>>& reference_tokens,
                             int max_n) {
  double add_sum = 0.0, keep_sum = 0.0, del_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    GramSet src = grams_of(source_tokens, n);
    GramSet out = grams_of(output_tokens, n);
    std::vector<GramSet> refs;
    for (const auto& tokens : reference_tokens) refs.push_back(grams_of(tokens, n));

    WeightedSide add;
    add.system = minus(out, src);
    for (const auto& ref : refs) add.reference_sides.push_back(minus(ref, src));
    add_sum += f1(add);

    WeightedSide keep;
    keep.system = intersect(out, src);
    for (const auto& ref : refs) keep.reference_sides.push_back(intersect(ref, src));
    keep_sum += f1(keep);

    WeightedSide del;
    del.system = minus(src, out);
    for (const auto& ref : refs) del.reference_sides.push_back(minus(src, ref));
    del_sum += precision_only(del);
  }
  tsc::metrics::SariScore score;
  score.max_n = max_n;
  score.add_f1 = add_sum / max_n;
  score.keep_f1 = keep_sum / max_n;
  score.del_p = del_sum / max_n;
  score.sari = 100.0 * (score.add_f1 + score.keep_f1 + score.del_p) / 3.0;
  return score;
}

size_t levenshtein(std::string_view a, std::string_view b) {
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<size_t>> d(n + 1, std::vector<size_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      size_t best = std::min(d[i - 1][j], d[i][j - 1]) + 1;
      best = std::min(best, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1));
      d[i][j] = best;
    }
  }
  return d[n][m];
}

namespace {

struct CostSubs {
  int cost;
  int subs;
};

CostSubs explore(std::string_view a, std::string_view b, size_t i, size_t j) {
  if (i == a.size() && j == b.size()) return {0, 0};
  CostSubs best = {1 << 20, 1 << 20};
  auto consider = [&](CostSubs c) {
    if (c.cost < best.cost || (c.cost == best.cost && c.subs < best.subs)) best = c;
  };
  if (i < a.size()) {
    auto rest = explore(a, b, i + 1, j);
    consider({rest.cost + 1, rest.subs});
  }
  if (j < b.size()) {
    auto rest = explore(a, b, i, j + 1);
    consider({rest.cost + 1, rest.subs});
  }
  if (i < a.size() && j < b.size()) {
    auto rest = explore(a, b, i + 1, j + 1);
    int mismatch = a[i] == b[j] ? 0 : 1;
    consider({rest.cost + mismatch, rest.subs + mismatch});
  }
  return best;
}

}  // namespace

int min_substitutions(std::string_view a, std::string_view b) {
  return explore(a, b, 0, 0).subs;
}

int tree_depth(const tsc::corpus::ParsedSentence& parse) {
  const int n = static_cast<int>(parse.tokens.size());
  std::vector<std::vector<int>> children(static_cast<size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    children[static_cast<size_t>(parse.tokens[static_cast<size_t>(i)].head)].push_back(i + 1);
  }
  auto dfs = [&](auto&& self, int node, int depth) -> int {
    int deepest = depth;
    for (int child : children[static_cast<size_t>(node)]) {
      deepest = std::max(deepest, self(self, child, depth + 1));
    }
    return deepest;
  };
  return dfs(dfs, 0, 0);
}

double q3(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  double position = 0.75 * static_cast<double>(n - 1);
  size_t below = static_cast<size_t>(std::floor(position));
  size_t above = static_cast<size_t>(std::ceil(position));
  if (below == above) return values[below];
  double frac = position - static_cast<double>(below);
  return values[below] * (1.0 - frac) + values[above] * frac;
}

}  // namespace oracles
