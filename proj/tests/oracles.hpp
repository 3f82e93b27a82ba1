#pragma once

// Independent reference implementations used only by tests. Each is
// written as directly as possible (explicit set construction, exhaustive
// recursion) so it shares no code path with the library implementation it
// checks.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tsc/control.hpp"
#include "tsc/corpus.hpp"
#include "tsc/metrics.hpp"

namespace oracles {

/// Brute-force SARI: explicit n-gram sets per order, per component, per
/// reference, under the library's pinned conventions.
tsc::metrics::SariScore sari(const std::vector<std::string>& source_tokens,
                             const std::vector<std::string>& output_tokens,
                             const std::vector<std::vector<std::string>>& reference_tokens,
                             int max_n);

/// Full-matrix edit distance.
size_t levenshtein(std::string_view a, std::string_view b);

/// Exhaustive recursion over edit scripts; returns the substitution count
/// of the minimal-cost script with fewest substitutions.
int min_substitutions(std::string_view a, std::string_view b);

/// Longest root-to-leaf path via explicit child lists and DFS.
int tree_depth(const tsc::corpus::ParsedSentence& parse);

/// Sort-and-interpolate third quartile.
double q3(std::vector<double> values);

}  // namespace oracles
