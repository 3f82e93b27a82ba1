#pragma once

#include <cstdint>
#include <vector>

#include "tsc/corpus.hpp"
#include "tsc/predictor.hpp"

namespace tsc::fixtures {

struct FixtureOptions {
  int n_records = 500;
  uint64_t seed = 7;
};

/// Synthetic grade-paired corpus: sources drawn from a tiered vocabulary,
/// references produced by applying controllable edits whose strength
/// depends on the grade gap and on source features, plus parses for both
/// sides and frequency / age-of-acquisition lexicons.
struct FixtureCorpus {
  std::vector<corpus::DatasetRecord> records;
  corpus::ParseMap parses;
  corpus::Lexicon freq;
  corpus::Lexicon aoa;
};

FixtureCorpus make_fixture_corpus(const FixtureOptions& options = {});

corpus::Lexicon make_fixture_freq_lexicon();
corpus::Lexicon make_fixture_aoa_lexicon();

/// Regression dataset whose five targets share one latent factor driven
/// by the features, plus independent per-target noise.
struct LatentDataset {
  std::vector<predictor::SourceFeatures> features;
  std::vector<std::vector<double>> targets;  // five columns
};

LatentDataset make_latent_dataset(int n, uint64_t seed);

}  // namespace tsc::fixtures
