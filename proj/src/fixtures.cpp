#include "tsc/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "tsc/control.hpp"
#include "tsc/simplify.hpp"
#include "tsc/textstats.hpp"
#include "tsc/util.hpp"

namespace tsc::fixtures {

namespace {

// Three frequency tiers. Ranks are assigned by list position so the
// replacement rule (most frequent word sharing a first character) has a
// common target for nearly every letter.
const std::vector<std::string> kCommonWords = {
    "the",  "a",    "and",  "to",   "of",   "in",   "it",    "is",   "was",  "he",
    "she",  "for",  "on",   "as",   "with", "his",  "her",   "they", "be",   "at",
    "one",  "have", "this", "from", "or",   "had",  "by",    "not",  "but",  "what",
    "some", "we",   "can",  "out",  "other", "were", "all",   "there", "when", "up",
    "use",  "your", "how",  "said", "an",   "each", "man",   "new",  "now",  "old",
    "see",  "two",  "way",  "who",  "boy",  "did",  "its",   "let",  "put",  "say",
    "too",  "very", "kid",  "dog",  "eat",  "run",  "job",   "quiet", "x",   "zoo",
    "yes",  "go"};

const std::vector<std::string> kMediumWords = {
    "people",  "water",   "animals", "school",  "family",  "garden",  "window",  "music",
    "story",   "mountain", "river",  "teacher", "friends", "morning", "village", "market",
    "dinner",  "winter",  "summer",  "letters", "picture", "island",  "forest",  "doctor",
    "bridge",  "street",  "playing", "reading", "helped",  "walked",  "found",   "called",
    "looked",  "wanted",  "started", "learned", "quickly", "together", "children", "because",
    "between", "another", "through", "country", "farmers", "evening", "kitchen", "library",
    "questions", "usually"};

const std::vector<std::string> kRareWords = {
    "magnificent",   "extraordinary", "archipelago",  "phenomenon",    "hypothesis",
    "bureaucracy",   "quintessential", "metamorphosis", "paleontologist", "constellation",
    "infrastructure", "parliamentary", "sustainability", "architectural", "photosynthesis",
    "encyclopedia",  "civilization",  "technological", "revolutionary", "administration",
    "jurisdiction",  "kaleidoscope",  "nevertheless",  "observatory",   "unprecedented",
    "veterinarian",  "watercolor",    "xylophone",     "youthfulness",  "zoological",
    "deteriorating", "gubernatorial", "incomprehensible", "luminescence", "reconnaissance"};

std::vector<std::pair<std::string, double>> freq_entries() {
  std::vector<std::pair<std::string, double>> entries;
  double rank = 1.0;
  for (const auto& w : kCommonWords) entries.emplace_back(w, rank++);
  rank = 300.0;
  for (const auto& w : kMediumWords) {
    entries.emplace_back(w, rank);
    rank += 55.0;
  }
  rank = 9000.0;
  for (const auto& w : kRareWords) {
    entries.emplace_back(w, rank);
    rank += 800.0;
  }
  return entries;
}

}  // namespace

corpus::Lexicon make_fixture_freq_lexicon() {
  return corpus::lexicon_from_entries(freq_entries(), corpus::Lexicon::Kind::frequency_rank);
}

corpus::Lexicon make_fixture_aoa_lexicon() {
  std::vector<std::pair<std::string, double>> entries;
  for (const auto& [word, rank] : freq_entries()) {
    double aoa = std::min(16.0, 2.0 + 2.2 * std::log10(rank) + 0.05 * static_cast<double>(word.size()));
    entries.emplace_back(word, aoa);
  }
  return corpus::lexicon_from_entries(entries, corpus::Lexicon::Kind::age_of_acquisition);
}

namespace {

// A parse over the text's word tokens with an exact maximum depth: the
// first `depth` tokens form a head chain, everything else hangs off the
// chain's second node.
corpus::ParsedSentence make_parse(const std::string& record_id, corpus::Side side,
                                  const std::vector<std::string>& words, int depth) {
  corpus::ParsedSentence parse;
  parse.record_id = record_id;
  parse.side = side;
  const int n = static_cast<int>(words.size());
  depth = std::clamp(depth, n > 1 ? 2 : 1, std::max(n, 1));
  for (int i = 0; i < n; ++i) {
    int head;
    if (i == 0) {
      head = 0;  // root
    } else if (i < depth) {
      head = i;  // extend the chain
    } else {
      head = n > 1 ? 1 : 0;
    }
    parse.tokens.push_back({words[static_cast<size_t>(i)], head});
  }
  return parse;
}

double clamp01(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

FixtureCorpus make_fixture_corpus(const FixtureOptions& options) {
  if (options.n_records < 1) throw ValidationError("fixture corpus: n_records must be positive");
  FixtureCorpus corpus_out;
  corpus_out.freq = make_fixture_freq_lexicon();
  corpus_out.aoa = make_fixture_aoa_lexicon();
  Rng rng(options.seed);

  for (int r = 0; r < options.n_records; ++r) {
    std::string id = "r" + std::to_string(r + 1);

    // Source sentence: 10..20 words from the tiers, sometimes a comma.
    int n_words = 10 + static_cast<int>(rng.bounded(11));
    double rare_frac = 0.04 * static_cast<double>(rng.bounded(8));  // 0 .. 0.28
    std::vector<std::string> words;
    for (int i = 0; i < n_words; ++i) {
      double u = rng.uniform01();
      if (u < rare_frac) {
        words.push_back(kRareWords[rng.bounded(static_cast<uint32_t>(kRareWords.size()))]);
      } else if (u < rare_frac + 0.45) {
        words.push_back(kMediumWords[rng.bounded(static_cast<uint32_t>(kMediumWords.size()))]);
      } else {
        words.push_back(kCommonWords[rng.bounded(static_cast<uint32_t>(kCommonWords.size()))]);
      }
    }
    bool has_comma = rng.uniform01() < 0.6;
    int comma_after = has_comma ? n_words / 2 - 1 + static_cast<int>(rng.bounded(3)) : -1;

    std::string source;
    for (int i = 0; i < n_words; ++i) {
      if (i) source += ' ';
      source += words[static_cast<size_t>(i)];
      if (i == comma_after) source += ',';
    }
    source += '.';

    int sg = textstats::ari_grade(source);
    int max_gap = std::min(5, sg - 1);
    int gap = max_gap > 0 ? static_cast<int>(rng.bounded(static_cast<uint32_t>(max_gap + 1))) : 0;
    int tg = sg - gap;

    // Requested edits: strength grows with the grade gap and depends on
    // source features, with a little noise on top.
    control::ControlVector requested;
    requested.w = clamp01(
        1.0 - 0.07 * gap - 0.012 * (n_words - 14) + 0.03 * rng.normal(), 0.45, 1.0);
    requested.wr = clamp01(1.0 - 0.05 * gap - 0.3 * rare_frac + 0.03 * rng.normal(), 0.55, 1.0);
    requested.dtd = (gap >= 2 && has_comma) ? 1.5 : 1.0;
    requested.c = requested.w;
    requested.l = clamp01(1.0 - 0.08 * gap, 0.5, 1.0);
    if (gap == 0) requested = control::ControlVector::all_ones();
    auto applied = control::quantize(requested);

    std::string reference = simplify::rule_simplify(source, applied, corpus_out.freq);

    corpus::DatasetRecord record;
    record.id = id;
    record.source = source;
    record.reference = reference;
    record.source_grade = sg;
    record.target_grade = tg;
    corpus_out.records.push_back(record);

    // Parses with depths consistent with the requested structural change.
    int source_depth = 2 + n_words / 6 + (has_comma ? 1 : 0);
    corpus_out.parses.insert(make_parse(id, corpus::Side::source, words, source_depth));
    auto ref_words = textstats::word_forms(reference);
    int ref_depth = static_cast<int>(
        std::lround(static_cast<double>(source_depth) / applied.dtd));
    corpus_out.parses.insert(make_parse(id, corpus::Side::reference, ref_words, ref_depth));
  }
  return corpus_out;
}

LatentDataset make_latent_dataset(int n, uint64_t seed) {
  if (n < 2) throw ValidationError("latent dataset: n must be at least 2");
  LatentDataset data;
  Rng rng(seed);
  const std::array<double, 5> scale = {0.50, 0.45, 0.40, 0.35, 0.30};
  const std::array<double, 5> offset = {0.80, 0.85, 0.90, 0.95, 1.00};
  const std::array<double, 5> noise = {0.10, 0.10, 0.12, 0.12, 0.14};
  for (int i = 0; i < n; ++i) {
    predictor::SourceFeatures f;
    f.n_words = 5 + static_cast<double>(rng.bounded(26));
    f.n_chars = std::floor(f.n_words * (3.5 + 3.0 * rng.uniform01()));
    f.max_dep_depth = 2 + static_cast<double>(rng.bounded(7));
    f.word_rank = 2.0 + 8.0 * rng.uniform01();
    f.mean_aoa = 4.0 + 8.0 * rng.uniform01();
    f.source_grade = 2 + static_cast<double>(rng.bounded(11));
    f.target_grade = 1 + static_cast<double>(rng.bounded(
                             static_cast<uint32_t>(std::max(1.0, f.source_grade - 1))));
    double latent = 0.045 * (f.n_words - 17.0) + 0.11 * (f.word_rank - 6.0) +
                    0.09 * (f.source_grade - f.target_grade) +
                    (f.max_dep_depth > 5 ? 0.2 : 0.0) + 0.18 * rng.normal();
    std::vector<double> y(5);
    for (size_t d = 0; d < 5; ++d) {
      y[d] = scale[d] * latent + offset[d] + noise[d] * rng.normal();
    }
    data.features.push_back(f);
    data.targets.push_back(std::move(y));
  }
  return data;
}

}  // namespace tsc::fixtures
