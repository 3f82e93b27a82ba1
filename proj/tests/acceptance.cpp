// Acceptance suite: one self-contained check per shipped guarantee, one
// PASS/FAIL line each, nonzero exit when anything fails.
//
//   acceptance            runs everything
//   acceptance 3 7        runs checks 3 and 7 only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsc/control.hpp"
#include "tsc/corpus.hpp"
#include "tsc/fixtures.hpp"
#include "tsc/metrics.hpp"
#include "tsc/predictor.hpp"
#include "tsc/search.hpp"
#include "tsc/simplify.hpp"
#include "tsc/strategies.hpp"
#include "tsc/textstats.hpp"
#include "tsc/util.hpp"

using namespace tsc;

namespace {

struct Check {
  int number;
  std::string name;
  std::function<void(std::string&)> body;  // throws or appends detail
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

std::vector<std::string> lower_tokens(const std::string& text) {
  auto words = textstats::word_forms(text);
  for (auto& w : words) w = lower_ascii(w);
  return words;
}

// --------------------------------------------------------------------------
// 1. SARI oracle equivalence

void check_sari_oracle(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  Rng rng(20240901);
  const char* vocab[] = {"a", "b", "c", "d", "e"};
  auto random_text = [&](size_t min_len, size_t max_len) {
    size_t len = min_len + rng.bounded(static_cast<uint32_t>(max_len - min_len + 1));
    std::string text;
    for (size_t i = 0; i < len; ++i) {
      if (i) text += ' ';
      text += vocab[rng.bounded(5)];
    }
    return text;
  };

  const int n_random = 10000;
  for (int trial = 0; trial < n_random; ++trial) {
    std::string source = random_text(1, 6);
    std::string output = random_text(0, 6);
    std::vector<std::string> refs;
    size_t n_refs = 1 + rng.bounded(2);
    for (size_t r = 0; r < n_refs; ++r) refs.push_back(random_text(0, 6));
    int max_n = 1 + static_cast<int>(rng.bounded(2));

    auto actual = metrics::sari(source, output, refs, max_n);
    std::vector<std::vector<std::string>> ref_tokens;
    for (const auto& r : refs) ref_tokens.push_back(lower_tokens(r));
    auto expected = oracles::sari(lower_tokens(source), lower_tokens(output), ref_tokens, max_n);
    require(std::fabs(actual.sari - expected.sari) < 1e-9,
            "implementation diverges from the oracle at trial " + std::to_string(trial));
  }

  for (int trial = 0; trial < 500; ++trial) {
    std::string source = random_text(1, 6);
    std::string ref = random_text(1, 6);
    auto perfect = metrics::sari(source, ref, {ref}, 1 + static_cast<int>(rng.bounded(2)));
    require(perfect.sari == 100.0, "perfect match does not score exactly 100");
  }

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  require(elapsed.count() < 60000, "runtime exceeded 60 s");
  detail = std::to_string(n_random) + " random + 500 perfect-match instances, " +
           std::to_string(elapsed.count()) + " ms";
}

// --------------------------------------------------------------------------
// 2. ARI exactness and grade clamping

void check_ari(std::string& detail) {
  auto stats = textstats::basic_stats("The cat sat on the mat.");
  double value = textstats::ari(stats);
  require(std::fabs(value - (-5.085)) < 1e-9,
          "ari(\"The cat sat on the mat.\") = " + std::to_string(value));

  std::string easy = "a";
  for (int i = 0; i < 25; ++i) easy += " a";
  easy += ".";
  require(textstats::ari_grade(easy) == 1, "low clamp failed");

  std::string hard = "incomprehensibility";
  for (int i = 0; i < 30; ++i) hard += " incomprehensibility";
  hard += ".";
  require(textstats::ari_grade(hard) == 13, "high clamp failed");
  detail = "ari = -5.085 exactly; grades clamp to [1, 13]";
}

// --------------------------------------------------------------------------
// 3. Levenshtein against the DP oracle

void check_levenshtein(std::string& detail) {
  std::vector<std::string> all;
  std::function<void(std::string&)> expand = [&](std::string& prefix) {
    all.push_back(prefix);
    if (prefix.size() == 6) return;
    for (char c : {'a', 'b', 'c'}) {
      prefix.push_back(c);
      expand(prefix);
      prefix.pop_back();
    }
  };
  std::string empty;
  expand(empty);

  size_t pairs = 0;
  for (const auto& a : all) {
    for (const auto& b : all) {
      size_t longest = std::max(a.size(), b.size());
      double expected =
          longest == 0 ? 1.0
                       : 1.0 - static_cast<double>(oracles::levenshtein(a, b)) /
                                   static_cast<double>(longest);
      double actual = textstats::levenshtein_similarity(a, b);
      require(std::fabs(actual - expected) < 1e-12, "oracle mismatch on '" + a + "' vs '" + b + "'");
      ++pairs;
    }
  }

  Rng rng(55);
  auto random_string = [&] {
    std::string s;
    size_t len = rng.bounded(12);
    for (size_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng.bounded(6));
    return s;
  };
  for (int i = 0; i < 1000; ++i) {
    auto a = random_string();
    auto b = random_string();
    require(textstats::levenshtein_similarity(a, b) == textstats::levenshtein_similarity(b, a),
            "symmetry violated");
    require((textstats::levenshtein_similarity(a, b) == 1.0) == (a == b), "identity violated");
  }
  detail = std::to_string(pairs) + " exhaustive pairs + 1000 random symmetry/identity checks";
}

// --------------------------------------------------------------------------
// 4. Control identity and prefix round-trip

void check_control_identity(std::string& detail) {
  auto fixture = fixtures::make_fixture_corpus({100, 99});
  int checked = 0;
  for (const auto& record : fixture.records) {
    const auto* parse = fixture.parses.find(record.id, corpus::Side::source);
    require(parse != nullptr, "fixture record without a parse");
    auto v = control::compute_controls(record.source, record.source, parse, parse, fixture.freq);
    for (double x : v.primary()) {
      require(std::fabs(x - 1.0) < 1e-12, "identity pair did not yield all ones");
    }
    require(std::fabs(*v.rl - 1.0) < 1e-12 && std::fabs(*v.cc - 1.0) < 1e-12,
            "extended controls not 1 on identity pair");
    ++checked;
  }

  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    std::array<double, 5> p{};
    for (auto& x : p) x = static_cast<double>(rng.bounded(control::kGridSize) + 1) / 20.0;
    auto v = control::ControlVector::from_primary(p);
    auto text = control::format_control_prefix(v, "Some text with W_ in it.");
    auto parsed = control::parse_control_prefix(text);
    require(parsed.has_value(), "prefix failed to parse");
    require(parsed->controls.primary() == v.primary(), "prefix round-trip changed values");
    require(parsed->source == "Some text with W_ in it.", "prefix round-trip changed the source");
  }
  detail = std::to_string(checked) + " identity pairs; 1000 exact prefix round-trips";
}

// --------------------------------------------------------------------------
// 5. GBDT: monotone training loss, exact fit, determinism

void check_gbdt(std::string& detail) {
  Rng rng(606);
  for (int dataset = 0; dataset < 50; ++dataset) {
    int n = 10 + static_cast<int>(rng.bounded(80));
    std::vector<predictor::SourceFeatures> X;
    std::vector<std::vector<double>> Y;
    int dims = 1 + static_cast<int>(rng.bounded(3));
    for (int i = 0; i < n; ++i) {
      predictor::SourceFeatures f;
      f.n_words = rng.uniform01() * 30;
      f.n_chars = rng.uniform01() * 150;
      f.max_dep_depth = rng.uniform01() * 9;
      f.word_rank = rng.uniform01() * 10;
      f.mean_aoa = rng.uniform01() * 12;
      f.source_grade = 1 + rng.bounded(13);
      f.target_grade = 1 + rng.bounded(13);
      X.push_back(f);
      std::vector<double> y(static_cast<size_t>(dims));
      for (auto& v : y) v = rng.normal();
      Y.push_back(y);
    }
    predictor::GbdtConfig config;
    config.n_trees = 25;
    config.learning_rate = 0.1;
    config.max_depth = 1 + static_cast<int>(rng.bounded(6));
    config.min_samples_leaf = 1 + static_cast<int>(rng.bounded(5));
    config.validation_fraction = 0.0;
    config.mode = predictor::Mode::multi;
    predictor::TrainReport report;
    train_gbdt(X, Y, config, &report);
    const auto& mse = report.models.front().train_mse;
    for (size_t r = 1; r < mse.size(); ++r) {
      require(mse[r] <= mse[r - 1] + 1e-12 * std::max(1.0, mse[r - 1]),
              "training MSE increased on dataset " + std::to_string(dataset));
    }
  }

  // Exact fit on the separable two-point fixture.
  {
    std::vector<predictor::SourceFeatures> X(2);
    X[0].n_words = 0;
    X[1].n_words = 1;
    std::vector<std::vector<double>> Y = {{0.0}, {1.0}};
    predictor::GbdtConfig config;
    config.n_trees = 1;
    config.max_depth = 1;
    config.learning_rate = 1.0;
    config.min_samples_leaf = 1;
    config.validation_fraction = 0.0;
    auto model = predictor::train_gbdt(X, Y, config);
    require(std::fabs(model.predict_raw(X[0])[0]) < 1e-12 &&
                std::fabs(model.predict_raw(X[1])[0] - 1.0) < 1e-12,
            "two-point fixture not fit exactly");
  }

  // Determinism: three runs per seed, bit-identical serialized models.
  auto data = fixtures::make_latent_dataset(400, 31);
  for (uint64_t seed : {1ull, 99ull}) {
    predictor::GbdtConfig config;
    config.n_trees = 20;
    config.seed = seed;
    config.mode = predictor::Mode::multi;
    std::set<std::string> serialized;
    for (int run = 0; run < 3; ++run) {
      auto model = predictor::train_gbdt(data.features, data.targets, config);
      serialized.insert(model.models.front().to_json_string());
    }
    require(serialized.size() == 1, "models differ across repeated runs for one seed");
  }
  detail = "50 monotone datasets; exact 2-point fit; 3x bit-identical per seed";
}

// --------------------------------------------------------------------------
// 6. CP-Multi vs CP-Single on the shared-latent dataset

void check_cp_multi_vs_single(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  auto data = fixtures::make_latent_dataset(5000, 424242);
  const size_t n_train = 4000;
  std::vector<predictor::SourceFeatures> train_x(data.features.begin(),
                                                 data.features.begin() + n_train);
  std::vector<std::vector<double>> train_y(data.targets.begin(), data.targets.begin() + n_train);
  std::vector<predictor::SourceFeatures> test_x(data.features.begin() + n_train,
                                                data.features.end());
  std::vector<std::vector<double>> test_y(data.targets.begin() + n_train, data.targets.end());

  predictor::GbdtConfig config;
  config.n_trees = 200;
  config.learning_rate = 0.1;
  config.max_depth = 6;
  config.min_samples_leaf = 5;
  config.validation_fraction = 0.2;
  config.early_stopping_patience = 25;
  config.seed = 7;

  config.mode = predictor::Mode::multi;
  auto multi = predictor::train_gbdt(train_x, train_y, config);
  config.mode = predictor::Mode::single;
  auto single = predictor::train_gbdt(train_x, train_y, config);

  auto mean_r = [&](const predictor::TrainedPredictor& model) {
    auto eval = predictor::evaluate_predictor(model, test_x, test_y);
    double sum = 0.0;
    for (const auto& r : eval.pearson) {
      require(r.has_value(), "undefined correlation on the latent dataset");
      sum += *r;
    }
    return sum / static_cast<double>(eval.pearson.size());
  };
  double r_multi = mean_r(multi);
  double r_single = mean_r(single);
  require(r_multi >= r_single - 0.02,
          "CP-Multi mean r " + std::to_string(r_multi) + " fell more than 0.02 below CP-Single " +
              std::to_string(r_single));

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  require(elapsed.count() < 300000, "runtime exceeded 5 min");
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << "mean r multi " << r_multi << " vs single " << r_single << ", "
     << elapsed.count() << " ms";
  detail = os.str();
}

// --------------------------------------------------------------------------
// 7. (1+1) search on the toy landscape

void check_search(std::string& detail) {
  const std::array<double, 5> star = {0.8, 0.8, 0.9, 1.0, 1.2};
  // The objective is separable, so the grid optimum is the per-dimension
  // nearest grid point, which is star itself (all components on-grid).
  for (double x : star) {
    require(control::quantize_value(x) == x, "toy optimum is not on the grid");
  }
  auto objective = [&](const control::ControlVector& v) {
    auto p = v.primary();
    double sum = 0.0;
    for (size_t i = 0; i < 5; ++i) sum += (p[i] - star[i]) * (p[i] - star[i]);
    return -std::sqrt(sum);
  };

  int hits = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    search::SearchConfig config;
    config.budget = 64;
    config.sigma0 = 0.2;
    config.seed = seed;
    int evals = 0;
    auto counted = [&](const control::ControlVector& v) {
      ++evals;
      return objective(v);
    };
    auto result = search::one_plus_one_search(counted, config);
    require(evals <= 64 && result.trace.size() <= 64, "budget exceeded");
    double best_so_far = -1e18;
    for (const auto& entry : result.trace) {
      best_so_far = std::max(best_so_far, entry.score);
    }
    require(std::fabs(best_so_far - result.best_score) < 1e-12, "best-ever not monotone/consistent");
    bool close = true;
    auto p = result.best.primary();
    for (size_t i = 0; i < 5; ++i) {
      if (std::fabs(p[i] - star[i]) > 0.05 + 1e-9) close = false;
    }
    if (close) ++hits;
  }
  require(hits >= 8, "only " + std::to_string(hits) + "/10 seeds reached the optimum");
  detail = std::to_string(hits) + "/10 seeds within 0.05 per dimension";
}

// --------------------------------------------------------------------------
// Shared fixture pipeline runs for checks 8 and 9

struct StrategyRun {
  double sari = 0.0;
  double ari_accuracy = 0.0;
  std::vector<metrics::DistributionRow> distribution;
};

struct FixtureComparison {
  std::map<std::string, StrategyRun> runs;
};

FixtureComparison run_fixture_comparison() {
  auto fixture = fixtures::make_fixture_corpus({500, 7});
  strategies::StrategyContext ctx;
  ctx.parses = &fixture.parses;
  ctx.freq = &fixture.freq;
  ctx.aoa = &fixture.aoa;
  simplify::RuleSimplifier rule(fixture.freq);

  strategies::PipelineConfig pipe;
  pipe.jobs = 4;

  FixtureComparison out;
  auto run_one = [&](const strategies::Strategy& strategy) {
    auto result = strategies::run_pipeline(fixture.records, strategy, rule, ctx, pipe);
    StrategyRun run;
    run.sari = result.report.corpus_sari.sari;
    run.ari_accuracy = result.report.ari_accuracy_pct;
    run.distribution = result.report.control_distribution;
    out.runs[result.report.strategy] = run;
  };

  // Oracle.
  strategies::Strategy oracle;
  oracle.kind = strategies::StrategyKind::oracle;
  run_one(oracle);

  // Avg-Grade from the oracle vectors.
  std::vector<control::GradedControls> graded;
  control::ControlOptions copts;
  copts.require_parse = false;
  for (const auto& record : fixture.records) {
    const auto* src = fixture.parses.find(record.id, corpus::Side::source);
    const auto* ref = fixture.parses.find(record.id, corpus::Side::reference);
    auto v = control::compute_controls(record.source, *record.reference, src, ref, fixture.freq,
                                       copts);
    graded.push_back({*record.source_grade, *record.target_grade, v});
  }
  auto table = control::build_avg_grade_table(graded);
  strategies::Strategy avg;
  avg.kind = strategies::StrategyKind::avg_grade;
  avg.table = &table;
  run_one(avg);

  // CP-Multi trained on the fixture's oracle vectors.
  std::vector<predictor::SourceFeatures> X;
  std::vector<std::vector<double>> Y;
  for (size_t i = 0; i < fixture.records.size(); ++i) {
    const auto& record = fixture.records[i];
    const auto* parse = fixture.parses.find(record.id, corpus::Side::source);
    X.push_back(predictor::extract_features(record, parse, fixture.freq, fixture.aoa));
    const auto& v = graded[i].controls;
    Y.push_back({v.w, v.c, v.l, v.wr, v.dtd});
  }
  predictor::GbdtConfig gconfig;
  gconfig.n_trees = 300;
  gconfig.learning_rate = 0.1;
  gconfig.max_depth = 6;
  gconfig.min_samples_leaf = 5;
  gconfig.validation_fraction = 0.2;
  gconfig.seed = 7;
  gconfig.mode = predictor::Mode::multi;
  auto cp = predictor::train_gbdt(X, Y, gconfig);
  strategies::Strategy cp_multi;
  cp_multi.kind = strategies::StrategyKind::cp_multi;
  cp_multi.predictor = &cp;
  run_one(cp_multi);

  // Corpus-level vector from the (1+1) search, budget 64.
  search::SearchConfig sconfig;
  sconfig.budget = 64;
  sconfig.sigma0 = 0.2;
  sconfig.seed = 7;
  auto eval_fn = [&](const control::ControlVector& v) {
    strategies::Strategy corpus_level;
    corpus_level.kind = strategies::StrategyKind::corpus_level;
    corpus_level.corpus_vector = v;
    auto result = strategies::run_pipeline(fixture.records, corpus_level, rule, ctx, pipe);
    return result.report.corpus_sari.sari;
  };
  auto best = search::one_plus_one_search(eval_fn, sconfig);
  strategies::Strategy corpus_level;
  corpus_level.kind = strategies::StrategyKind::corpus_level;
  corpus_level.corpus_vector = best.best;
  run_one(corpus_level);

  return out;
}

const FixtureComparison& fixture_comparison() {
  static FixtureComparison comparison = run_fixture_comparison();
  return comparison;
}

// --------------------------------------------------------------------------
// 8. End-to-end strategy ordering and distribution contrast

void check_strategy_ordering(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  const auto& cmp = fixture_comparison();
  double oracle = cmp.runs.at("oracle").sari;
  double cp_multi = cmp.runs.at("cp-multi").sari;
  double avg = cmp.runs.at("avg-grade").sari;
  double corpus_level = cmp.runs.at("corpus-level").sari;

  require(oracle > cp_multi, "oracle did not beat cp-multi");
  require(oracle > avg, "oracle did not beat avg-grade");
  require(cp_multi > corpus_level, "cp-multi did not beat corpus-level");
  require(avg > corpus_level, "avg-grade did not beat corpus-level");

  for (const auto& row : cmp.runs.at("corpus-level").distribution) {
    require(row.max - row.min == 0.0, "corpus-level control distribution is not constant");
  }
  double oracle_iqr = 0.0;
  for (const auto& row : cmp.runs.at("oracle").distribution) {
    oracle_iqr = std::max(oracle_iqr, row.q3 - row.q1);
  }
  require(oracle_iqr > 0.0, "oracle IQR is not positive");

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  require(elapsed.count() < 600000, "runtime exceeded 10 min");
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << "sari oracle " << oracle << " > {cp-multi " << cp_multi << ", avg-grade "
     << avg << "} > corpus-level " << corpus_level << "; oracle IQR " << oracle_iqr;
  detail = os.str();
}

// --------------------------------------------------------------------------
// 9. Over/under behavior

void check_over_under(std::string& detail) {
  auto fixture = fixtures::make_fixture_corpus({200, 17});
  std::vector<std::string> refs;
  for (const auto& record : fixture.records) refs.push_back(*record.reference);
  require(metrics::ari_accuracy(refs, refs) == 100.0, "replaying references is not 100% accurate");
  auto report = metrics::over_under_report(refs, refs);
  require(report.histogram.size() == 1 && report.histogram.count(0) == 1,
          "replayed references put mass off zero");
  require(report.exact_match_rate == 1.0, "bucket-zero mass is not the exact-match rate");

  const auto& cmp = fixture_comparison();
  double corpus_level = cmp.runs.at("corpus-level").ari_accuracy;
  double avg = cmp.runs.at("avg-grade").ari_accuracy;
  require(corpus_level < avg, "corpus-level ARI accuracy (" + std::to_string(corpus_level) +
                                  ") is not below avg-grade (" + std::to_string(avg) + ")");
  std::ostringstream os;
  os.precision(1);
  os << std::fixed << "replay exact; ari-accuracy corpus-level " << corpus_level << "% < avg-grade "
     << avg << "%";
  detail = os.str();
}

// --------------------------------------------------------------------------
// 10. External adapter under concurrency

void check_external_adapter(std::string& detail) {
  simplify::ExternalOptions options;
  options.max_in_flight = 64;
  simplify::SubprocessSimplifier adapter(
      std::string(ECHO_SERVER_BIN) + " --window 16 --max-delay-ms 2 --drop-prefix skip-",
      options);

  std::vector<simplify::SimplifierRequest> requests;
  for (int i = 0; i < 1000; ++i) {
    requests.push_back({"req-" + std::to_string(i), "payload number " + std::to_string(i),
                        std::chrono::milliseconds(15000)});
  }
  auto outcomes = adapter.simplify_batch(requests);
  require(outcomes.size() == requests.size(), "missing outcomes");
  for (size_t i = 0; i < outcomes.size(); ++i) {
    require(outcomes[i].ok(), "request failed: " + *outcomes[i].error);
    require(outcomes[i].response.id == requests[i].id, "id mismatch at " + std::to_string(i));
    require(outcomes[i].response.output == requests[i].prefixed_input,
            "payload mismatch at " + std::to_string(i));
  }

  // Timeout accuracy: unanswered ids must come back within +-20%.
  const auto timeout = std::chrono::milliseconds(400);
  std::vector<simplify::SimplifierRequest> dropped;
  for (int i = 0; i < 16; ++i) {
    dropped.push_back({"skip-" + std::to_string(i), "never answered", timeout});
  }
  auto t0 = std::chrono::steady_clock::now();
  auto drop_outcomes = adapter.simplify_batch(dropped);
  auto total = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  for (const auto& outcome : drop_outcomes) {
    require(!outcome.ok() && outcome.error->find("timeout") != std::string::npos,
            "dropped request did not time out");
    auto waited = outcome.response.latency.count();
    require(waited >= timeout.count() * 8 / 10, "timeout fired early: " + std::to_string(waited));
    require(waited <= timeout.count() * 12 / 10, "timeout fired late: " + std::to_string(waited));
  }
  detail = "1000 concurrent echoes, 0 mismatches; 16 timeouts within +-20% (batch " +
           std::to_string(total.count()) + " ms)";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Check> checks = {
      {1, "SARI oracle equivalence", check_sari_oracle},
      {2, "ARI exactness and clamping", check_ari},
      {3, "Levenshtein properties", check_levenshtein},
      {4, "Control identity and prefix round-trip", check_control_identity},
      {5, "GBDT training guarantees", check_gbdt},
      {6, "CP-Multi vs CP-Single correlation", check_cp_multi_vs_single},
      {7, "(1+1) search toy landscape", check_search},
      {8, "End-to-end strategy ordering", check_strategy_ordering},
      {9, "Over/under simplification", check_over_under},
      {10, "External adapter concurrency and timeouts", check_external_adapter},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (auto& check : checks) {
    if (!selected.empty() && !selected.count(check.number)) continue;
    std::string detail;
    try {
      check.body(detail);
      std::printf("[PASS] %2d. %s%s%s\n", check.number, check.name.c_str(),
                  detail.empty() ? "" : ": ", detail.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] %2d. %s: %s\n", check.number, check.name.c_str(), e.what());
    }
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
