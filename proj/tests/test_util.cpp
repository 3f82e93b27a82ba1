#include "doctest.h"
#include "oracles.hpp"
#include "tsc/util.hpp"

using namespace tsc;

TEST_CASE("rng determinism and ranges") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next() == b.next());
  }
  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.bounded(13) < 13);
  }
}

TEST_CASE("rng normal has roughly standard moments") {
  Rng r(11);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = r.normal();
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.05);
  CHECK(std::fabs(var - 1.0) < 0.1);
}

TEST_CASE("quantile linear interpolation matches the oracle") {
  Rng r(3);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + r.bounded(20);
    std::vector<double> values(n);
    for (auto& v : values) v = r.uniform01() * 10.0;
    CHECK(quantile(values, 0.75) == doctest::Approx(oracles::q3(values)).epsilon(1e-12));
  }
  CHECK(quantile({1.0}, 0.75) == 1.0);
  CHECK(quantile({0.0, 3.912023005428146, 9.903487552536127}, 0.75) ==
        doctest::Approx(6.907755278982137).epsilon(1e-9));
}

TEST_CASE("pearson basics") {
  std::vector<double> x = {1, 2, 3, 4};
  std::vector<double> y = {2, 4, 6, 8};
  std::vector<double> z = {-1, -2, -3, -4};
  std::vector<double> flat = {5, 5, 5, 5};
  CHECK(*pearson(x, y) == doctest::Approx(1.0));
  CHECK(*pearson(x, z) == doctest::Approx(-1.0));
  CHECK_FALSE(pearson(x, flat).has_value());
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 8, [&](size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 4,
                               [&](size_t i) {
                                 if (i == 5) throw RunError("boom");
                               }),
                  RunError);
}

TEST_CASE("csv escaping follows the quoting rules") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_row({"a", "b,c"}) == "a,\"b,c\"\r\n");
}
