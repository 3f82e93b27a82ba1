#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsc {

// Bad input or configuration; the CLI maps this to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure while executing an otherwise valid request; exit code 2.
struct RunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic RNG. All derived draws (uniform, normal, bounded ints,
/// shuffles) are built directly on the mt19937_64 stream so that results
/// are identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform in [0, 1), 53 bits of precision.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; second value of each pair is cached.
  double normal();

  // Unbiased uniform integer in [0, n), n > 0.
  uint32_t bounded(uint32_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(static_cast<uint32_t>(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> cached_;
};

std::string lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Quantile with linear interpolation between order statistics
/// (position q * (n - 1)); values must already be sorted ascending.
double quantile_sorted(std::span<const double> sorted, double q);

/// Convenience overload: copies and sorts.
double quantile(std::vector<double> values, double q);

/// Pearson correlation; empty when either side has zero variance or n < 2.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

/// Runs fn(0..n-1) on up to `jobs` threads. Order of execution is
/// unspecified; callers must write to disjoint slots. The first exception
/// thrown by any fn is rethrown after all threads join.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

// RFC 4180 helpers: fields quoted only when needed, rows end with CRLF.
std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);

std::string format_double(double v, int decimals);

}  // namespace tsc
