#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsc/control.hpp"
#include "tsc/corpus.hpp"

namespace tsc::simplify {

enum class AdapterKind { replay, external, rule };

struct SimplifierRequest {
  std::string id;
  std::string prefixed_input;
  std::chrono::milliseconds timeout{10000};
};

struct SimplifierResponse {
  std::string id;
  std::string output;
  std::chrono::milliseconds latency{0};
  AdapterKind adapter = AdapterKind::rule;
};

struct SimplifyOutcome {
  SimplifierResponse response;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

class Simplifier {
 public:
  virtual ~Simplifier() = default;

  virtual SimplifyOutcome try_simplify(const SimplifierRequest& request) = 0;

  /// Default: sequential try_simplify calls. External adapters override
  /// this with pipelined in-flight requests matched by id.
  virtual std::vector<SimplifyOutcome> simplify_batch(const std::vector<SimplifierRequest>& requests);

  /// Like try_simplify but throws RunError on failure.
  SimplifierResponse simplify(const SimplifierRequest& request);
};

/// Serves stored outputs from a JSONL file of {"id":…, "output":…} lines.
class ReplaySimplifier : public Simplifier {
 public:
  static ReplaySimplifier load(const std::filesystem::path& path);
  explicit ReplaySimplifier(std::unordered_map<std::string, std::string> outputs);

  SimplifyOutcome try_simplify(const SimplifierRequest& request) override;

 private:
  std::unordered_map<std::string, std::string> outputs_;
};

/// Deterministic controllable stand-in generator:
///   1. w < 1 drops trailing words per sentence down to the word ratio;
///   2. wr < 1 replaces rare words (log-rank above the sentence Q3) with
///      the most frequent lexicon entry sharing their first character
///      until the word-rank ratio is met;
///   3. dtd > 1 splits each sentence at its median comma.
/// Identity controls (w >= 1, wr >= 1, dtd <= 1) return the source verbatim.
std::string rule_simplify(std::string_view source, const control::ControlVector& controls,
                          const corpus::Lexicon& freq);

/// Applies rule_simplify to the source recovered from the request's
/// control prefix. Grade-token prefixes carry no low-level vector and are
/// treated as identity controls.
class RuleSimplifier : public Simplifier {
 public:
  explicit RuleSimplifier(const corpus::Lexicon& freq);

  SimplifyOutcome try_simplify(const SimplifierRequest& request) override;

 private:
  const corpus::Lexicon* freq_;
};

struct ExternalOptions {
  int max_in_flight = 32;
};

/// Line-protocol subprocess adapter: writes {"id":…, "input":…} JSONL to
/// the child's stdin and reads {"id":…, "output":…} lines from its stdout,
/// matching responses by id in any order. Timeouts are enforced per
/// request.
class SubprocessSimplifier : public Simplifier {
 public:
  SubprocessSimplifier(std::string command, ExternalOptions options = {});
  ~SubprocessSimplifier() override;

  SubprocessSimplifier(const SubprocessSimplifier&) = delete;
  SubprocessSimplifier& operator=(const SubprocessSimplifier&) = delete;

  SimplifyOutcome try_simplify(const SimplifierRequest& request) override;
  std::vector<SimplifyOutcome> simplify_batch(const std::vector<SimplifierRequest>& requests) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// POSTs {"id":…, "input":…} to <base>/simplify and expects the same
/// object shape with "output" back.
class HttpSimplifier : public Simplifier {
 public:
  explicit HttpSimplifier(std::string url, ExternalOptions options = {});

  SimplifyOutcome try_simplify(const SimplifierRequest& request) override;
  std::vector<SimplifyOutcome> simplify_batch(const std::vector<SimplifierRequest>& requests) override;

 private:
  std::string host_;
  int port_ = 80;
  std::string path_prefix_;
  ExternalOptions options_;
};

/// Parses `replay:<file> | exec:<cmd> | http:<url> | rule` specs.
/// The rule adapter needs the frequency lexicon.
std::unique_ptr<Simplifier> make_simplifier(std::string_view spec, const corpus::Lexicon* freq,
                                            ExternalOptions options = {});

}  // namespace tsc::simplify
