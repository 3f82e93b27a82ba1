#include "tsc/simplify.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <future>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tsc/textstats.hpp"
#include "tsc/util.hpp"

namespace tsc::simplify {

using nlohmann::json;

std::vector<SimplifyOutcome> Simplifier::simplify_batch(
    const std::vector<SimplifierRequest>& requests) {
  std::vector<SimplifyOutcome> out;
  out.reserve(requests.size());
  for (const auto& request : requests) out.push_back(try_simplify(request));
  return out;
}

SimplifierResponse Simplifier::simplify(const SimplifierRequest& request) {
  auto outcome = try_simplify(request);
  if (!outcome.ok()) throw RunError("simplify '" + request.id + "': " + *outcome.error);
  return std::move(outcome.response);
}

ReplaySimplifier::ReplaySimplifier(std::unordered_map<std::string, std::string> outputs)
    : outputs_(std::move(outputs)) {}

ReplaySimplifier ReplaySimplifier::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open outputs file: " + path.string());
  std::unordered_map<std::string, std::string> outputs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
      auto id = j.at("id").get<std::string>();
      auto output = j.at("output").get<std::string>();
      if (!outputs.emplace(std::move(id), std::move(output)).second) {
        throw ValidationError("outputs line " + std::to_string(lineno) + ": duplicate id");
      }
    } catch (const json::exception& e) {
      throw ValidationError("outputs line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return ReplaySimplifier(std::move(outputs));
}

SimplifyOutcome ReplaySimplifier::try_simplify(const SimplifierRequest& request) {
  SimplifyOutcome outcome;
  outcome.response.id = request.id;
  outcome.response.adapter = AdapterKind::replay;
  auto it = outputs_.find(request.id);
  if (it == outputs_.end()) {
    outcome.error = "no stored output for id";
    return outcome;
  }
  outcome.response.output = it->second;
  return outcome;
}

namespace {

struct RuleSentence {
  std::vector<std::string> words;
  std::vector<bool> comma_after;  // comma between word i and word i+1
  std::optional<char> terminator;
};

std::vector<RuleSentence> sentence_structure(std::string_view text,
                                             const textstats::Tokenization& tk) {
  std::vector<RuleSentence> sentences(tk.sentences.size());
  for (size_t s = 0; s < tk.sentences.size(); ++s) {
    sentences[s].terminator = tk.sentences[s].terminator;
  }
  for (size_t i = 0; i < tk.words.size(); ++i) {
    const auto& tok = tk.words[i];
    auto& sentence = sentences[tok.sentence];
    sentence.words.push_back(tok.form);
    bool comma = false;
    if (i + 1 < tk.words.size() && tk.words[i + 1].sentence == tok.sentence) {
      for (size_t p = tok.end; p < tk.words[i + 1].begin; ++p) {
        if (text[p] == ',') comma = true;
      }
    }
    sentence.comma_after.push_back(comma);
  }
  return sentences;
}

// Most frequent lexicon entry sharing the token's first character, if it
// is strictly more frequent than the token itself.
class ReplacementIndex {
 public:
  explicit ReplacementIndex(const corpus::Lexicon& freq) : freq_(&freq) {
    for (const auto& [word, rank] : freq.entries) {
      if (word.empty()) continue;
      char first = word[0];
      auto it = best_.find(first);
      // Ties break toward the lexicographically smaller word so the
      // choice does not depend on hash iteration order.
      if (it == best_.end() || rank < it->second.second ||
          (rank == it->second.second && word < it->second.first)) {
        best_[first] = {word, rank};
      }
    }
  }

  std::optional<std::string> replacement_for(const std::string& token) const {
    std::string lowered = lower_ascii(token);
    if (lowered.empty()) return std::nullopt;
    auto it = best_.find(lowered[0]);
    if (it == best_.end()) return std::nullopt;
    if (it->second.first == lowered) return std::nullopt;
    if (it->second.second >= freq_->lookup(lowered)) return std::nullopt;
    return it->second.first;
  }

 private:
  const corpus::Lexicon* freq_;
  std::unordered_map<char, std::pair<std::string, double>> best_;
};

double current_word_rank(const std::vector<RuleSentence>& sentences, const corpus::Lexicon& freq) {
  std::vector<std::string> all;
  for (const auto& s : sentences) all.insert(all.end(), s.words.begin(), s.words.end());
  return textstats::word_rank(all, freq);
}

std::string detokenize(const std::vector<RuleSentence>& sentences) {
  std::string out;
  for (const auto& sentence : sentences) {
    if (sentence.words.empty()) continue;
    if (!out.empty()) out += ' ';
    for (size_t i = 0; i < sentence.words.size(); ++i) {
      if (i) out += ' ';
      out += sentence.words[i];
    }
    if (sentence.terminator) out += *sentence.terminator;
  }
  return out;
}

}  // namespace

std::string rule_simplify(std::string_view source, const control::ControlVector& controls,
                          const corpus::Lexicon& freq) {
  bool shrink = controls.w < 1.0;
  bool lexify = controls.wr < 1.0;
  bool split = controls.dtd > 1.0;
  if (!shrink && !lexify && !split) return std::string(source);

  auto tk = textstats::tokenize(source);
  if (tk.words.empty()) return std::string(source);
  auto sentences = sentence_structure(source, tk);

  // 1. Length: keep the first max(1, floor(w * n)) words of each sentence.
  if (shrink) {
    for (auto& sentence : sentences) {
      size_t n = sentence.words.size();
      if (n == 0) continue;
      auto keep = static_cast<size_t>(std::floor(controls.w * static_cast<double>(n)));
      keep = std::max<size_t>(keep, 1);
      if (keep < n) {
        sentence.words.resize(keep);
        sentence.comma_after.resize(keep);
      }
    }
  }

  // 2. Lexical complexity: replace the rarest words above each sentence's
  //    Q3 log-rank until the corpus-level ratio target is met.
  if (lexify) {
    double source_rank = current_word_rank(sentences, freq);
    if (source_rank > 0.0) {
      double target_rank = controls.wr * source_rank;
      ReplacementIndex index(freq);
      for (auto& sentence : sentences) {
        if (current_word_rank(sentences, freq) <= target_rank) break;
        std::vector<bool> blocked(sentence.words.size(), false);
        while (current_word_rank(sentences, freq) > target_rank) {
          double q3 = textstats::word_rank(sentence.words, freq);
          size_t pick = sentence.words.size();
          double pick_rank = -1.0;
          for (size_t i = 0; i < sentence.words.size(); ++i) {
            if (blocked[i] || !textstats::is_alphabetic_token(sentence.words[i])) continue;
            double log_rank = std::log(freq.lookup(sentence.words[i]));
            if (log_rank > q3 && log_rank > pick_rank) {
              pick = i;
              pick_rank = log_rank;
            }
          }
          if (pick == sentence.words.size()) break;
          auto replacement = index.replacement_for(sentence.words[pick]);
          if (replacement) {
            sentence.words[pick] = *replacement;
          }
          blocked[pick] = true;
        }
      }
    }
  }

  // 3. Structure: split each sentence at its median comma.
  if (split) {
    std::vector<RuleSentence> result;
    for (auto& sentence : sentences) {
      std::vector<size_t> commas;
      for (size_t i = 0; i < sentence.comma_after.size(); ++i) {
        if (sentence.comma_after[i] && i + 1 < sentence.words.size()) commas.push_back(i);
      }
      if (commas.empty()) {
        result.push_back(std::move(sentence));
        continue;
      }
      size_t cut = commas[(commas.size() - 1) / 2];
      RuleSentence first;
      first.words.assign(sentence.words.begin(), sentence.words.begin() + static_cast<long>(cut) + 1);
      first.comma_after.assign(first.words.size(), false);
      first.terminator = '.';
      RuleSentence second;
      second.words.assign(sentence.words.begin() + static_cast<long>(cut) + 1, sentence.words.end());
      second.comma_after.assign(second.words.size(), false);
      second.terminator = sentence.terminator;
      result.push_back(std::move(first));
      result.push_back(std::move(second));
    }
    sentences = std::move(result);
  }

  return detokenize(sentences);
}

RuleSimplifier::RuleSimplifier(const corpus::Lexicon& freq) : freq_(&freq) {}

SimplifyOutcome RuleSimplifier::try_simplify(const SimplifierRequest& request) {
  SimplifyOutcome outcome;
  outcome.response.id = request.id;
  outcome.response.adapter = AdapterKind::rule;
  auto start = std::chrono::steady_clock::now();
  if (auto parsed = control::parse_control_prefix(request.prefixed_input)) {
    outcome.response.output = rule_simplify(parsed->source, parsed->controls, *freq_);
  } else if (auto grades = control::parse_grade_prefix(request.prefixed_input)) {
    outcome.response.output = grades->source;  // no low-level vector: identity
  } else {
    outcome.response.output = request.prefixed_input;
  }
  outcome.response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return outcome;
}

// ---------------------------------------------------------------------------
// Subprocess adapter

struct SubprocessSimplifier::Impl {
  std::string command;
  ExternalOptions options;

  pid_t pid = -1;
  int child_stdin = -1;
  int child_stdout = -1;
  std::thread reader;

  std::mutex mu;
  std::unordered_map<std::string, std::shared_ptr<std::promise<std::string>>> pending;
  bool eof = false;
  bool reaped = false;
  std::string stream_error;

  std::mutex write_mu;

  void start() {
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
      throw RunError("subprocess: cannot create pipes");
    }
    pid = fork();
    if (pid < 0) throw RunError("subprocess: fork failed");
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    child_stdin = in_pipe[1];
    child_stdout = out_pipe[0];
    reader = std::thread([this] { reader_loop(); });
  }

  void reader_loop() {
    std::string buffer;
    char chunk[4096];
    while (true) {
      ssize_t got = read(child_stdout, chunk, sizeof(chunk));
      if (got <= 0) break;
      buffer.append(chunk, static_cast<size_t>(got));
      size_t pos;
      while ((pos = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        handle_line(line);
      }
    }
    std::string reason = "simplifier process closed its output stream";
    {
      std::lock_guard lock(mu);
      // The child may already have exited; surface a nonzero status.
      int status = 0;
      if (pid > 0 && waitpid(pid, &status, WNOHANG) == pid) {
        reaped = true;
        if (WIFEXITED(status) && WEXITSTATUS(status) != 0) {
          reason = "simplifier process exited with status " +
                   std::to_string(WEXITSTATUS(status));
        } else if (WIFSIGNALED(status)) {
          reason = "simplifier process killed by signal " + std::to_string(WTERMSIG(status));
        }
      }
      eof = true;
      if (!stream_error.empty()) reason += "; " + stream_error;
      for (auto& [id, promise] : pending) {
        promise->set_exception(std::make_exception_ptr(RunError(reason)));
      }
      pending.clear();
    }
  }

  void handle_line(const std::string& line) {
    if (trim(line).empty()) return;
    std::string id, output, error;
    try {
      auto j = json::parse(line);
      id = j.at("id").get<std::string>();
      output = j.at("output").get<std::string>();
    } catch (const json::exception& e) {
      error = std::string("malformed response line: ") + e.what();
    }
    std::shared_ptr<std::promise<std::string>> promise;
    {
      std::lock_guard lock(mu);
      if (error.empty()) {
        auto it = pending.find(id);
        if (it == pending.end()) return;  // late or unknown id: drop
        promise = it->second;
        pending.erase(it);
      } else {
        stream_error = error;
        return;
      }
    }
    promise->set_value(std::move(output));
  }

  std::future<std::string> submit(const SimplifierRequest& request) {
    auto promise = std::make_shared<std::promise<std::string>>();
    auto future = promise->get_future();
    {
      std::lock_guard lock(mu);
      if (eof) {
        promise->set_exception(
            std::make_exception_ptr(RunError("simplifier process is not running")));
        return future;
      }
      if (!pending.emplace(request.id, promise).second) {
        promise->set_exception(
            std::make_exception_ptr(RunError("duplicate in-flight request id")));
        return future;
      }
    }
    json j;
    j["id"] = request.id;
    j["input"] = request.prefixed_input;
    std::string line = j.dump() + "\n";
    bool write_failed = false;
    {
      std::lock_guard lock(write_mu);
      size_t offset = 0;
      while (offset < line.size()) {
        ssize_t wrote = write(child_stdin, line.data() + offset, line.size() - offset);
        if (wrote <= 0) {
          write_failed = true;
          break;
        }
        offset += static_cast<size_t>(wrote);
      }
    }
    if (write_failed) {
      std::lock_guard lock(mu);
      auto it = pending.find(request.id);
      if (it != pending.end()) {
        it->second->set_exception(
            std::make_exception_ptr(RunError("cannot write to simplifier process")));
        pending.erase(it);
      }
    }
    return future;
  }

  // Forget a request after its deadline passed; returns false when the
  // response actually arrived and the future is ready.
  bool cancel(const std::string& id) {
    std::lock_guard lock(mu);
    return pending.erase(id) > 0;
  }

  SimplifyOutcome await_reply(const SimplifierRequest& request, std::future<std::string> future,
                              std::chrono::steady_clock::time_point submitted) {
    SimplifyOutcome outcome;
    outcome.response.id = request.id;
    outcome.response.adapter = AdapterKind::external;
    auto deadline = submitted + request.timeout;
    auto status = future.wait_until(deadline);
    if (status != std::future_status::ready) {
      bool cancelled = cancel(request.id);
      if (cancelled || future.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
        outcome.error = "timeout after " + std::to_string(request.timeout.count()) + " ms";
        outcome.response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - submitted);
        return outcome;
      }
    }
    try {
      outcome.response.output = future.get();
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
    outcome.response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - submitted);
    return outcome;
  }

  void shutdown() {
    if (child_stdin >= 0) {
      close(child_stdin);
      child_stdin = -1;
    }
    if (reader.joinable()) reader.join();
    if (child_stdout >= 0) {
      close(child_stdout);
      child_stdout = -1;
    }
    if (pid > 0 && !reaped) {
      int status = 0;
      waitpid(pid, &status, 0);
    }
    pid = -1;
  }
};

SubprocessSimplifier::SubprocessSimplifier(std::string command, ExternalOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->command = std::move(command);
  impl_->options = options;
  impl_->start();
}

SubprocessSimplifier::~SubprocessSimplifier() {
  impl_->shutdown();
}

SimplifyOutcome SubprocessSimplifier::try_simplify(const SimplifierRequest& request) {
  auto submitted = std::chrono::steady_clock::now();
  auto future = impl_->submit(request);
  return impl_->await_reply(request, std::move(future), submitted);
}

std::vector<SimplifyOutcome> SubprocessSimplifier::simplify_batch(
    const std::vector<SimplifierRequest>& requests) {
  const size_t n = requests.size();
  std::vector<SimplifyOutcome> out(n);
  const size_t window = std::max(1, impl_->options.max_in_flight);

  struct InFlight {
    size_t index;
    std::future<std::string> future;
    std::chrono::steady_clock::time_point submitted;
  };
  std::deque<InFlight> inflight;
  size_t next = 0;
  while (next < n || !inflight.empty()) {
    while (next < n && inflight.size() < window) {
      auto submitted = std::chrono::steady_clock::now();
      inflight.push_back({next, impl_->submit(requests[next]), submitted});
      ++next;
    }
    auto item = std::move(inflight.front());
    inflight.pop_front();
    out[item.index] =
        impl_->await_reply(requests[item.index], std::move(item.future), item.submitted);
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP adapter

HttpSimplifier::HttpSimplifier(std::string url, ExternalOptions options) : options_(options) {
  std::string rest = url;
  if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
  auto slash = rest.find('/');
  if (slash != std::string::npos) {
    path_prefix_ = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  if (path_prefix_ == "/") path_prefix_.clear();
  auto colon = rest.find(':');
  if (colon == std::string::npos) {
    host_ = rest;
  } else {
    host_ = rest.substr(0, colon);
    port_ = std::atoi(rest.c_str() + colon + 1);
  }
  if (host_.empty() || port_ <= 0) throw ValidationError("http simplifier: bad url: " + url);
}

SimplifyOutcome HttpSimplifier::try_simplify(const SimplifierRequest& request) {
  SimplifyOutcome outcome;
  outcome.response.id = request.id;
  outcome.response.adapter = AdapterKind::external;
  auto start = std::chrono::steady_clock::now();

  httplib::Client client(host_, port_);
  auto seconds = static_cast<time_t>(request.timeout.count() / 1000);
  auto micros = static_cast<time_t>((request.timeout.count() % 1000) * 1000);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  json body;
  body["id"] = request.id;
  body["input"] = request.prefixed_input;
  auto result = client.Post((path_prefix_ + "/simplify").c_str(), body.dump(), "application/json");
  outcome.response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  if (!result) {
    outcome.error = "http request failed (timeout or connection error)";
    return outcome;
  }
  if (result->status != 200) {
    outcome.error = "http status " + std::to_string(result->status);
    return outcome;
  }
  try {
    auto j = json::parse(result->body);
    auto id = j.at("id").get<std::string>();
    if (id != request.id) {
      outcome.error = "response id mismatch: got '" + id + "'";
      return outcome;
    }
    outcome.response.output = j.at("output").get<std::string>();
  } catch (const json::exception& e) {
    outcome.error = std::string("malformed response body: ") + e.what();
  }
  return outcome;
}

std::vector<SimplifyOutcome> HttpSimplifier::simplify_batch(
    const std::vector<SimplifierRequest>& requests) {
  std::vector<SimplifyOutcome> out(requests.size());
  parallel_for(requests.size(), options_.max_in_flight,
               [&](size_t i) { out[i] = try_simplify(requests[i]); });
  return out;
}

std::unique_ptr<Simplifier> make_simplifier(std::string_view spec, const corpus::Lexicon* freq,
                                            ExternalOptions options) {
  if (spec == "rule") {
    if (!freq) throw ValidationError("rule simplifier requires a frequency lexicon");
    return std::make_unique<RuleSimplifier>(*freq);
  }
  if (spec.rfind("replay:", 0) == 0) {
    return std::make_unique<ReplaySimplifier>(
        ReplaySimplifier::load(std::filesystem::path(std::string(spec.substr(7)))));
  }
  if (spec.rfind("exec:", 0) == 0) {
    return std::make_unique<SubprocessSimplifier>(std::string(spec.substr(5)), options);
  }
  if (spec.rfind("http:", 0) == 0) {
    std::string url(spec.substr(5));
    if (url.rfind("//", 0) == 0) url = "http:" + url;
    return std::make_unique<HttpSimplifier>(url, options);
  }
  throw ValidationError("unknown simplifier spec: " + std::string(spec) +
                        " (expected replay:<file> | exec:<cmd> | http:<url> | rule)");
}

}  // namespace tsc::simplify
