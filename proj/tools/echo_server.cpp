// Line-protocol echo server for exercising the external simplifier
// adapter. Reads {"id":…, "input":…} JSONL from stdin and echoes
// {"id":…, "output":<input>} lines back on stdout, deliberately out of
// order: responses are buffered into a window, shuffled, and optionally
// delayed. Ids starting with the drop prefix are never answered, which
// lets callers measure timeout behavior.
//
// Flags: --window N, --max-delay-ms M, --drop-prefix S, --seed N
#include <chrono>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Options {
  size_t window = 8;
  int max_delay_ms = 2;
  std::string drop_prefix = "skip-";
  uint64_t seed = 1;
};

struct Shared {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> queue;  // response lines ready to shuffle+send
  bool done = false;
};

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "echo_server: missing value for " << arg << "\n";
        std::exit(1);
      }
      return argv[++i];
    };
    if (arg == "--window") {
      opt.window = static_cast<size_t>(std::stoul(next()));
    } else if (arg == "--max-delay-ms") {
      opt.max_delay_ms = std::stoi(next());
    } else if (arg == "--drop-prefix") {
      opt.drop_prefix = next();
    } else if (arg == "--seed") {
      opt.seed = std::stoull(next());
    } else {
      std::cerr << "echo_server: unknown flag " << arg << "\n";
      return 1;
    }
  }
  if (opt.window == 0) opt.window = 1;

  Shared shared;

  std::thread responder([&] {
    std::mt19937_64 rng(opt.seed);
    std::vector<std::string> batch;
    while (true) {
      {
        std::unique_lock lock(shared.mu);
        shared.cv.wait_for(lock, std::chrono::milliseconds(3), [&] {
          return shared.done || shared.queue.size() >= opt.window;
        });
        while (!shared.queue.empty() && batch.size() < opt.window) {
          batch.push_back(std::move(shared.queue.front()));
          shared.queue.pop_front();
        }
        if (batch.empty() && shared.done) return;
      }
      std::shuffle(batch.begin(), batch.end(), rng);
      for (auto& line : batch) {
        if (opt.max_delay_ms > 0) {
          std::this_thread::sleep_for(
              std::chrono::milliseconds(rng() % static_cast<uint64_t>(opt.max_delay_ms + 1)));
        }
        std::cout << line << "\n" << std::flush;
      }
      batch.clear();
    }
  });

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    std::string id, input;
    try {
      auto j = json::parse(line);
      id = j.at("id").get<std::string>();
      input = j.at("input").get<std::string>();
    } catch (const json::exception&) {
      continue;  // ignore garbage
    }
    if (id.rfind(opt.drop_prefix, 0) == 0) continue;  // deliberately unanswered
    json reply;
    reply["id"] = id;
    reply["output"] = input;
    {
      std::lock_guard lock(shared.mu);
      shared.queue.push_back(reply.dump());
    }
    shared.cv.notify_one();
  }
  {
    std::lock_guard lock(shared.mu);
    shared.done = true;
  }
  shared.cv.notify_one();
  responder.join();
  return 0;
}
