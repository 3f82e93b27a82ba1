// Emits the synthetic demo corpus: dataset JSONL, CoNLL-U parses, the two
// lexicons, and a reference-replay outputs file. Handy for trying the CLI
// without real data.
//
// Usage: make_fixtures <out_dir> [n_records] [seed]
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "tsc/fixtures.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_fixtures <out_dir> [n_records] [seed]\n";
    return 1;
  }
  std::filesystem::path out_dir = argv[1];
  tsc::fixtures::FixtureOptions options;
  if (argc > 2) options.n_records = std::stoi(argv[2]);
  if (argc > 3) options.seed = std::stoull(argv[3]);

  try {
    auto fixture = tsc::fixtures::make_fixture_corpus(options);
    std::filesystem::create_directories(out_dir);
    tsc::corpus::save_dataset_jsonl(out_dir / "dataset.jsonl", fixture.records);
    tsc::corpus::save_conllu(out_dir / "parses.conllu", fixture.parses);
    tsc::corpus::save_lexicon(out_dir / "freq.tsv", fixture.freq);
    tsc::corpus::save_lexicon(out_dir / "aoa.tsv", fixture.aoa);

    std::ofstream outputs(out_dir / "reference_outputs.jsonl", std::ios::binary);
    for (const auto& record : fixture.records) {
      nlohmann::ordered_json j;
      j["id"] = record.id;
      j["output"] = record.reference.value_or(record.source);
      outputs << j.dump() << '\n';
    }
    std::cout << "wrote " << fixture.records.size() << " records to " << out_dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 2;
  }
}
