#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tsc::corpus {

constexpr int kMinGrade = 1;
constexpr int kMaxGrade = 13;

/// One complex→simple pair (or an unpaired source) with grade annotations.
struct DatasetRecord {
  std::string id;
  std::string source;
  std::optional<std::string> reference;
  std::optional<int> source_grade;
  std::optional<int> target_grade;
  std::optional<std::string> system_output;

  bool operator==(const DatasetRecord&) const = default;
};

enum class Side { source, reference, output };

std::string_view side_name(Side side);
std::optional<Side> side_from_name(std::string_view name);

/// Dependency parse for one record side. head is a 1-based token index;
/// head 0 marks the root. Validated as a single tree on load.
struct ParsedSentence {
  struct Token {
    std::string form;
    int head = 0;
  };
  std::string record_id;
  Side side = Side::source;
  std::vector<Token> tokens;
};

/// Throws ValidationError unless heads are in range, exactly one token is
/// the root, and following heads from every token reaches the root.
void validate_tree(const ParsedSentence& sentence);

/// Word → positive value map with case-insensitive lookup and a fixed
/// out-of-vocabulary default.
struct Lexicon {
  enum class Kind { frequency_rank, age_of_acquisition };

  Kind kind = Kind::frequency_rank;
  std::unordered_map<std::string, double> entries;  // keys stored lowercased
  double default_value = 1.0;

  double lookup(std::string_view word) const;
};

/// Builds a lexicon, lowercasing keys (later duplicates win), validating
/// value ranges, and deriving default_value: max rank for frequency_rank,
/// mean value for age_of_acquisition.
Lexicon lexicon_from_entries(const std::vector<std::pair<std::string, double>>& entries,
                             Lexicon::Kind kind);

enum class DatasetFormat { jsonl, tsv };

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, DatasetFormat format);
std::vector<DatasetRecord> parse_dataset_jsonl(std::istream& in);
std::vector<DatasetRecord> parse_dataset_tsv(std::istream& in);

std::string record_to_jsonl(const DatasetRecord& record);
void save_dataset_jsonl(const std::filesystem::path& path, const std::vector<DatasetRecord>& records);

/// Parses keyed by (record id, side).
class ParseMap {
 public:
  void insert(ParsedSentence sentence);  // throws on duplicate key
  const ParsedSentence* find(std::string_view record_id, Side side) const;
  size_t size() const { return by_key_.size(); }
  auto begin() const { return by_key_.begin(); }
  auto end() const { return by_key_.end(); }

 private:
  std::map<std::pair<std::string, int>, ParsedSentence> by_key_;
};

ParseMap load_conllu(const std::filesystem::path& path);
ParseMap parse_conllu(std::istream& in);
void save_conllu(const std::filesystem::path& path, const ParseMap& parses);

Lexicon load_lexicon(const std::filesystem::path& path, Lexicon::Kind kind);
Lexicon parse_lexicon(std::istream& in, Lexicon::Kind kind);
void save_lexicon(const std::filesystem::path& path, const Lexicon& lexicon);

}  // namespace tsc::corpus
