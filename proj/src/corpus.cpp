#include "tsc/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "tsc/util.hpp"

namespace tsc::corpus {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view side_name(Side side) {
  switch (side) {
    case Side::source: return "source";
    case Side::reference: return "reference";
    case Side::output: return "output";
  }
  return "?";
}

std::optional<Side> side_from_name(std::string_view name) {
  if (name == "source") return Side::source;
  if (name == "reference") return Side::reference;
  if (name == "output") return Side::output;
  return std::nullopt;
}

void validate_tree(const ParsedSentence& sentence) {
  const auto n = static_cast<int>(sentence.tokens.size());
  auto where = [&] {
    return "parse " + sentence.record_id + "/" + std::string(side_name(sentence.side));
  };
  if (n == 0) throw ValidationError(where() + ": empty sentence");
  int roots = 0;
  for (const auto& tok : sentence.tokens) {
    if (tok.head < 0 || tok.head > n) {
      throw ValidationError(where() + ": head index out of range: " + std::to_string(tok.head));
    }
    if (tok.head == 0) ++roots;
  }
  if (roots == 0) throw ValidationError(where() + ": no root");
  if (roots > 1) throw ValidationError(where() + ": multiple roots");
  for (int i = 0; i < n; ++i) {
    int cur = i + 1;
    int steps = 0;
    while (cur != 0) {
      cur = sentence.tokens[static_cast<size_t>(cur - 1)].head;
      if (++steps > n) throw ValidationError(where() + ": cycle in head chain");
    }
  }
}

double Lexicon::lookup(std::string_view word) const {
  auto it = entries.find(lower_ascii(word));
  return it == entries.end() ? default_value : it->second;
}

namespace {

void validate_lexicon_value(const std::string& word, double value, Lexicon::Kind kind) {
  if (!std::isfinite(value)) throw ValidationError("lexicon: non-finite value for '" + word + "'");
  if (kind == Lexicon::Kind::frequency_rank) {
    if (value < 1.0) throw ValidationError("lexicon: rank below 1 for '" + word + "'");
  } else {
    if (value <= 0.0 || value > 25.0) {
      throw ValidationError("lexicon: age of acquisition outside (0, 25] for '" + word + "'");
    }
  }
}

void finalize_default(Lexicon& lex) {
  if (lex.entries.empty()) {
    lex.default_value = lex.kind == Lexicon::Kind::frequency_rank ? 1.0 : 10.0;
    return;
  }
  if (lex.kind == Lexicon::Kind::frequency_rank) {
    double max_rank = 0.0;
    for (const auto& [w, v] : lex.entries) max_rank = std::max(max_rank, v);
    lex.default_value = max_rank;
  } else {
    double sum = 0.0;
    for (const auto& [w, v] : lex.entries) sum += v;
    lex.default_value = sum / static_cast<double>(lex.entries.size());
  }
}

}  // namespace

Lexicon lexicon_from_entries(const std::vector<std::pair<std::string, double>>& entries,
                             Lexicon::Kind kind) {
  Lexicon lex;
  lex.kind = kind;
  for (const auto& [word, value] : entries) {
    if (trim(word).empty()) throw ValidationError("lexicon: empty word");
    validate_lexicon_value(word, value, kind);
    lex.entries[lower_ascii(word)] = value;  // later duplicates overwrite
  }
  finalize_default(lex);
  return lex;
}

Lexicon parse_lexicon(std::istream& in, Lexicon::Kind kind) {
  Lexicon lex;
  lex.kind = kind;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw ValidationError("lexicon line " + std::to_string(lineno) + ": expected word<TAB>value");
    }
    std::string word(trim(fields[0]));
    if (word.empty()) throw ValidationError("lexicon line " + std::to_string(lineno) + ": empty word");
    std::string value_text(trim(fields[1]));
    char* end = nullptr;
    double value = std::strtod(value_text.c_str(), &end);
    if (end == value_text.c_str() || *end != '\0' || !std::isfinite(value)) {
      throw ValidationError("lexicon line " + std::to_string(lineno) + ": non-numeric value '" +
                            value_text + "'");
    }
    validate_lexicon_value(word, value, kind);
    lex.entries[lower_ascii(word)] = value;
  }
  finalize_default(lex);
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, Lexicon::Kind kind) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon file: " + path.string());
  return parse_lexicon(in, kind);
}

void save_lexicon(const std::filesystem::path& path, const Lexicon& lexicon) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write lexicon file: " + path.string());
  std::vector<std::pair<std::string, double>> sorted(lexicon.entries.begin(), lexicon.entries.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [word, value] : sorted) {
    out << word << '\t' << format_double(value, 6) << '\n';
  }
}

namespace {

int parse_grade(const json& j, const std::string& key, size_t lineno) {
  if (!j.is_number_integer()) {
    throw ValidationError("dataset line " + std::to_string(lineno) + ": " + key +
                          " must be an integer");
  }
  int grade = j.get<int>();
  if (grade < kMinGrade || grade > kMaxGrade) {
    throw ValidationError("dataset line " + std::to_string(lineno) + ": grade out of range: " +
                          std::to_string(grade));
  }
  return grade;
}

void check_record(DatasetRecord& rec, std::unordered_set<std::string>& seen, size_t lineno) {
  if (rec.id.empty()) throw ValidationError("dataset line " + std::to_string(lineno) + ": empty id");
  if (trim(rec.source).empty()) {
    throw ValidationError("dataset line " + std::to_string(lineno) + ": empty source");
  }
  if (!seen.insert(rec.id).second) {
    throw ValidationError("dataset line " + std::to_string(lineno) + ": duplicate id '" + rec.id + "'");
  }
}

int parse_grade_text(std::string_view text, size_t lineno) {
  int value = 0;
  auto trimmed = trim(text);
  auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
  if (ec != std::errc{} || ptr != trimmed.data() + trimmed.size()) {
    throw ValidationError("dataset line " + std::to_string(lineno) + ": bad grade '" +
                          std::string(text) + "'");
  }
  if (value < kMinGrade || value > kMaxGrade) {
    throw ValidationError("dataset line " + std::to_string(lineno) + ": grade out of range: " +
                          std::to_string(value));
  }
  return value;
}

}  // namespace

std::vector<DatasetRecord> parse_dataset_jsonl(std::istream& in) {
  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("dataset line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) {
      throw ValidationError("dataset line " + std::to_string(lineno) + ": expected an object");
    }
    DatasetRecord rec;
    if (!j.contains("id") || !j["id"].is_string()) {
      throw ValidationError("dataset line " + std::to_string(lineno) + ": missing string 'id'");
    }
    rec.id = j["id"].get<std::string>();
    if (!j.contains("source") || !j["source"].is_string()) {
      throw ValidationError("dataset line " + std::to_string(lineno) + ": missing string 'source'");
    }
    rec.source = j["source"].get<std::string>();
    if (j.contains("reference") && !j["reference"].is_null()) {
      if (!j["reference"].is_string()) {
        throw ValidationError("dataset line " + std::to_string(lineno) + ": 'reference' must be a string");
      }
      rec.reference = j["reference"].get<std::string>();
    }
    if (j.contains("system_output") && !j["system_output"].is_null()) {
      if (!j["system_output"].is_string()) {
        throw ValidationError("dataset line " + std::to_string(lineno) +
                              ": 'system_output' must be a string");
      }
      rec.system_output = j["system_output"].get<std::string>();
    }
    if (j.contains("source_grade") && !j["source_grade"].is_null()) {
      rec.source_grade = parse_grade(j["source_grade"], "source_grade", lineno);
    }
    if (j.contains("target_grade") && !j["target_grade"].is_null()) {
      rec.target_grade = parse_grade(j["target_grade"], "target_grade", lineno);
    }
    check_record(rec, seen, lineno);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DatasetRecord> parse_dataset_tsv(std::istream& in) {
  // Columns: id, source, reference, source_grade, target_grade, system_output.
  // Trailing columns may be omitted; empty field means absent.
  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() < 2 || fields.size() > 6) {
      throw ValidationError("dataset line " + std::to_string(lineno) + ": expected 2-6 columns, got " +
                            std::to_string(fields.size()));
    }
    DatasetRecord rec;
    rec.id = std::string(fields[0]);
    rec.source = std::string(fields[1]);
    if (fields.size() > 2 && !fields[2].empty()) rec.reference = std::string(fields[2]);
    if (fields.size() > 3 && !fields[3].empty()) rec.source_grade = parse_grade_text(fields[3], lineno);
    if (fields.size() > 4 && !fields[4].empty()) rec.target_grade = parse_grade_text(fields[4], lineno);
    if (fields.size() > 5 && !fields[5].empty()) rec.system_output = std::string(fields[5]);
    check_record(rec, seen, lineno);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file: " + path.string());
  return format == DatasetFormat::jsonl ? parse_dataset_jsonl(in) : parse_dataset_tsv(in);
}

std::string record_to_jsonl(const DatasetRecord& record) {
  ordered_json j;
  j["id"] = record.id;
  j["source"] = record.source;
  if (record.reference) j["reference"] = *record.reference;
  if (record.source_grade) j["source_grade"] = *record.source_grade;
  if (record.target_grade) j["target_grade"] = *record.target_grade;
  if (record.system_output) j["system_output"] = *record.system_output;
  return j.dump();
}

void save_dataset_jsonl(const std::filesystem::path& path, const std::vector<DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write dataset file: " + path.string());
  for (const auto& rec : records) out << record_to_jsonl(rec) << '\n';
}

void ParseMap::insert(ParsedSentence sentence) {
  auto key = std::make_pair(sentence.record_id, static_cast<int>(sentence.side));
  auto [it, inserted] = by_key_.emplace(std::move(key), std::move(sentence));
  if (!inserted) {
    throw ValidationError("duplicate parse for " + it->second.record_id + "/" +
                          std::string(side_name(it->second.side)));
  }
}

const ParsedSentence* ParseMap::find(std::string_view record_id, Side side) const {
  auto it = by_key_.find(std::make_pair(std::string(record_id), static_cast<int>(side)));
  return it == by_key_.end() ? nullptr : &it->second;
}

namespace {

struct ConlluBlock {
  std::optional<std::string> sent_id;
  std::vector<ParsedSentence::Token> tokens;
  size_t start_line = 0;

  bool empty() const { return tokens.empty() && !sent_id; }
};

void flush_block(ConlluBlock& block, ParseMap& out) {
  if (block.tokens.empty()) {
    block = ConlluBlock{};
    return;
  }
  if (!block.sent_id) {
    throw ValidationError("conllu block at line " + std::to_string(block.start_line) +
                          ": missing sent_id comment");
  }
  auto slash = block.sent_id->rfind('/');
  if (slash == std::string::npos) {
    throw ValidationError("conllu sent_id '" + *block.sent_id + "': expected <record_id>/<side>");
  }
  auto side = side_from_name(block.sent_id->substr(slash + 1));
  if (!side) {
    throw ValidationError("conllu sent_id '" + *block.sent_id + "': unknown side");
  }
  ParsedSentence sentence;
  sentence.record_id = block.sent_id->substr(0, slash);
  sentence.side = *side;
  sentence.tokens = std::move(block.tokens);
  validate_tree(sentence);
  out.insert(std::move(sentence));
  block = ConlluBlock{};
}

}  // namespace

ParseMap parse_conllu(std::istream& in) {
  ParseMap out;
  ConlluBlock block;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush_block(block, out);
      continue;
    }
    if (line[0] == '#') {
      auto body = trim(std::string_view(line).substr(1));
      if (body.rfind("sent_id", 0) == 0) {
        auto rest = trim(body.substr(7));
        if (!rest.empty() && rest[0] == '=') {
          if (block.empty()) block.start_line = lineno;
          block.sent_id = std::string(trim(rest.substr(1)));
        }
      }
      continue;
    }
    auto fields = split(line, '\t');
    if (fields.size() != 10) {
      throw ValidationError("conllu line " + std::to_string(lineno) + ": expected 10 columns, got " +
                            std::to_string(fields.size()));
    }
    std::string_view id_field = fields[0];
    // Multiword-token ranges ("3-4") and empty nodes ("5.1") carry no
    // tree structure; skip them.
    if (id_field.find('-') != std::string_view::npos) continue;
    if (id_field.find('.') != std::string_view::npos) continue;
    if (block.empty() && !block.sent_id) block.start_line = lineno;
    int id = 0;
    {
      auto [ptr, ec] = std::from_chars(id_field.data(), id_field.data() + id_field.size(), id);
      if (ec != std::errc{} || ptr != id_field.data() + id_field.size()) {
        throw ValidationError("conllu line " + std::to_string(lineno) + ": bad token id '" +
                              std::string(id_field) + "'");
      }
    }
    if (id != static_cast<int>(block.tokens.size()) + 1) {
      throw ValidationError("conllu line " + std::to_string(lineno) + ": token ids must be 1..n, got " +
                            std::to_string(id));
    }
    std::string_view head_field = fields[6];
    int head = 0;
    {
      auto [ptr, ec] = std::from_chars(head_field.data(), head_field.data() + head_field.size(), head);
      if (ec != std::errc{} || ptr != head_field.data() + head_field.size() || head < 0) {
        throw ValidationError("conllu line " + std::to_string(lineno) + ": bad head '" +
                              std::string(head_field) + "'");
      }
    }
    block.tokens.push_back({std::string(fields[1]), head});
  }
  flush_block(block, out);
  return out;
}

ParseMap load_conllu(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open conllu file: " + path.string());
  return parse_conllu(in);
}

void save_conllu(const std::filesystem::path& path, const ParseMap& parses) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write conllu file: " + path.string());
  for (const auto& [key, sentence] : parses) {
    out << "# sent_id = " << sentence.record_id << '/' << side_name(sentence.side) << '\n';
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      const auto& tok = sentence.tokens[i];
      out << (i + 1) << '\t' << tok.form << "\t_\t_\t_\t_\t" << tok.head << "\t_\t_\t_\n";
    }
    out << '\n';
  }
}

}  // namespace tsc::corpus
