#include <sstream>

#include "doctest.h"
#include "tsc/corpus.hpp"
#include "tsc/util.hpp"

using namespace tsc;
using namespace tsc::corpus;

TEST_CASE("jsonl dataset: field mapping") {
  std::istringstream in(R"({"id":"r1","source":"A b.","target_grade":5})" "\n");
  auto records = parse_dataset_jsonl(in);
  REQUIRE(records.size() == 1);
  CHECK(records[0].id == "r1");
  CHECK(records[0].source == "A b.");
  CHECK_FALSE(records[0].reference.has_value());
  CHECK(records[0].target_grade == 5);
  CHECK_FALSE(records[0].source_grade.has_value());
}

TEST_CASE("jsonl dataset: empty file gives empty list") {
  std::istringstream in("");
  CHECK(parse_dataset_jsonl(in).empty());
}

TEST_CASE("jsonl dataset: grade out of range") {
  std::istringstream in(R"({"id":"r1","source":"A b.","target_grade":99})" "\n");
  CHECK_THROWS_WITH_AS(parse_dataset_jsonl(in), doctest::Contains("grade out of range"),
                       ValidationError);
}

TEST_CASE("jsonl dataset: malformed line reports the line number") {
  std::istringstream in("{\"id\":\"r1\",\"source\":\"x.\"}\nnot json\n");
  CHECK_THROWS_WITH_AS(parse_dataset_jsonl(in), doctest::Contains("line 2"), ValidationError);
}

TEST_CASE("jsonl dataset: duplicate ids rejected") {
  std::istringstream in(
      "{\"id\":\"r1\",\"source\":\"x.\"}\n{\"id\":\"r1\",\"source\":\"y.\"}\n");
  CHECK_THROWS_WITH_AS(parse_dataset_jsonl(in), doctest::Contains("duplicate id"), ValidationError);
}

TEST_CASE("jsonl dataset: blank source rejected") {
  std::istringstream in(R"({"id":"r1","source":"   "})" "\n");
  CHECK_THROWS_AS(parse_dataset_jsonl(in), ValidationError);
}

TEST_CASE("dataset round-trips through jsonl") {
  std::vector<DatasetRecord> records;
  DatasetRecord a;
  a.id = "r1";
  a.source = "The cat, sat.";
  a.reference = "The cat sat.";
  a.source_grade = 8;
  a.target_grade = 5;
  records.push_back(a);
  DatasetRecord b;
  b.id = "r2";
  b.source = "Unicode \xc3\xa9 text with \"quotes\".";
  b.system_output = "short";
  records.push_back(b);

  std::string text;
  for (const auto& r : records) text += record_to_jsonl(r) + "\n";
  std::istringstream in(text);
  auto reloaded = parse_dataset_jsonl(in);
  CHECK(reloaded == records);
}

TEST_CASE("tsv dataset parsing") {
  std::istringstream in("r1\tThe cat sat.\tThe cat.\t8\t5\n" "r2\tAnother one.\n");
  auto records = parse_dataset_tsv(in);
  REQUIRE(records.size() == 2);
  CHECK(records[0].reference == "The cat.");
  CHECK(records[0].source_grade == 8);
  CHECK(records[0].target_grade == 5);
  CHECK_FALSE(records[1].reference.has_value());
}

static std::string block(const std::string& sent_id, const std::vector<std::pair<std::string, int>>& toks) {
  std::string out = "# sent_id = " + sent_id + "\n";
  int i = 1;
  for (const auto& [form, head] : toks) {
    out += std::to_string(i++) + "\t" + form + "\t_\t_\t_\t_\t" + std::to_string(head) +
           "\t_\t_\t_\n";
  }
  out += "\n";
  return out;
}

TEST_CASE("conllu: basic block") {
  std::istringstream in(block("r1/source", {{"The", 2}, {"cat", 0}}));
  auto parses = parse_conllu(in);
  const auto* p = parses.find("r1", Side::source);
  REQUIRE(p != nullptr);
  REQUIRE(p->tokens.size() == 2);
  CHECK(p->tokens[0].form == "The");
  CHECK(p->tokens[0].head == 2);
  CHECK(p->tokens[1].head == 0);
}

TEST_CASE("conllu: multiword ranges and empty nodes are skipped") {
  std::string text =
      "# sent_id = r1/source\n"
      "1\tThe\t_\t_\t_\t_\t2\t_\t_\t_\n"
      "2-3\tdel_range\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "2\tcat\t_\t_\t_\t_\t0\t_\t_\t_\n"
      "2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "\n";
  std::istringstream in(text);
  auto parses = parse_conllu(in);
  const auto* p = parses.find("r1", Side::source);
  REQUIRE(p != nullptr);
  CHECK(p->tokens.size() == 2);
}

TEST_CASE("conllu: head out of range") {
  std::istringstream in(block("r1/source", {{"a", 7}, {"b", 0}, {"c", 1}}));
  CHECK_THROWS_WITH_AS(parse_conllu(in), doctest::Contains("head index out of range"),
                       ValidationError);
}

TEST_CASE("conllu: multiple roots") {
  std::istringstream in(block("r1/source", {{"a", 0}, {"b", 0}}));
  CHECK_THROWS_WITH_AS(parse_conllu(in), doctest::Contains("multiple roots"), ValidationError);
}

TEST_CASE("conllu: cycle detected") {
  std::istringstream in(block("r1/source", {{"a", 2}, {"b", 1}, {"c", 0}}));
  CHECK_THROWS_WITH_AS(parse_conllu(in), doctest::Contains("cycle"), ValidationError);
}

TEST_CASE("conllu: missing sent_id") {
  std::istringstream in("1\tThe\t_\t_\t_\t_\t0\t_\t_\t_\n\n");
  CHECK_THROWS_WITH_AS(parse_conllu(in), doctest::Contains("missing sent_id"), ValidationError);
}

TEST_CASE("conllu: duplicate sent_id") {
  std::istringstream in(block("r1/source", {{"a", 0}}) + block("r1/source", {{"b", 0}}));
  CHECK_THROWS_WITH_AS(parse_conllu(in), doctest::Contains("duplicate parse"), ValidationError);
}

TEST_CASE("lexicon: load, case-folding, duplicates, defaults") {
  std::istringstream in("the\t1\ncat\t50\nCat\t60\n");
  auto lex = parse_lexicon(in, Lexicon::Kind::frequency_rank);
  CHECK(lex.lookup("the") == 1.0);
  CHECK(lex.lookup("cat") == 60.0);  // later duplicate wins after lowercasing
  CHECK(lex.lookup("CAT") == 60.0);
  CHECK(lex.lookup("zzz") == 60.0);  // OOV falls back to the max rank
}

TEST_CASE("lexicon: aoa default is the mean") {
  std::istringstream in("cat\t4\ndog\t6\n");
  auto lex = parse_lexicon(in, Lexicon::Kind::age_of_acquisition);
  CHECK(lex.lookup("unseen") == doctest::Approx(5.0));
}

TEST_CASE("lexicon: bad values rejected") {
  std::istringstream nan_in("cat\tNaN\n");
  CHECK_THROWS_AS(parse_lexicon(nan_in, Lexicon::Kind::frequency_rank), ValidationError);
  std::istringstream empty_word("\t5\n");
  CHECK_THROWS_AS(parse_lexicon(empty_word, Lexicon::Kind::frequency_rank), ValidationError);
  std::istringstream low_rank("cat\t0.5\n");
  CHECK_THROWS_AS(parse_lexicon(low_rank, Lexicon::Kind::frequency_rank), ValidationError);
  std::istringstream high_aoa("cat\t30\n");
  CHECK_THROWS_AS(parse_lexicon(high_aoa, Lexicon::Kind::age_of_acquisition), ValidationError);
}
