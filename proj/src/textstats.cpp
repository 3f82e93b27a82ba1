#include "tsc/textstats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "tsc/util.hpp"

namespace tsc::textstats {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

namespace {

bool is_letter_byte(unsigned char c) {
  return std::isalpha(c) != 0 || c >= 0x80;
}

bool is_terminator(char c) {
  return c == '.' || c == '!' || c == '?';
}

}  // namespace

bool is_alphabetic_token(std::string_view token) {
  bool has_letter = false;
  for (unsigned char c : token) {
    if (is_letter_byte(c)) {
      has_letter = true;
    } else if (c != '\'') {
      return false;
    }
  }
  return has_letter;
}

Tokenization tokenize(std::string_view text) {
  Tokenization out;
  const size_t n = text.size();

  // Sentence spans first.
  size_t sent_start = 0;
  for (size_t i = 0; i < n; ++i) {
    if (is_terminator(text[i]) &&
        (i + 1 == n || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
      out.sentences.push_back({sent_start, i + 1, text[i]});
      sent_start = i + 1;
    }
  }
  if (sent_start < n) {
    auto rest = text.substr(sent_start);
    if (!trim(rest).empty()) {
      out.sentences.push_back({sent_start, n, std::nullopt});
    }
  }

  // Word tokens.
  size_t i = 0;
  while (i < n) {
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    size_t begin = i;
    while (i < n) {
      unsigned char c = static_cast<unsigned char>(text[i]);
      if (is_word_byte(c)) {
        ++i;
      } else if (c == '\'' && i > begin && i + 1 < n &&
                 is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
        ++i;  // word-internal apostrophe
      } else {
        break;
      }
    }
    Token tok;
    tok.form = std::string(text.substr(begin, i - begin));
    tok.begin = begin;
    tok.end = i;
    out.words.push_back(std::move(tok));
  }

  // Assign sentence indices to tokens.
  size_t s = 0;
  for (auto& tok : out.words) {
    while (s + 1 < out.sentences.size() && tok.begin >= out.sentences[s].end) ++s;
    tok.sentence = s;
  }
  return out;
}

std::vector<std::string> word_forms(std::string_view text) {
  auto tk = tokenize(text);
  std::vector<std::string> out;
  out.reserve(tk.words.size());
  for (auto& tok : tk.words) out.push_back(std::move(tok.form));
  return out;
}

TextStats basic_stats(std::string_view text) {
  auto tk = tokenize(text);
  TextStats stats;
  stats.n_words = static_cast<int>(tk.words.size());
  stats.n_sentences = static_cast<int>(tk.sentences.size());
  for (const auto& tok : tk.words) stats.n_chars += static_cast<int>(tok.form.size());
  return stats;
}

double ari(const TextStats& stats) {
  if (stats.n_words < 1 || stats.n_sentences < 1) {
    throw ValidationError("ari: requires at least one word and one sentence");
  }
  double chars_per_word = static_cast<double>(stats.n_chars) / stats.n_words;
  double words_per_sentence = static_cast<double>(stats.n_words) / stats.n_sentences;
  return 4.71 * chars_per_word + 0.5 * words_per_sentence - 21.43;
}

int ari_grade(std::string_view text) {
  auto stats = basic_stats(text);
  if (stats.n_words < 1 || stats.n_sentences < 1) {
    throw ValidationError("ari_grade: empty text");
  }
  long rounded = std::lround(ari(stats));
  return static_cast<int>(std::clamp<long>(rounded, corpus::kMinGrade, corpus::kMaxGrade));
}

int count_syllables(std::string_view word) {
  std::string w = lower_ascii(word);
  if (w.size() > 1 && w.back() == 'e') w.pop_back();
  auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int groups = 0;
  bool in_group = false;
  for (char c : w) {
    if (is_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  return std::max(groups, 1);
}

double flesch_reading_ease(std::string_view text) {
  auto tk = tokenize(text);
  if (tk.words.empty() || tk.sentences.empty()) {
    throw ValidationError("flesch_reading_ease: empty text");
  }
  int syllables = 0;
  for (const auto& tok : tk.words) syllables += count_syllables(tok.form);
  double words = static_cast<double>(tk.words.size());
  double sentences = static_cast<double>(tk.sentences.size());
  return 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words);
}

size_t levenshtein_distance(std::string_view a, std::string_view b) {
  const size_t n = a.size(), m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein_distance(a, b)) / static_cast<double>(longest);
}

double replace_levenshtein_similarity(std::string_view a, std::string_view b) {
  size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  // Each cell holds (edit cost, substitutions) minimized lexicographically,
  // so among all minimal-cost scripts we keep the one with fewest replaces.
  struct Cell {
    int cost;
    int subs;
  };
  auto better = [](const Cell& x, const Cell& y) {
    return x.cost < y.cost || (x.cost == y.cost && x.subs < y.subs);
  };
  const size_t n = a.size(), m = b.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = {static_cast<int>(j), 0};
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = {static_cast<int>(i), 0};
    for (size_t j = 1; j <= m; ++j) {
      Cell best = {prev[j].cost + 1, prev[j].subs};          // delete from a
      Cell ins = {cur[j - 1].cost + 1, cur[j - 1].subs};     // insert from b
      if (better(ins, best)) best = ins;
      bool same = a[i - 1] == b[j - 1];
      Cell diag = {prev[j - 1].cost + (same ? 0 : 1), prev[j - 1].subs + (same ? 0 : 1)};
      if (better(diag, best)) best = diag;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return 1.0 - static_cast<double>(prev[m].subs) / static_cast<double>(longest);
}

double word_rank(const std::vector<std::string>& words, const corpus::Lexicon& freq) {
  if (freq.kind != corpus::Lexicon::Kind::frequency_rank) {
    throw ValidationError("word_rank: lexicon is not a frequency-rank lexicon");
  }
  std::vector<double> logs;
  for (const auto& w : words) {
    if (!is_alphabetic_token(w)) continue;
    logs.push_back(std::log(freq.lookup(w)));
  }
  if (logs.empty()) return 0.0;
  std::sort(logs.begin(), logs.end());
  return quantile_sorted(logs, 0.75);
}

double mean_aoa(const std::vector<std::string>& words, const corpus::Lexicon& aoa) {
  if (aoa.kind != corpus::Lexicon::Kind::age_of_acquisition) {
    throw ValidationError("mean_aoa: lexicon is not an age-of-acquisition lexicon");
  }
  double sum = 0.0;
  int count = 0;
  for (const auto& w : words) {
    if (!is_alphabetic_token(w)) continue;
    sum += aoa.lookup(w);
    ++count;
  }
  if (count == 0) return aoa.default_value;
  return sum / count;
}

int tree_depth(const corpus::ParsedSentence& parse) {
  corpus::validate_tree(parse);
  const int n = static_cast<int>(parse.tokens.size());
  std::vector<int> depth(static_cast<size_t>(n), 0);
  auto compute = [&](auto&& self, int idx) -> int {
    if (depth[static_cast<size_t>(idx)]) return depth[static_cast<size_t>(idx)];
    int head = parse.tokens[static_cast<size_t>(idx)].head;
    int d = head == 0 ? 1 : self(self, head - 1) + 1;
    depth[static_cast<size_t>(idx)] = d;
    return d;
  };
  int max_depth = 1;
  for (int i = 0; i < n; ++i) max_depth = std::max(max_depth, compute(compute, i));
  return max_depth;
}

}  // namespace tsc::textstats
