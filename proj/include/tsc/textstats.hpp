#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsc/corpus.hpp"

namespace tsc::textstats {

/// Word token with byte offsets into the original text and the index of
/// the sentence it belongs to.
struct Token {
  std::string form;
  size_t begin = 0;
  size_t end = 0;
  size_t sentence = 0;
};

struct Sentence {
  size_t begin = 0;
  size_t end = 0;  // one past the last byte, terminator included
  std::optional<char> terminator;
};

struct Tokenization {
  std::vector<Token> words;
  std::vector<Sentence> sentences;
};

/// Word tokens are maximal runs of alphanumeric bytes (bytes >= 0x80 are
/// treated as word bytes so UTF-8 letters do not split tokens); an
/// apostrophe between two word bytes stays inside the token. Sentences end
/// at . ! ? followed by whitespace or end of text; trailing text without a
/// terminator counts as one sentence when it contains anything non-blank.
Tokenization tokenize(std::string_view text);

/// Just the token forms.
std::vector<std::string> word_forms(std::string_view text);

struct TextStats {
  int n_words = 0;
  int n_chars = 0;  // bytes inside word tokens only
  int n_sentences = 0;
  std::optional<int> max_dep_depth;
  std::optional<double> word_rank;
  std::optional<double> mean_aoa;
};

TextStats basic_stats(std::string_view text);

/// 4.71 * chars/words + 0.5 * words/sentences - 21.43, unrounded.
/// Requires at least one word and one sentence.
double ari(const TextStats& stats);

/// ARI rounded to the nearest integer and clamped to [1, 13].
int ari_grade(std::string_view text);

/// 206.835 - 1.015 * words/sentences - 84.6 * syllables/words, with
/// syllables from a vowel-group heuristic.
double flesch_reading_ease(std::string_view text);

/// Vowel groups (aeiouy) count one syllable each; a trailing 'e' on a
/// multi-letter word is dropped first; every word has at least one.
int count_syllables(std::string_view word);

size_t levenshtein_distance(std::string_view a, std::string_view b);

/// 1 - distance / max(|a|, |b|); two empty strings are identical (1).
double levenshtein_similarity(std::string_view a, std::string_view b);

/// 1 - substitutions / max(|a|, |b|) where substitutions counts replace
/// operations in a minimal-cost edit script, breaking ties among minimal
/// scripts toward fewer substitutions.
double replace_levenshtein_similarity(std::string_view a, std::string_view b);

/// Third quartile (linear interpolation) of natural-log frequency ranks
/// over alphabetic tokens; out-of-vocabulary words take the lexicon
/// default. No alphabetic tokens yields 0.
double word_rank(const std::vector<std::string>& words, const corpus::Lexicon& freq);

/// Mean age of acquisition over alphabetic tokens; no alphabetic tokens
/// yields the lexicon default (its mean).
double mean_aoa(const std::vector<std::string>& words, const corpus::Lexicon& aoa);

/// Depth of the deepest token, with the root at depth 1.
int tree_depth(const corpus::ParsedSentence& parse);

bool is_word_byte(unsigned char c);

/// Letters and apostrophes only, with at least one letter.
bool is_alphabetic_token(std::string_view token);

}  // namespace tsc::textstats
