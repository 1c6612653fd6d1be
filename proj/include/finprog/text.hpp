#pragma once

#include <cctype>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "finprog/strings.hpp"

// Tokenization contract shared by the data generators and the reference
// model:
//   * whitespace tokens  — split on whitespace only; used for evidence
//     sequences, operand spans, masking and the model vocabulary.
//   * word tokens        — maximal alphanumeric runs; used for the keyphrase
//     graph and phrase matching.
// Matching between the two normalizes a whitespace token to its lowercased
// alphanumeric core ("Units?" -> "units").

namespace finprog {

struct TextToken {
  std::string surface;
  std::size_t begin = 0;  // char offsets into the source
  std::size_t end = 0;
};

inline std::vector<TextToken> whitespace_tokenize(std::string_view text) {
  std::vector<TextToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    tokens.push_back({std::string(text.substr(i, j - i)), i, j});
    i = j;
  }
  return tokens;
}

inline std::vector<TextToken> word_tokenize(std::string_view text) {
  std::vector<TextToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
    tokens.push_back({std::string(text.substr(i, j - i)), i, j});
    i = j;
  }
  return tokens;
}

/// Lowercased alphanumeric core of a whitespace token; empty when the token
/// has no alphanumeric characters.
inline std::string word_key(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
  return detail::lower_copy(token.substr(b, e - b));
}

/// Strips the outer punctuation that report text glues onto numbers
/// ("$1,760," -> "$1,760") while keeping the characters parse_numeric needs:
/// $, %, parentheses and the minus sign.
inline std::string strip_numeric_edges(std::string_view token) {
  auto keep = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '$' || c == '%' || c == '(' ||
           c == ')' || c == '-' || c == '.';
  };
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !keep(token[b])) ++b;
  while (e > b && !keep(token[e - 1])) --e;
  std::string_view core = token.substr(b, e - b);
  // a trailing sentence period is punctuation, not a decimal point
  if (core.size() >= 2 && core.back() == '.' &&
      !std::isdigit(static_cast<unsigned char>(core[core.size() - 2]))) {
    core.remove_suffix(1);
  }
  return std::string(core);
}

// --------------------------------------------------------------------------
// Stopwords

using Stoplist = std::unordered_set<std::string>;

/// Default English stoplist compiled into the library; the same list ships as
/// data/stopwords_en.txt and any file loaded via load_stoplist replaces it.
inline const Stoplist& default_stopwords() {
  static const Stoplist kStopwords = {
      "a",       "about",   "above",  "after",   "again",  "against", "all",    "am",
      "an",      "and",     "any",    "are",     "as",     "at",      "be",     "because",
      "been",    "before",  "being",  "below",   "between","both",    "but",    "by",
      "can",     "cannot",  "could",  "did",     "do",     "does",    "doing",  "down",
      "during",  "each",    "few",    "for",     "from",   "further", "had",    "has",
      "have",    "having",  "he",     "her",     "here",   "hers",    "him",    "his",
      "how",     "i",       "if",     "in",      "into",   "is",      "it",     "its",
      "itself",  "just",    "me",     "more",    "most",   "my",      "no",     "nor",
      "not",     "now",     "of",     "off",     "on",     "once",    "only",   "or",
      "other",   "our",     "ours",   "out",     "over",   "own",     "same",   "she",
      "should",  "so",      "some",   "such",    "than",   "that",    "the",    "their",
      "theirs",  "them",    "then",   "there",   "these",  "they",    "this",   "those",
      "through", "to",      "too",    "under",   "until",  "up",      "very",   "was",
      "we",      "were",    "what",   "when",    "where",  "which",   "while",  "who",
      "whom",    "why",     "will",   "with",    "would",  "you",     "your",   "yours",
  };
  return kStopwords;
}

/// Loads a stoplist file: one token per line, UTF-8, blank lines skipped.
inline Stoplist load_stoplist(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open stoplist file: " + path);
  }
  Stoplist list;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view v = detail::trim_view(line);
    if (!v.empty()) list.insert(detail::lower_copy(v));
  }
  return list;
}

}  // namespace finprog
