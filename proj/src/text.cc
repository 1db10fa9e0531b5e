#include "grice/text.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>

namespace grice {

namespace {

// Keep sorted: looked up by binary search.
constexpr auto kStopwords = std::to_array<std::string_view>({
    "about",   "above",   "after",  "again",   "against", "all",    "also",
    "am",      "an",      "and",    "any",     "are",     "as",     "at",
    "be",      "because", "been",   "before",  "being",   "below",  "between",
    "both",    "but",     "by",     "can",     "could",   "did",    "do",
    "does",    "doing",   "down",   "during",  "each",    "even",   "few",
    "for",     "from",    "further", "had",    "has",     "have",   "having",
    "he",      "her",     "here",   "hers",    "herself", "him",    "himself",
    "his",     "how",     "if",     "in",      "into",    "is",     "it",
    "its",     "itself",  "just",   "let",     "me",      "more",   "most",
    "my",      "myself",  "no",     "nor",     "not",     "now",    "of",
    "off",     "on",      "once",   "only",    "or",      "other",  "our",
    "ours",    "out",     "over",   "own",     "really",  "same",   "she",
    "should",  "so",      "some",   "such",    "than",    "that",   "the",
    "their",   "them",    "then",   "there",   "these",   "they",   "this",
    "those",   "through", "to",     "too",     "under",   "until",  "up",
    "us",      "very",    "was",    "we",      "well",    "were",   "what",
    "when",    "where",   "which",  "while",   "who",     "whom",   "why",
    "will",    "with",    "would",  "yes",     "you",     "your",   "yours",
    "yourself",
});

}  // namespace

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 128 && std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

bool is_stopword(std::string_view word) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), word);
}

std::span<const std::string_view> stopwords() { return kStopwords; }

std::vector<std::string> content_words(std::span<const std::string> words) {
  std::vector<std::string> out;
  for (const auto& w : words) {
    if (w.size() >= 2 && !is_stopword(w)) out.push_back(w);
  }
  return out;
}

std::vector<std::string> content_words(std::string_view text) {
  return content_words(tokenize_words(text));
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace grice
