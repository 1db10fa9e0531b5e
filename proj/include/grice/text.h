#ifndef GRICE_TEXT_H_
#define GRICE_TEXT_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grice {

// Lowercased runs of ASCII letters and digits; everything else separates.
std::vector<std::string> tokenize_words(std::string_view text);

// Words of two or more characters that are not stopwords.
std::vector<std::string> content_words(std::span<const std::string> words);
std::vector<std::string> content_words(std::string_view text);

bool is_stopword(std::string_view word);

// The built-in English stopword list, sorted.
std::span<const std::string_view> stopwords();

// 64-bit FNV-1a. Stable across platforms, used for seeds and content hashes.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace grice

#endif  // GRICE_TEXT_H_
