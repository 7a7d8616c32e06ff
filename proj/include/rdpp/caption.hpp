#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace rdpp {

/// A tokenized caption: lowercase, punctuation-free tokens.
struct Caption {
  std::vector<std::string> tokens;

  std::size_t length() const { return tokens.size(); }
  bool operator==(const Caption&) const = default;

  /// Tokens joined by single spaces; the canonical text form used for
  /// serialization and hashing.
  std::string text() const;
};

/// Lowercases, strips punctuation (everything non-alphanumeric except
/// apostrophes between letters), and splits on whitespace.
/// Throws EmptyCaptionError if nothing survives normalization.
Caption tokenize(const std::string& text);

/// Multiset of contiguous n-token windows, keyed by the space-joined gram.
/// Empty when the caption is shorter than n.
std::unordered_map<std::string, int> extract_ngrams(const Caption& c, int n);

}  // namespace rdpp
