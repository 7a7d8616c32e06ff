#include "rdpp/caption.hpp"

#include <cctype>

#include "rdpp/errors.hpp"

namespace rdpp {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

std::string Caption::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

Caption tokenize(const std::string& text) {
  std::string norm;
  norm.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_word_char(c)) {
      norm += static_cast<char>(std::tolower(c));
    } else if (c == '\'' && i > 0 && i + 1 < text.size() &&
               is_word_char(static_cast<unsigned char>(text[i - 1])) &&
               is_word_char(static_cast<unsigned char>(text[i + 1]))) {
      norm += '\'';
    } else {
      norm += ' ';
    }
  }

  Caption cap;
  std::size_t pos = 0;
  while (pos < norm.size()) {
    while (pos < norm.size() && norm[pos] == ' ') ++pos;
    std::size_t end = pos;
    while (end < norm.size() && norm[end] != ' ') ++end;
    if (end > pos) cap.tokens.push_back(norm.substr(pos, end - pos));
    pos = end;
  }
  if (cap.tokens.empty())
    throw EmptyCaptionError("caption empty after normalization: \"" + text + "\"");
  return cap;
}

std::unordered_map<std::string, int> extract_ngrams(const Caption& c, int n) {
  if (n < 1) throw ShapeError("n-gram order must be >= 1");
  std::unordered_map<std::string, int> grams;
  if (c.tokens.size() < static_cast<std::size_t>(n)) return grams;
  for (std::size_t i = 0; i + n <= c.tokens.size(); ++i) {
    std::string key = c.tokens[i];
    for (int k = 1; k < n; ++k) {
      key += ' ';
      key += c.tokens[i + k];
    }
    ++grams[key];
  }
  return grams;
}

}  // namespace rdpp
