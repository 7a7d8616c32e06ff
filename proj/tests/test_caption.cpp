#include <string>
#include <unordered_map>
#include <vector>

#include "doctest.h"
#include "rdpp/caption.hpp"
#include "rdpp/errors.hpp"

using rdpp::Caption;
using rdpp::extract_ngrams;
using rdpp::tokenize;

namespace {

std::vector<std::string> toks(const std::string& s) { return tokenize(s).tokens; }

}  // namespace

TEST_CASE("tokenize lowercases and strips punctuation") {
  CHECK(toks("A man rides a horse.") ==
        std::vector<std::string>{"a", "man", "rides", "a", "horse"});
  CHECK(toks("DOG!!!") == std::vector<std::string>{"dog"});
  CHECK(toks("The  quick\tbrown\nfox") ==
        std::vector<std::string>{"the", "quick", "brown", "fox"});
}

TEST_CASE("tokenize keeps apostrophes between letters only") {
  CHECK(toks("don't stop") == std::vector<std::string>{"don't", "stop"});
  CHECK(toks("it's a dog's toy") ==
        std::vector<std::string>{"it's", "a", "dog's", "toy"});
  // Leading/trailing quotes are punctuation, not contractions.
  CHECK(toks("'hello' world") == std::vector<std::string>{"hello", "world"});
}

TEST_CASE("tokenize treats punctuation as a separator") {
  CHECK(toks("rock-n-roll") == std::vector<std::string>{"rock", "n", "roll"});
  CHECK(toks("3 dogs, 2 cats") ==
        std::vector<std::string>{"3", "dogs", "2", "cats"});
}

TEST_CASE("tokenize rejects captions that normalize to nothing") {
  CHECK_THROWS_AS(tokenize("   "), rdpp::EmptyCaptionError);
  CHECK_THROWS_AS(tokenize(""), rdpp::EmptyCaptionError);
  CHECK_THROWS_AS(tokenize("!!! ... ???"), rdpp::EmptyCaptionError);
}

TEST_CASE("caption text round trip") {
  const Caption c = tokenize("A man rides a horse.");
  CHECK(c.text() == "a man rides a horse");
  CHECK(tokenize(c.text()) == c);
}

TEST_CASE("extract_ngrams counts multisets") {
  const Caption c{{"a", "man", "a"}};
  const auto uni = extract_ngrams(c, 1);
  CHECK(uni.size() == 2);
  CHECK(uni.at("a") == 2);
  CHECK(uni.at("man") == 1);

  const Caption d{{"a", "b", "a", "b"}};
  const auto bi = extract_ngrams(d, 2);
  CHECK(bi.size() == 2);
  CHECK(bi.at("a b") == 2);
  CHECK(bi.at("b a") == 1);
}

TEST_CASE("extract_ngrams is empty past the caption length") {
  const Caption c{{"a", "man"}};
  CHECK(extract_ngrams(c, 3).empty());
  CHECK(extract_ngrams(c, 2).size() == 1);
}

TEST_CASE("extract_ngrams rejects non-positive order") {
  const Caption c{{"a"}};
  CHECK_THROWS_AS(extract_ngrams(c, 0), rdpp::ShapeError);
  CHECK_THROWS_AS(extract_ngrams(c, -1), rdpp::ShapeError);
}
