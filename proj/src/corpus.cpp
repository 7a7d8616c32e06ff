#include "rdpp/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "rdpp/errors.hpp"
#include "rdpp/rng.hpp"

namespace rdpp {

namespace {

using nlohmann::json;

const char* const kFunctionBank[] = {"a",  "the",  "some", "one", "two",
                                     "is", "near", "with", "on",  "under"};
const char* const kContentBank[] = {
    "dog",   "cat",   "bird",  "man",   "woman", "boy",   "girl", "car",
    "bike",  "tree",  "house", "ball",  "park",  "beach", "road", "table",
    "chair", "boat",  "train", "horse", "cow",   "sheep", "fish", "apple",
    "bench", "field", "river", "hill",  "snow",  "kite"};

std::string numbered_word(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

std::vector<std::string> take_words(const char* const* bank, int bank_size, int n,
                                    const char* overflow_prefix) {
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    words.push_back(i < bank_size ? std::string(bank[i])
                                  : numbered_word(overflow_prefix, i - bank_size));
  return words;
}

/// Index of a uniformly drawn element of [0, n).
int draw_index(std::mt19937_64& rng, int n) {
  const int k = static_cast<int>(uniform01(rng) * n);
  return std::min(k, n - 1);
}

std::string canonical_line(const ImageEntry& image) {
  json j;
  j["image_id"] = image.image_id;
  json refs = json::array();
  for (const Caption& c : image.refs) refs.push_back(c.text());
  j["refs"] = std::move(refs);
  return j.dump();
}

}  // namespace

std::string split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
    case Split::kAll: return "all";
  }
  throw ConfigError("split_name: unknown split value");
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  if (name == "all") return Split::kAll;
  throw ConfigError("unknown split '" + name + "' (expected train|val|test|all)");
}

RefCorpus::RefCorpus(std::vector<ImageEntry> images) : images_(std::move(images)) {
  if (images_.empty()) throw FormatError("corpus has no images");
  std::unordered_set<std::string> seen;
  for (const ImageEntry& image : images_) {
    if (image.image_id.empty()) throw FormatError("corpus image with empty image_id");
    if (!seen.insert(image.image_id).second)
      throw FormatError("duplicate image_id '" + image.image_id + "'");
    if (image.refs.empty())
      throw FormatError("image '" + image.image_id + "' has no references");
  }
  std::vector<std::vector<Caption>> all_refs;
  all_refs.reserve(images_.size());
  for (const ImageEntry& image : images_) all_refs.push_back(image.refs);
  df_ = build_doc_freq(all_refs);
}

Split RefCorpus::split_of(std::size_t index) const {
  if (index >= images_.size())
    throw ShapeError("split_of: image index " + std::to_string(index) + " out of range");
  const std::size_t n = images_.size();
  const std::size_t val = n / 10;
  const std::size_t test = n / 10;
  const std::size_t train = n - val - test;
  if (index < train) return Split::kTrain;
  if (index < train + val) return Split::kVal;
  return Split::kTest;
}

std::vector<std::size_t> RefCorpus::split_indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (split == Split::kAll || split_of(i) == split) out.push_back(i);
  return out;
}

RefCorpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open corpus file '" + path + "'");

  std::vector<ImageEntry> images;
  std::unordered_set<std::string> seen;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(where + ": invalid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("image_id") || !j.contains("refs"))
      throw FormatError(where + ": expected an object with image_id and refs");
    if (!j["image_id"].is_string() || j["image_id"].get<std::string>().empty())
      throw FormatError(where + ": image_id must be a non-empty string");
    if (!j["refs"].is_array() || j["refs"].empty())
      throw FormatError(where + ": refs must be a non-empty array");

    ImageEntry image;
    image.image_id = j["image_id"].get<std::string>();
    if (!seen.insert(image.image_id).second)
      throw FormatError(where + ": duplicate image_id '" + image.image_id + "'");
    for (const json& ref : j["refs"]) {
      if (!ref.is_string()) throw FormatError(where + ": refs must contain strings");
      try {
        image.refs.push_back(tokenize(ref.get<std::string>()));
      } catch (const Error& e) {
        throw FormatError(where + ": bad reference: " + e.what());
      }
    }
    images.push_back(std::move(image));
  }
  if (images.empty()) throw FormatError("corpus file '" + path + "' has no records");
  return RefCorpus(std::move(images));
}

void save_corpus(const RefCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  for (const ImageEntry& image : corpus.images()) out << canonical_line(image) << '\n';
  if (!out) throw FormatError("write to '" + path + "' failed");
}

RefCorpus generate_synthetic(const SynthSpec& spec) {
  if (spec.num_images < 1) throw ConfigError("synth: num_images must be >= 1");
  if (spec.vocab_size < 4) throw ConfigError("synth: vocab_size must be >= 4");
  if (spec.refs_per_image < 1) throw ConfigError("synth: refs_per_image must be >= 1");
  if (spec.templates_per_image < 1)
    throw ConfigError("synth: templates_per_image must be >= 1");
  if (spec.min_tokens < 1 || spec.max_tokens < spec.min_tokens)
    throw ConfigError("synth: need 1 <= min_tokens <= max_tokens");

  const int n_func = std::min(10, std::max(2, spec.vocab_size / 4));
  const int n_content = spec.vocab_size - n_func;
  const auto function_words = take_words(kFunctionBank, 10, n_func, "fw");
  const auto content_words = take_words(kContentBank, 30, n_content, "obj");
  const int content_per_image = std::min(3, n_content);

  std::vector<ImageEntry> images;
  images.reserve(static_cast<std::size_t>(spec.num_images));
  for (int i = 0; i < spec.num_images; ++i) {
    ImageEntry image;
    char id[32];
    std::snprintf(id, sizeof(id), "img%04d", i);
    image.image_id = id;

    // Partial Fisher-Yates draw of the image's content-word cluster.
    auto content_rng = make_rng(spec.seed, "content", static_cast<std::uint64_t>(i));
    std::vector<int> pool(static_cast<std::size_t>(n_content));
    for (int j = 0; j < n_content; ++j) pool[static_cast<std::size_t>(j)] = j;
    std::vector<std::string> cluster;
    for (int j = 0; j < content_per_image; ++j) {
      const int k = j + draw_index(content_rng, n_content - j);
      std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(k)]);
      cluster.push_back(content_words[static_cast<std::size_t>(pool[static_cast<std::size_t>(j)])]);
    }

    // Templates share the cluster but vary length and function words;
    // references cycle through them.
    std::vector<Caption> templates;
    for (int t = 0; t < spec.templates_per_image; ++t) {
      auto rng = make_rng(spec.seed, "template", static_cast<std::uint64_t>(i),
                          static_cast<std::uint64_t>(t));
      const int span = spec.max_tokens - spec.min_tokens + 1;
      const int len = spec.min_tokens + draw_index(rng, span);
      Caption c;
      for (int p = 0; p < len; ++p) {
        if (p % 2 == 1)
          c.tokens.push_back(cluster[static_cast<std::size_t>((p / 2) % content_per_image)]);
        else
          c.tokens.push_back(function_words[static_cast<std::size_t>(draw_index(rng, n_func))]);
      }
      templates.push_back(std::move(c));
    }
    for (int r = 0; r < spec.refs_per_image; ++r)
      image.refs.push_back(templates[static_cast<std::size_t>(r % spec.templates_per_image)]);
    images.push_back(std::move(image));
  }
  return RefCorpus(std::move(images));
}

std::uint64_t corpus_hash(const RefCorpus& corpus) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const ImageEntry& image : corpus.images()) {
    h = fnv1a64(canonical_line(image), h);
    h = fnv1a64("\n", h);
  }
  return h;
}

std::vector<std::string> corpus_vocabulary(const RefCorpus& corpus) {
  std::set<std::string> tokens;
  for (const ImageEntry& image : corpus.images())
    for (const Caption& ref : image.refs)
      for (const std::string& tok : ref.tokens) tokens.insert(tok);
  return std::vector<std::string>(tokens.begin(), tokens.end());
}

}  // namespace rdpp
