#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdpp/caption.hpp"
#include "rdpp/metrics.hpp"

namespace rdpp {

enum class Split { kTrain, kVal, kTest, kAll };

std::string split_name(Split split);
Split parse_split(const std::string& name);  ///< ConfigError on unknown names

struct ImageEntry {
  std::string image_id;
  std::vector<Caption> refs;
};

/// Reference corpus with a deterministic 80/10/10 split by image index and a
/// corpus-wide document-frequency table.
class RefCorpus {
 public:
  explicit RefCorpus(std::vector<ImageEntry> images);

  const std::vector<ImageEntry>& images() const { return images_; }
  std::size_t size() const { return images_.size(); }

  Split split_of(std::size_t index) const;
  std::vector<std::size_t> split_indices(Split split) const;

  const DocFreq& doc_freq() const { return df_; }

 private:
  std::vector<ImageEntry> images_;
  DocFreq df_;
};

/// Line-delimited records: {"image_id": "...", "refs": ["...", ...]}.
/// Captions are tokenized on load; malformed lines raise FormatError with
/// the line number.
RefCorpus load_corpus(const std::string& path);

/// Canonical serialization (space-joined tokens, one JSON object per line).
void save_corpus(const RefCorpus& corpus, const std::string& path);

struct SynthSpec {
  int num_images = 200;
  int vocab_size = 40;
  int refs_per_image = 5;
  int templates_per_image = 5;  ///< paraphrase clusters per image
  int min_tokens = 4;
  int max_tokens = 8;
  std::uint64_t seed = 0;
};

/// Synthetic corpus: each image gets a content-word triple shared across its
/// references and templates_per_image function-word arrangements, so
/// references agree on content (CIDEr is discriminative) while phrasing
/// varies (diversity is learnable). Deterministic per seed.
RefCorpus generate_synthetic(const SynthSpec& spec);

/// FNV-1a over the canonical serialization; stable across platforms.
std::uint64_t corpus_hash(const RefCorpus& corpus);

/// Sorted distinct tokens across all references.
std::vector<std::string> corpus_vocabulary(const RefCorpus& corpus);

}  // namespace rdpp
