#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rdpp/corpus.hpp"
#include "rdpp/policy.hpp"

namespace rdpp {

enum class EvalProtocol { kRandomSampling, kBeam, kOracle, kHumanLoo };

std::string protocol_name(EvalProtocol protocol);

struct EvalReport {
  EvalProtocol protocol = EvalProtocol::kRandomSampling;
  std::vector<std::string> metric_names;
  std::map<std::string, std::string> params;  ///< num_samples, beam_width, ...
  std::vector<std::string> image_ids;
  std::vector<std::vector<double>> rows;  ///< [image][metric]
  std::vector<double> aggregate;          ///< per-metric mean of rows

  /// Per-image rows plus a final row with image_id AGG.
  std::string to_csv() const;
  std::string to_json() const;
};

struct EvalOptions {
  Split split = Split::kTrain;
  int threads = 1;  ///< 0 = all hardware threads
};

/// Fig.-1-style protocol: per image draw num_samples rollouts; report mean
/// CIDEr (accuracy) and self-CIDEr diversity of the sample set.
EvalReport eval_random_sampling(const PolicyParams& params, const RefCorpus& corpus,
                                int num_samples, std::uint64_t seed,
                                const EvalOptions& options = {});

/// Single-caption protocol: beam search per image; BLEU-4, ROUGE-L, CIDEr.
EvalReport eval_beam(const PolicyParams& params, const RefCorpus& corpus,
                     int beam_width = 3, const EvalOptions& options = {});

/// Upper-bound protocol: per image draw num_samples rollouts and take each
/// metric's max independently. Sample streams are per-image, so sets at
/// different num_samples are nested prefixes.
EvalReport eval_oracle(const PolicyParams& params, const RefCorpus& corpus,
                       int num_samples, std::uint64_t seed,
                       const EvalOptions& options = {});

/// Human reference score: each reference scored by CIDEr against the rest;
/// diversity of the reference set. Images with one reference are skipped
/// with a warning.
EvalReport eval_human_loo(const RefCorpus& corpus, const EvalOptions& options = {});

}  // namespace rdpp
