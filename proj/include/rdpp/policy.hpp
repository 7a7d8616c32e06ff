#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rdpp/caption.hpp"

namespace rdpp {

/// Token table. Words are sorted and deduplicated; BOS and EOS are virtual
/// symbols sharing the extra index W (BOS only ever appears as a state row,
/// EOS only as an action column).
class Vocab {
 public:
  explicit Vocab(std::vector<std::string> words);

  int size() const { return static_cast<int>(words_.size()); }
  int num_states() const { return size() + 1; }   ///< word rows plus BOS
  int num_actions() const { return size() + 1; }  ///< word columns plus EOS
  int bos_state() const { return size(); }
  int eos_action() const { return size(); }

  /// Index of a word. Throws VocabError for unknown tokens.
  int id(const std::string& token) const;
  const std::string& word(int id) const;
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const Vocab& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
};

/// First-order autoregressive policy: one logits slab per context, row =
/// previous token (or BOS), column = next token (or EOS). EOS is masked at
/// the first step so every caption has at least one word; sequences reaching
/// max_len are force-terminated and carry no EOS factor.
struct PolicyParams {
  Vocab vocab;
  int num_contexts = 0;
  int max_len = 0;
  std::vector<Eigen::MatrixXd> logits;  ///< [context] -> (W+1) x (W+1)
};

/// Uniformly-initialized policy: logits i.i.d. in [-scale, scale].
PolicyParams init_policy(const Vocab& vocab, int num_contexts, int max_len,
                         std::uint64_t seed, double scale = 0.1);

/// Gradient rows of log p w.r.t. the context's logits slab, one entry per
/// visited step: (state row, one-hot minus softmax). Rows may repeat.
using GradRows = std::vector<std::pair<int, Eigen::RowVectorXd>>;

struct LogProbResult {
  double log_prob = 0.0;
  GradRows grad_rows;
};

struct Rollout {
  Caption caption;
  double log_prob = 0.0;
  GradRows grad_rows;
};

struct XeResult {
  double loss = 0.0;
  GradRows grad_rows;  ///< gradient of the loss (negated log-prob gradient)
};

/// Exact sequence log-probability and its analytic gradient.
LogProbResult log_prob_grad(const PolicyParams& params, int context,
                            const Caption& caption);

/// Ancestral sampling from the per-step softmax. Deterministic given the
/// engine state; log_prob and grads match log_prob_grad on the result.
Rollout sample(const PolicyParams& params, int context, std::mt19937_64& rng);

/// Length-capped beam search over log p. Ties broken toward the
/// lexicographically smaller token sequence. Width >= the sequence space
/// size makes the search exhaustive.
Caption beam_search(const PolicyParams& params, int context, int beam_width);

/// Every terminated sequence with its exact probability, sorted by
/// descending probability then ascending token order.
/// Throws CapacityError when vocab^max_len exceeds 1e6.
std::vector<std::pair<Caption, double>> enumerate_all(const PolicyParams& params,
                                                      int context);

/// Teacher-forced cross-entropy: loss = -log p(reference), gradient of loss.
XeResult xe_step(const PolicyParams& params, int context, const Caption& reference);

/// Versioned binary checkpoint; round trips are bit-exact.
void save_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_checkpoint(const std::string& path);

}  // namespace rdpp
