#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdpp/adam.hpp"
#include "rdpp/corpus.hpp"
#include "rdpp/policy.hpp"
#include "rdpp/reward.hpp"

namespace rdpp {

struct TrainConfig {
  int xe_epochs = 100;
  int rl_epochs = 100;
  double learning_rate = 0.0004;
  int m = 5;                         ///< samples per image per RL step
  RewardMode mode = RewardMode::kScst;
  double eps = 1e-6;                 ///< L-ensemble ridge
  double tol = 1e-12;                ///< sign zero threshold
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool greedy_baseline = false;      ///< subtract greedy CIDEr in SCST weights
  int log_samples = 5;               ///< rollouts per image for XE epoch logging

  AdamConfig adam() const { return {learning_rate, beta1, beta2, adam_epsilon}; }
};

struct EpochRecord {
  int epoch = 0;
  std::string mode;       ///< xe | scst | rdpp
  int m = 0;              ///< samples behind this row's cider/diversity columns
  double mean_reward = 0.0;
  double mean_cider = 0.0;
  double self_cider = 0.0;
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> records;
  std::vector<double> mean_log_det;  ///< per RL epoch, RDPP only
  int skipped_steps = 0;             ///< images skipped after SingularityError

  std::string to_csv() const;
};

/// Strips the wall-clock column so deterministic runs compare bit-exactly.
std::string strip_seconds_column(const std::string& csv);

/// Cross-entropy phase: per image, per reference, one Adam step on the
/// teacher-forced loss. Trains the train split only; mutates params.
TrainLog train_xe(PolicyParams& params, const RefCorpus& corpus,
                  const TrainConfig& config);

/// RL phase: per image, draw config.m samples, build the reward bundle for
/// config.mode, and ascend sum_i w_i grad log p(c_i) with Adam.
TrainLog train_rl(PolicyParams& params, const RefCorpus& corpus,
                  const TrainConfig& config);

}  // namespace rdpp
