#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rdpp/caption.hpp"
#include "rdpp/metrics.hpp"

namespace rdpp {

enum class RewardMode { kScst, kRdpp };

std::string reward_mode_name(RewardMode mode);
RewardMode parse_reward_mode(const std::string& name);  ///< ConfigError on unknown names

/// Captions drawn independently from the policy for one image.
struct SampledSet {
  std::vector<Caption> captions;
  std::vector<double> log_probs;  ///< exact sequence log-probabilities, <= 0
  std::string image_id;
};

/// Scalar reward plus the per-caption coefficients w_i such that
/// grad R = sum_i w_i * grad log p(c_i).
struct RewardBundle {
  double reward = 0.0;
  std::vector<double> weights;
  RewardMode mode = RewardMode::kScst;
};

/// Expected-CIDEr reward: R = sum_i q_i p_i, weight_i = (q_i - baseline) p_i.
RewardBundle scst_reward(const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                         double baseline = 0.0);

/// Pairwise signed reward: R = sum_ij signs_ij L_ij p_i p_j,
/// weight_i = 2 p_i sum_j signs_ij L_ij p_j.
RewardBundle rdpp_reward(const Eigen::MatrixXd& L, const Eigen::MatrixXd& signs,
                         const Eigen::VectorXd& p);

/// Intermediate matrices kept for logging and tests.
struct RdppAssembly {
  Eigen::VectorXd q;
  Eigen::MatrixXd S;
  Eigen::MatrixXd L;
  Eigen::MatrixXd signs;
  RewardBundle bundle;
};

/// Full composition: quality -> similarity -> L-ensemble -> signs -> reward.
RdppAssembly assemble_rdpp(const SampledSet& sampled, const std::vector<Caption>& refs,
                           const DocFreq& df, double eps = 1e-6, double tol = 1e-12);

}  // namespace rdpp
