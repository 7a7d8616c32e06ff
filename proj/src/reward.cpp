#include "rdpp/reward.hpp"

#include <cmath>
#include <string>

#include "rdpp/dpp.hpp"
#include "rdpp/errors.hpp"

namespace rdpp {

namespace {

constexpr double kSymmetryTol = 1e-8;

}  // namespace

std::string reward_mode_name(RewardMode mode) {
  return mode == RewardMode::kScst ? "scst" : "rdpp";
}

RewardMode parse_reward_mode(const std::string& name) {
  if (name == "scst") return RewardMode::kScst;
  if (name == "rdpp") return RewardMode::kRdpp;
  throw ConfigError("unknown reward mode '" + name + "' (expected scst|rdpp)");
}

RewardBundle scst_reward(const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                         double baseline) {
  if (q.size() != p.size())
    throw ShapeError("scst_reward: len(q) = " + std::to_string(q.size()) +
                     " does not match len(p) = " + std::to_string(p.size()));
  RewardBundle bundle;
  bundle.mode = RewardMode::kScst;
  bundle.reward = q.dot(p);
  bundle.weights.resize(static_cast<std::size_t>(q.size()));
  for (Eigen::Index i = 0; i < q.size(); ++i)
    bundle.weights[static_cast<std::size_t>(i)] = (q(i) - baseline) * p(i);
  return bundle;
}

RewardBundle rdpp_reward(const Eigen::MatrixXd& L, const Eigen::MatrixXd& signs,
                         const Eigen::VectorXd& p) {
  const Eigen::Index m = p.size();
  if (L.rows() != m || L.cols() != m || signs.rows() != m || signs.cols() != m)
    throw ShapeError("rdpp_reward: L and signs must be " + std::to_string(m) + "x" +
                     std::to_string(m) + " to match p");
  if (m > 0) {
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
      throw SymmetryError("rdpp_reward: L is not symmetric");
    if ((signs - signs.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
      throw SymmetryError("rdpp_reward: signs is not symmetric");
  }

  const Eigen::MatrixXd signed_l = signs.cwiseProduct(L);
  const Eigen::VectorXd row_sums = signed_l * p;

  RewardBundle bundle;
  bundle.mode = RewardMode::kRdpp;
  bundle.reward = p.dot(row_sums);
  bundle.weights.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    bundle.weights[static_cast<std::size_t>(i)] = 2.0 * p(i) * row_sums(i);
  return bundle;
}

RdppAssembly assemble_rdpp(const SampledSet& sampled, const std::vector<Caption>& refs,
                           const DocFreq& df, double eps, double tol) {
  const std::size_t m = sampled.captions.size();
  if (m == 0) throw EmptySetError("assemble_rdpp: sampled set is empty");
  if (sampled.log_probs.size() != m)
    throw ShapeError("assemble_rdpp: " + std::to_string(m) + " captions but " +
                     std::to_string(sampled.log_probs.size()) + " log-probs");

  RdppAssembly out;
  out.q.resize(static_cast<Eigen::Index>(m));
  Eigen::VectorXd p(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    out.q(static_cast<Eigen::Index>(i)) = cider(sampled.captions[i], refs, df);
    p(static_cast<Eigen::Index>(i)) = std::exp(sampled.log_probs[i]);
  }
  out.S = similarity_matrix_serial(sampled.captions, df);
  out.L = build_l(out.q, out.S);
  out.signs = inverse_sign_matrix(out.L, eps, tol);
  out.bundle = rdpp_reward(out.L, out.signs, p);
  return out;
}

}  // namespace rdpp
