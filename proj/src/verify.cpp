#include "rdpp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "rdpp/caption.hpp"
#include "rdpp/dpp.hpp"
#include "rdpp/errors.hpp"
#include "rdpp/metrics.hpp"
#include "rdpp/policy.hpp"
#include "rdpp/reward.hpp"
#include "rdpp/rng.hpp"

namespace rdpp {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = 2.0 * uniform01(rng) - 1.0;
  Eigen::MatrixXd m = b * b.transpose();
  m.diagonal().array() += 0.5;
  return m;
}

Eigen::MatrixXd dense_grad(const GradRows& rows, int n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [row, vec] : rows) g.row(row) += vec;
  return g;
}

/// Symmetric-pair central finite differences of log_det: bumping (i,j) and
/// (j,i) together yields 2*inv_ij off-diagonal and inv_ii on the diagonal.
CheckResult check_logdet_identity(std::uint64_t seed) {
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto rng = make_rng(seed, "verify-logdet", static_cast<std::uint64_t>(trial));
    const int n = 2 + static_cast<int>(uniform01(rng) * 7);
    const Eigen::MatrixXd m = random_psd(rng, n);
    const Eigen::MatrixXd inv = ridge_inverse(m, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Eigen::MatrixXd up = m, down = m;
        up(i, j) += h;
        down(i, j) -= h;
        if (i != j) {
          up(j, i) += h;
          down(j, i) -= h;
        }
        const double fd = (log_det(up, 0.0) - log_det(down, 0.0)) / (2.0 * h);
        const double expected = i == j ? inv(i, i) : 2.0 * inv(i, j);
        worst = std::max(worst, std::abs(fd - expected));
      }
  }
  return {"logdet_derivative_identity", worst <= 1e-5,
          "max abs error " + fmt(worst) + " (tol 1e-5)"};
}

/// Small enumerable policy shared by the gradient checks.
PolicyParams tiny_policy(std::uint64_t seed, std::uint64_t salt) {
  const Vocab vocab({"a", "b", "c"});
  return init_policy(vocab, 1, 2, derive_seed(seed, "verify-policy", salt), 0.5);
}

double reward_of(const PolicyParams& params, const std::vector<Caption>& captions,
                 const Eigen::VectorXd& q, const Eigen::MatrixXd* signed_l) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(captions.size()));
  for (std::size_t i = 0; i < captions.size(); ++i)
    p(static_cast<Eigen::Index>(i)) = std::exp(log_prob_grad(params, 0, captions[i]).log_prob);
  if (signed_l == nullptr) return q.dot(p);
  return p.dot(*signed_l * p);
}

CheckResult check_reward_gradient(std::uint64_t seed, bool rdpp) {
  const double h = 1e-5;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    PolicyParams params = tiny_policy(seed, static_cast<std::uint64_t>(trial) * 2 + rdpp);
    auto rng = make_rng(seed, rdpp ? "verify-rdpp" : "verify-scst",
                        static_cast<std::uint64_t>(trial));
    const int m = 3;
    std::vector<Caption> captions;
    Eigen::VectorXd p(m);
    std::vector<GradRows> grads;
    for (int i = 0; i < m; ++i) {
      Rollout r = sample(params, 0, rng);
      p(i) = std::exp(r.log_prob);
      captions.push_back(std::move(r.caption));
      grads.push_back(std::move(r.grad_rows));
    }

    Eigen::VectorXd q(m);
    for (int i = 0; i < m; ++i) q(i) = 10.0 * uniform01(rng);
    Eigen::MatrixXd signed_l;
    RewardBundle bundle;
    if (rdpp) {
      const Eigen::MatrixXd l = random_psd(rng, m);
      const Eigen::MatrixXd signs = inverse_sign_matrix(l, 1e-6, 1e-12);
      signed_l = signs.cwiseProduct(l);
      bundle = rdpp_reward(l, signs, p);
    } else {
      bundle = scst_reward(q, p);
    }

    const int n = params.vocab.num_states();
    Eigen::MatrixXd analytic = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < m; ++i)
      analytic += bundle.weights[static_cast<std::size_t>(i)] *
                  dense_grad(grads[static_cast<std::size_t>(i)], n);

    Eigen::MatrixXd fd(n, n);
    const Eigen::MatrixXd* lptr = rdpp ? &signed_l : nullptr;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const double saved = params.logits[0](r, c);
        params.logits[0](r, c) = saved + h;
        const double up = reward_of(params, captions, q, lptr);
        params.logits[0](r, c) = saved - h;
        const double down = reward_of(params, captions, q, lptr);
        params.logits[0](r, c) = saved;
        fd(r, c) = (up - down) / (2.0 * h);
      }

    const double scale = std::max(1e-8, fd.cwiseAbs().maxCoeff());
    worst_rel = std::max(worst_rel, (analytic - fd).cwiseAbs().maxCoeff() / scale);
  }
  return {rdpp ? "rdpp_gradient_theorem" : "scst_gradient_theorem", worst_rel <= 1e-4,
          "max rel error " + fmt(worst_rel) + " (tol 1e-4)"};
}

CheckResult check_symmetry_factor(std::uint64_t seed) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto rng = make_rng(seed, "verify-sym", static_cast<std::uint64_t>(trial));
    const int m = 2 + static_cast<int>(uniform01(rng) * 5);
    const Eigen::MatrixXd l = random_psd(rng, m);
    const Eigen::MatrixXd signs = inverse_sign_matrix(l, 1e-6, 1e-12);
    Eigen::VectorXd p(m);
    for (int i = 0; i < m; ++i) p(i) = 0.05 + 0.9 * uniform01(rng);

    const RewardBundle bundle = rdpp_reward(l, signs, p);
    const Eigen::MatrixXd signed_l = signs.cwiseProduct(l);
    // Two-term form, before collapsing by symmetry: row plus column sums.
    const Eigen::VectorXd two_term =
        p.cwiseProduct(signed_l * p) + p.cwiseProduct(signed_l.transpose() * p);
    for (int i = 0; i < m; ++i)
      worst = std::max(worst,
                       std::abs(two_term(i) - bundle.weights[static_cast<std::size_t>(i)]));
  }
  return {"gradient_symmetry_factor", worst <= 1e-12,
          "max abs gap " + fmt(worst) + " (tol 1e-12)"};
}

CheckResult check_dpp_normalization(std::uint64_t seed) {
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    auto rng = make_rng(seed, "verify-dpp", static_cast<std::uint64_t>(trial));
    const int n = 2 + static_cast<int>(uniform01(rng) * 5);
    const Eigen::MatrixXd l = random_psd(rng, n);
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      SubsetIndex subset;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) subset.indices.push_back(i);
      total += std::exp(dpp_log_prob(l, subset));
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {"dpp_subset_normalization", worst <= 1e-8,
          "max |sum - 1| " + fmt(worst) + " (tol 1e-8)"};
}

CheckResult check_metric_fixed_points(std::uint64_t seed) {
  (void)seed;
  const std::vector<Caption> refs = {tokenize("a dog runs in the park"),
                                     tokenize("the cat sat on a mat"),
                                     tokenize("one bird flew over the river")};
  // One image per caption: a single-image corpus would have idf = log(1) = 0
  // everywhere and zero out every profile.
  const DocFreq df = build_doc_freq({{refs[0]}, {refs[1]}, {refs[2]}});

  std::ostringstream detail;
  bool ok = true;
  for (const Caption& c : refs) {
    const double self = cider(c, {c}, df);
    if (std::abs(self - 10.0) > 1e-9) {
      ok = false;
      detail << "self-match " << fmt(self) << " != 10; ";
    }
  }
  const std::vector<Caption> dup(4, refs[0]);
  const double d0 = self_cider_diversity(dup, df, 1);
  const std::vector<Caption> disjoint = {tokenize("a dog runs in the park"),
                                         tokenize("one cat sat by some mat"),
                                         tokenize("two birds flew over that hill")};
  const DocFreq df_disjoint =
      build_doc_freq({{disjoint[0]}, {disjoint[1]}, {disjoint[2]}});
  const double d1 = self_cider_diversity(disjoint, df_disjoint, 1);
  if (std::abs(d0) > 1e-9) {
    ok = false;
    detail << "duplicate diversity " << fmt(d0) << " != 0; ";
  }
  if (std::abs(d1 - 1.0) > 1e-9) {
    ok = false;
    detail << "disjoint diversity " << fmt(d1) << " != 1; ";
  }
  return {"metric_fixed_points", ok, ok ? "self-match 10, boundaries 0/1" : detail.str()};
}

CheckResult check_policy_normalization(std::uint64_t seed) {
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const PolicyParams params = tiny_policy(seed, 100 + static_cast<std::uint64_t>(trial));
    double total = 0.0;
    for (const auto& [caption, prob] : enumerate_all(params, 0)) total += prob;
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {"policy_normalization", worst <= 1e-9,
          "max |sum - 1| " + fmt(worst) + " (tol 1e-9)"};
}

CheckResult check_policy_gradient(std::uint64_t seed) {
  const double h = 1e-5;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    PolicyParams params = tiny_policy(seed, 200 + static_cast<std::uint64_t>(trial));
    auto rng = make_rng(seed, "verify-polgrad", static_cast<std::uint64_t>(trial));
    const Caption caption = sample(params, 0, rng).caption;

    const LogProbResult res = log_prob_grad(params, 0, caption);
    const int n = params.vocab.num_states();
    const Eigen::MatrixXd analytic = dense_grad(res.grad_rows, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const double saved = params.logits[0](r, c);
        params.logits[0](r, c) = saved + h;
        const double up = log_prob_grad(params, 0, caption).log_prob;
        params.logits[0](r, c) = saved - h;
        const double down = log_prob_grad(params, 0, caption).log_prob;
        params.logits[0](r, c) = saved;
        const double fd = (up - down) / (2.0 * h);
        const double rel = std::abs(analytic(r, c) - fd) / std::max(1.0, std::abs(fd));
        worst_rel = std::max(worst_rel, rel);
      }
  }
  return {"policy_gradient_fd", worst_rel <= 1e-6,
          "max rel error " + fmt(worst_rel) + " (tol 1e-6)"};
}

CheckResult check_beam_exactness(std::uint64_t seed) {
  for (int trial = 0; trial < 10; ++trial) {
    const PolicyParams params = tiny_policy(seed, 300 + static_cast<std::uint64_t>(trial));
    const auto all = enumerate_all(params, 0);
    const Caption best = beam_search(params, 0, 1000);
    if (!(best == all.front().first))
      return {"beam_enumeration_argmax", false,
              "beam '" + best.text() + "' != enumeration '" + all.front().first.text() + "'"};
  }
  return {"beam_enumeration_argmax", true, "10/10 draws matched"};
}

CheckResult check_checkpoint_roundtrip(std::uint64_t seed) {
  const PolicyParams params = tiny_policy(seed, 400);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string p1 = (dir / "rdpp_verify_ckpt_a.bin").string();
  const std::string p2 = (dir / "rdpp_verify_ckpt_b.bin").string();
  save_checkpoint(params, p1);
  save_checkpoint(load_checkpoint(p1), p2);

  std::ifstream a(p1, std::ios::binary), b(p2, std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  const bool same = sa.str() == sb.str() && !sa.str().empty();
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
  return {"checkpoint_roundtrip", same,
          same ? "save-load-save bytes identical" : "byte mismatch after round trip"};
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> results;
  results.push_back(check_logdet_identity(seed));
  results.push_back(check_reward_gradient(seed, false));
  results.push_back(check_reward_gradient(seed, true));
  results.push_back(check_symmetry_factor(seed));
  results.push_back(check_dpp_normalization(seed));
  results.push_back(check_metric_fixed_points(seed));
  results.push_back(check_policy_normalization(seed));
  results.push_back(check_policy_gradient(seed));
  results.push_back(check_beam_exactness(seed));
  results.push_back(check_checkpoint_roundtrip(seed));
  return results;
}

}  // namespace rdpp
