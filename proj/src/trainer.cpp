#include "rdpp/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <utility>

#include "rdpp/dpp.hpp"
#include "rdpp/errors.hpp"
#include "rdpp/metrics.hpp"
#include "rdpp/rng.hpp"

namespace rdpp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_train_inputs(const PolicyParams& params, const RefCorpus& corpus,
                        const TrainConfig& config) {
  if (params.num_contexts != static_cast<int>(corpus.size()))
    throw ShapeError("trainer: policy has " + std::to_string(params.num_contexts) +
                     " contexts but corpus has " + std::to_string(corpus.size()) +
                     " images");
  if (config.m < 1) throw ConfigError("trainer: m must be >= 1");
  if (config.learning_rate <= 0.0)
    throw ConfigError("trainer: learning_rate must be > 0");
}

Eigen::MatrixXd dense_grad(const GradRows& rows, int n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [row, vec] : rows) g.row(row) += vec;
  return g;
}

void accumulate_weighted(Eigen::MatrixXd& g, const GradRows& rows, double w) {
  for (const auto& [row, vec] : rows) g.row(row) += w * vec;
}

/// Mean CIDEr and mean per-image diversity of fresh rollouts, for XE rows.
std::pair<double, double> sampled_quality(const PolicyParams& params,
                                          const RefCorpus& corpus,
                                          const std::vector<std::size_t>& images,
                                          int num_samples, std::uint64_t seed,
                                          int epoch) {
  const DocFreq& df = corpus.doc_freq();
  double cider_sum = 0.0;
  double div_sum = 0.0;
  std::size_t cider_count = 0;
  for (std::size_t idx : images) {
    auto rng = make_rng(seed, "log", static_cast<std::uint64_t>(epoch),
                        static_cast<std::uint64_t>(idx));
    std::vector<Caption> samples;
    for (int s = 0; s < num_samples; ++s) {
      Rollout r = sample(params, static_cast<int>(idx), rng);
      cider_sum += cider(r.caption, corpus.images()[idx].refs, df);
      ++cider_count;
      samples.push_back(std::move(r.caption));
    }
    div_sum += self_cider_diversity(samples, df);
  }
  if (images.empty() || cider_count == 0) return {0.0, 0.0};
  return {cider_sum / static_cast<double>(cider_count),
          div_sum / static_cast<double>(images.size())};
}

}  // namespace

std::string TrainLog::to_csv() const {
  std::ostringstream out;
  out << "epoch,mode,m,mean_reward,mean_cider,self_cider,seconds\n";
  for (const EpochRecord& r : records) {
    char seconds[32];
    std::snprintf(seconds, sizeof(seconds), "%.3f", r.seconds);
    out << r.epoch << ',' << r.mode << ',' << r.m << ',' << format_double(r.mean_reward)
        << ',' << format_double(r.mean_cider) << ',' << format_double(r.self_cider)
        << ',' << seconds << '\n';
  }
  return out.str();
}

std::string strip_seconds_column(const std::string& csv) {
  std::ostringstream out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t cut = line.rfind(',');
    out << (cut == std::string::npos ? line : line.substr(0, cut)) << '\n';
  }
  return out.str();
}

TrainLog train_xe(PolicyParams& params, const RefCorpus& corpus,
                  const TrainConfig& config) {
  check_train_inputs(params, corpus, config);
  const std::vector<std::size_t> images = corpus.split_indices(Split::kTrain);
  const int n = params.vocab.num_states();
  const AdamConfig adam_cfg = config.adam();

  std::vector<AdamSlab> adam(static_cast<std::size_t>(params.num_contexts),
                             AdamSlab(n, n));
  TrainLog log;
  for (int epoch = 0; epoch < config.xe_epochs; ++epoch) {
    const auto start = Clock::now();
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t idx : images) {
      const int ctx = static_cast<int>(idx);
      for (const Caption& ref : corpus.images()[idx].refs) {
        XeResult step = xe_step(params, ctx, ref);
        adam[idx].apply(params.logits[idx], dense_grad(step.grad_rows, n), adam_cfg);
        loss_sum += step.loss;
        ++loss_count;
      }
    }
    const auto [mean_cider, diversity] = sampled_quality(
        params, corpus, images, config.log_samples, config.seed, epoch);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mode = "xe";
    rec.m = config.log_samples;
    rec.mean_reward = loss_count == 0 ? 0.0 : -loss_sum / static_cast<double>(loss_count);
    rec.mean_cider = mean_cider;
    rec.self_cider = diversity;
    rec.seconds = elapsed_seconds(start);
    log.records.push_back(std::move(rec));
  }
  return log;
}

TrainLog train_rl(PolicyParams& params, const RefCorpus& corpus,
                  const TrainConfig& config) {
  check_train_inputs(params, corpus, config);
  const std::vector<std::size_t> images = corpus.split_indices(Split::kTrain);
  const DocFreq& df = corpus.doc_freq();
  const int n = params.vocab.num_states();
  const AdamConfig adam_cfg = config.adam();
  const std::string mode_name = reward_mode_name(config.mode);

  std::vector<AdamSlab> adam(static_cast<std::size_t>(params.num_contexts),
                             AdamSlab(n, n));
  TrainLog log;
  for (int epoch = 0; epoch < config.rl_epochs; ++epoch) {
    const auto start = Clock::now();
    double reward_sum = 0.0;
    double cider_sum = 0.0;
    double div_sum = 0.0;
    double log_det_sum = 0.0;
    std::size_t cider_count = 0;
    std::size_t stepped = 0;

    for (std::size_t idx : images) {
      const int ctx = static_cast<int>(idx);
      const std::vector<Caption>& refs = corpus.images()[idx].refs;
      auto rng = make_rng(config.seed, "rl", static_cast<std::uint64_t>(epoch),
                          static_cast<std::uint64_t>(idx));

      SampledSet sampled;
      sampled.image_id = corpus.images()[idx].image_id;
      std::vector<GradRows> grads;
      for (int s = 0; s < config.m; ++s) {
        Rollout r = sample(params, ctx, rng);
        sampled.captions.push_back(std::move(r.caption));
        sampled.log_probs.push_back(r.log_prob);
        grads.push_back(std::move(r.grad_rows));
      }

      RewardBundle bundle;
      if (config.mode == RewardMode::kScst) {
        Eigen::VectorXd q(config.m), p(config.m);
        for (int s = 0; s < config.m; ++s) {
          q(s) = cider(sampled.captions[static_cast<std::size_t>(s)], refs, df);
          p(s) = std::exp(sampled.log_probs[static_cast<std::size_t>(s)]);
        }
        double baseline = 0.0;
        if (config.greedy_baseline)
          baseline = cider(beam_search(params, ctx, 1), refs, df);
        bundle = scst_reward(q, p, baseline);
        cider_sum += q.sum();
      } else {
        RdppAssembly assembly;
        try {
          assembly = assemble_rdpp(sampled, refs, df, config.eps, config.tol);
        } catch (const SingularityError& e) {
          std::cerr << "train_rl: skipping image " << sampled.image_id << " at epoch "
                    << epoch << ": " << e.what() << '\n';
          ++log.skipped_steps;
          continue;
        }
        bundle = assembly.bundle;
        cider_sum += assembly.q.sum();
        log_det_sum += log_det(assembly.L, config.eps);
      }

      // Ascent on R: Adam minimizes, so feed the negated gradient.
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
      for (int s = 0; s < config.m; ++s)
        accumulate_weighted(g, grads[static_cast<std::size_t>(s)],
                            -bundle.weights[static_cast<std::size_t>(s)]);
      adam[idx].apply(params.logits[idx], g, adam_cfg);

      reward_sum += bundle.reward;
      cider_count += static_cast<std::size_t>(config.m);
      div_sum += self_cider_diversity(sampled.captions, df);
      ++stepped;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mode = mode_name;
    rec.m = config.m;
    rec.mean_reward = stepped == 0 ? 0.0 : reward_sum / static_cast<double>(stepped);
    rec.mean_cider =
        cider_count == 0 ? 0.0 : cider_sum / static_cast<double>(cider_count);
    rec.self_cider = stepped == 0 ? 0.0 : div_sum / static_cast<double>(stepped);
    rec.seconds = elapsed_seconds(start);
    log.records.push_back(std::move(rec));
    if (config.mode == RewardMode::kRdpp)
      log.mean_log_det.push_back(
          stepped == 0 ? 0.0 : log_det_sum / static_cast<double>(stepped));
  }
  return log;
}

}  // namespace rdpp
