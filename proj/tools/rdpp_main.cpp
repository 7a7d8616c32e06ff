// Command-line surface: corpus generation, two-phase training, the three
// evaluation protocols, and the self-check suite.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdpp/config.hpp"
#include "rdpp/corpus.hpp"
#include "rdpp/errors.hpp"
#include "rdpp/eval.hpp"
#include "rdpp/manifest.hpp"
#include "rdpp/policy.hpp"
#include "rdpp/trainer.hpp"
#include "rdpp/verify.hpp"

namespace {

using rdpp::Config;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw rdpp::FormatError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw rdpp::FormatError("write to '" + path + "' failed");
}

std::string json_sibling(const std::string& csv_path) {
  if (csv_path.size() >= 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
    return csv_path.substr(0, csv_path.size() - 4) + ".json";
  return csv_path + ".json";
}

int longest_reference(const rdpp::RefCorpus& corpus) {
  std::size_t longest = 1;
  for (const rdpp::ImageEntry& image : corpus.images())
    for (const rdpp::Caption& ref : image.refs) longest = std::max(longest, ref.length());
  return static_cast<int>(longest);
}

rdpp::TrainConfig train_config_from(const Config& cfg) {
  rdpp::TrainConfig tc;
  tc.xe_epochs = cfg.get_int("xe_epochs", tc.xe_epochs);
  tc.rl_epochs = cfg.get_int("rl_epochs", tc.rl_epochs);
  tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
  tc.m = cfg.get_int("m", tc.m);
  tc.mode = rdpp::parse_reward_mode(cfg.get_string("mode", "scst"));
  tc.eps = cfg.get_double("eps", tc.eps);
  tc.tol = cfg.get_double("tol", tc.tol);
  tc.seed = cfg.get_u64("seed", tc.seed);
  tc.beta1 = cfg.get_double("beta1", tc.beta1);
  tc.beta2 = cfg.get_double("beta2", tc.beta2);
  tc.adam_epsilon = cfg.get_double("adam_epsilon", tc.adam_epsilon);
  tc.greedy_baseline = cfg.get_bool("greedy_baseline", tc.greedy_baseline);
  tc.log_samples = cfg.get_int("log_samples", tc.log_samples);
  return tc;
}

rdpp::EvalOptions eval_options_from(const Config& cfg) {
  rdpp::EvalOptions opt;
  opt.split = rdpp::parse_split(cfg.get_string("split", "train"));
  opt.threads = cfg.get_int("threads", 1);
  return opt;
}

rdpp::Manifest make_manifest(const std::string& command, const Config& cfg,
                             std::uint64_t seed, std::uint64_t corpus_hash,
                             std::vector<std::string> outputs) {
  rdpp::Manifest m;
  m.command = command;
  m.config = cfg.entries();
  m.seed = seed;
  m.corpus_hash = corpus_hash;
  m.outputs = std::move(outputs);
  return m;
}

int cmd_gen_data(const Config& cfg, const std::string& out_path) {
  rdpp::SynthSpec spec;
  spec.num_images = cfg.get_int("images", spec.num_images);
  spec.vocab_size = cfg.get_int("vocab_size", spec.vocab_size);
  spec.refs_per_image = cfg.get_int("refs_per_image", spec.refs_per_image);
  spec.templates_per_image = cfg.get_int("templates_per_image", spec.templates_per_image);
  spec.min_tokens = cfg.get_int("min_tokens", spec.min_tokens);
  spec.max_tokens = cfg.get_int("max_tokens", spec.max_tokens);
  spec.seed = cfg.get_u64("seed", spec.seed);

  const rdpp::RefCorpus corpus = rdpp::generate_synthetic(spec);
  rdpp::save_corpus(corpus, out_path);
  rdpp::write_manifest(make_manifest("gen-data", cfg, spec.seed, corpus_hash(corpus),
                                     {out_path}),
                       out_path + ".manifest.json");
  std::cout << "wrote " << corpus.size() << " images to " << out_path << '\n';
  return kExitOk;
}

int cmd_train_xe(const Config& cfg, const std::string& corpus_path,
                 const std::string& out_path) {
  const rdpp::RefCorpus corpus = rdpp::load_corpus(corpus_path);
  rdpp::TrainConfig tc = train_config_from(cfg);

  const int max_len = cfg.get_int("max_len", longest_reference(corpus));
  rdpp::PolicyParams params = rdpp::init_policy(
      rdpp::Vocab(rdpp::corpus_vocabulary(corpus)), static_cast<int>(corpus.size()),
      max_len, tc.seed, cfg.get_double("init_scale", 0.1));

  const rdpp::TrainLog log = rdpp::train_xe(params, corpus, tc);
  rdpp::save_checkpoint(params, out_path);
  const std::string log_path = cfg.get_string("log", out_path + ".log.csv");
  write_text(log_path, log.to_csv());
  rdpp::write_manifest(make_manifest("train-xe", cfg, tc.seed, corpus_hash(corpus),
                                     {out_path, log_path}),
                       out_path + ".manifest.json");
  if (!log.records.empty())
    std::cout << "xe done: mean log-likelihood " << log.records.back().mean_reward
              << ", sampled cider " << log.records.back().mean_cider << '\n';
  return kExitOk;
}

int cmd_train_rl(const Config& cfg, const std::string& corpus_path,
                 const std::string& ckpt_path, const std::string& out_path) {
  const rdpp::RefCorpus corpus = rdpp::load_corpus(corpus_path);
  rdpp::PolicyParams params = rdpp::load_checkpoint(ckpt_path);
  const rdpp::TrainConfig tc = train_config_from(cfg);

  const rdpp::TrainLog log = rdpp::train_rl(params, corpus, tc);
  rdpp::save_checkpoint(params, out_path);
  const std::string log_path = cfg.get_string("log", out_path + ".log.csv");
  write_text(log_path, log.to_csv());
  rdpp::write_manifest(make_manifest("train-rl", cfg, tc.seed, corpus_hash(corpus),
                                     {out_path, log_path}),
                       out_path + ".manifest.json");
  if (!log.records.empty())
    std::cout << reward_mode_name(tc.mode) << " done: mean reward "
              << log.records.back().mean_reward << ", sampled cider "
              << log.records.back().mean_cider << ", diversity "
              << log.records.back().self_cider << '\n';
  return kExitOk;
}

int write_report(const rdpp::EvalReport& report, const std::string& command,
                 const Config& cfg, std::uint64_t seed, std::uint64_t hash,
                 const std::string& out_path) {
  const std::string json_path = json_sibling(out_path);
  write_text(out_path, report.to_csv());
  write_text(json_path, report.to_json());
  rdpp::write_manifest(make_manifest(command, cfg, seed, hash, {out_path, json_path}),
                       out_path + ".manifest.json");
  std::cout << command << " aggregate:";
  for (std::size_t k = 0; k < report.metric_names.size(); ++k)
    std::cout << ' ' << report.metric_names[k] << '=' << report.aggregate[k];
  std::cout << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& command, const Config& cfg,
             const std::string& corpus_path, const std::string& ckpt_path,
             const std::string& out_path) {
  const rdpp::RefCorpus corpus = rdpp::load_corpus(corpus_path);
  const rdpp::EvalOptions options = eval_options_from(cfg);
  const std::uint64_t seed = cfg.get_u64("seed", 0);

  rdpp::EvalReport report;
  if (command == "eval-human") {
    report = rdpp::eval_human_loo(corpus, options);
  } else {
    const rdpp::PolicyParams params = rdpp::load_checkpoint(ckpt_path);
    if (command == "eval-sample")
      report = rdpp::eval_random_sampling(params, corpus, cfg.get_int("samples", 10),
                                          seed, options);
    else if (command == "eval-beam")
      report = rdpp::eval_beam(params, corpus, cfg.get_int("beam_width", 3), options);
    else
      report = rdpp::eval_oracle(params, corpus, cfg.get_int("samples", 20), seed,
                                 options);
  }
  return write_report(report, command, cfg, seed, corpus_hash(corpus), out_path);
}

int cmd_verify(std::uint64_t seed) {
  const std::vector<rdpp::CheckResult> results = rdpp::run_verification(seed);
  int failures = 0;
  for (const rdpp::CheckResult& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
    if (!r.passed) ++failures;
  }
  std::cout << (failures == 0 ? "verification passed (" : "verification FAILED (")
            << results.size() - static_cast<std::size_t>(failures) << '/'
            << results.size() << " checks)\n";
  return failures == 0 ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DPP-structured sequence-generation RL toolkit"};
  app.require_subcommand(1);

  std::string config_path, corpus_path, ckpt_path, out_path, mode = "scst", split;
  std::uint64_t seed = 0;
  int m = 0, beam = 0, samples = 0, epochs = 0, threads = 0;
  double lr = 0.0;

  auto add_common = [&](CLI::App* sub, bool needs_corpus, bool needs_ckpt) {
    sub->add_option("--config", config_path, "key=value settings file");
    sub->add_option("--seed", seed, "root RNG seed");
    sub->add_option("--out", out_path, "output path");
    if (needs_corpus) sub->add_option("--corpus", corpus_path, "corpus jsonl path");
    if (needs_ckpt) sub->add_option("--checkpoint", ckpt_path, "input checkpoint path");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  add_common(gen, false, false);

  CLI::App* xe = app.add_subcommand("train-xe", "cross-entropy pretraining");
  add_common(xe, true, false);
  xe->add_option("--epochs", epochs, "xe epochs");
  xe->add_option("--lr", lr, "learning rate");

  CLI::App* rl = app.add_subcommand("train-rl", "RL refinement (scst or rdpp)");
  add_common(rl, true, true);
  rl->add_option("--epochs", epochs, "rl epochs");
  rl->add_option("--lr", lr, "learning rate");
  rl->add_option("--mode", mode, "scst|rdpp");
  rl->add_option("--m", m, "samples per image per step");

  CLI::App* ev_sample = app.add_subcommand("eval-sample", "random-sampling protocol");
  add_common(ev_sample, true, true);
  ev_sample->add_option("--samples", samples, "rollouts per image");
  ev_sample->add_option("--split", split, "train|val|test|all");
  ev_sample->add_option("--threads", threads, "worker threads (0 = all)");

  CLI::App* ev_beam = app.add_subcommand("eval-beam", "beam-search protocol");
  add_common(ev_beam, true, true);
  ev_beam->add_option("--beam", beam, "beam width");
  ev_beam->add_option("--split", split, "train|val|test|all");
  ev_beam->add_option("--threads", threads, "worker threads (0 = all)");

  CLI::App* ev_oracle = app.add_subcommand("eval-oracle", "per-metric oracle protocol");
  add_common(ev_oracle, true, true);
  ev_oracle->add_option("--samples", samples, "rollouts per image");
  ev_oracle->add_option("--split", split, "train|val|test|all");
  ev_oracle->add_option("--threads", threads, "worker threads (0 = all)");

  CLI::App* ev_human = app.add_subcommand("eval-human", "leave-one-out reference score");
  add_common(ev_human, true, false);
  ev_human->add_option("--split", split, "train|val|test|all");
  ev_human->add_option("--threads", threads, "worker threads (0 = all)");

  CLI::App* verify = app.add_subcommand("verify", "run the property self-checks");
  verify->add_option("--seed", seed, "root RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << '\n';
    return kExitConfig;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    if (name == "verify") return cmd_verify(seed);

    auto flag_set = [&](const std::string& flag) {
      const CLI::Option* opt = sub->get_option_no_throw(flag);
      return opt != nullptr && opt->count() > 0;
    };

    Config cfg;
    if (!config_path.empty()) cfg = Config::from_file(config_path);
    if (flag_set("--seed")) cfg.set("seed", std::to_string(seed));
    if (flag_set("--epochs"))
      cfg.set(name == "train-xe" ? "xe_epochs" : "rl_epochs", std::to_string(epochs));
    if (flag_set("--lr")) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", lr);
      cfg.set("learning_rate", buf);
    }
    if (flag_set("--mode")) cfg.set("mode", mode);
    if (flag_set("--m")) cfg.set("m", std::to_string(m));
    if (flag_set("--beam")) cfg.set("beam_width", std::to_string(beam));
    if (flag_set("--samples")) cfg.set("samples", std::to_string(samples));
    if (flag_set("--split")) cfg.set("split", split);
    if (flag_set("--threads")) cfg.set("threads", std::to_string(threads));

    if (name == "gen-data")
      return cmd_gen_data(cfg, out_path.empty() ? "corpus.jsonl" : out_path);

    if (corpus_path.empty())
      throw rdpp::ConfigError(name + ": --corpus is required");

    if (name == "train-xe")
      return cmd_train_xe(cfg, corpus_path, out_path.empty() ? "xe.ckpt" : out_path);

    if (name == "train-rl") {
      if (ckpt_path.empty())
        throw rdpp::ConfigError("train-rl: --checkpoint is required");
      return cmd_train_rl(cfg, corpus_path, ckpt_path,
                          out_path.empty() ? "rl.ckpt" : out_path);
    }

    if (name != "eval-human" && ckpt_path.empty())
      throw rdpp::ConfigError(name + ": --checkpoint is required");
    return cmd_eval(name, cfg, corpus_path, ckpt_path,
                    out_path.empty() ? name + ".csv" : out_path);
  } catch (const rdpp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rdpp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
