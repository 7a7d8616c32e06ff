#include "rdpp/eval.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "rdpp/errors.hpp"
#include "rdpp/metrics.hpp"
#include "rdpp/parallel.hpp"
#include "rdpp/rng.hpp"

namespace rdpp {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_policy_matches(const PolicyParams& params, const RefCorpus& corpus) {
  if (params.num_contexts != static_cast<int>(corpus.size()))
    throw ShapeError("eval: policy has " + std::to_string(params.num_contexts) +
                     " contexts but corpus has " + std::to_string(corpus.size()) +
                     " images");
}

void finalize(EvalReport& report) {
  report.aggregate.assign(report.metric_names.size(), 0.0);
  if (report.rows.empty()) return;
  for (const std::vector<double>& row : report.rows)
    for (std::size_t k = 0; k < row.size(); ++k) report.aggregate[k] += row[k];
  for (double& v : report.aggregate) v /= static_cast<double>(report.rows.size());
}

}  // namespace

std::string protocol_name(EvalProtocol protocol) {
  switch (protocol) {
    case EvalProtocol::kRandomSampling: return "random_sampling";
    case EvalProtocol::kBeam: return "beam";
    case EvalProtocol::kOracle: return "oracle";
    case EvalProtocol::kHumanLoo: return "human_loo";
  }
  throw ConfigError("protocol_name: unknown protocol value");
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "# format_version=1\n# protocol=" << protocol_name(protocol) << '\n';
  for (const auto& [key, value] : params) out << "# " << key << '=' << value << '\n';
  out << "image_id";
  for (const std::string& name : metric_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << image_ids[i];
    for (double v : rows[i]) out << ',' << format_double(v);
    out << '\n';
  }
  out << "AGG";
  for (double v : aggregate) out << ',' << format_double(v);
  out << '\n';
  return out.str();
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["protocol"] = protocol_name(protocol);
  j["params"] = params;
  j["metrics"] = metric_names;
  nlohmann::json out_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    nlohmann::json row;
    row["image_id"] = image_ids[i];
    row["values"] = rows[i];
    out_rows.push_back(std::move(row));
  }
  j["rows"] = std::move(out_rows);
  j["aggregate"] = aggregate;
  return j.dump(2) + "\n";
}

EvalReport eval_random_sampling(const PolicyParams& params, const RefCorpus& corpus,
                                int num_samples, std::uint64_t seed,
                                const EvalOptions& options) {
  check_policy_matches(params, corpus);
  if (num_samples < 2)
    throw ConfigError("eval-sample: num_samples must be >= 2");

  const std::vector<std::size_t> images = corpus.split_indices(options.split);
  const DocFreq& df = corpus.doc_freq();

  EvalReport report;
  report.protocol = EvalProtocol::kRandomSampling;
  report.metric_names = {"cider", "self_cider"};
  report.params["num_samples"] = std::to_string(num_samples);
  report.params["seed"] = std::to_string(seed);
  report.params["split"] = split_name(options.split);
  report.image_ids.resize(images.size());
  report.rows.resize(images.size());

  par::for_index(static_cast<std::int64_t>(images.size()), options.threads,
                 [&](std::int64_t k) {
                   const std::size_t idx = images[static_cast<std::size_t>(k)];
                   const ImageEntry& image = corpus.images()[idx];
                   auto rng = make_rng(seed, "sample", static_cast<std::uint64_t>(idx));
                   CiderScorer scorer(image.refs, df);
                   std::vector<Caption> samples;
                   double cider_sum = 0.0;
                   for (int s = 0; s < num_samples; ++s) {
                     Rollout r = sample(params, static_cast<int>(idx), rng);
                     cider_sum += scorer.score(r.caption);
                     samples.push_back(std::move(r.caption));
                   }
                   report.image_ids[static_cast<std::size_t>(k)] = image.image_id;
                   report.rows[static_cast<std::size_t>(k)] = {
                       cider_sum / num_samples, self_cider_diversity(samples, df, 1)};
                 });
  finalize(report);
  return report;
}

EvalReport eval_beam(const PolicyParams& params, const RefCorpus& corpus,
                     int beam_width, const EvalOptions& options) {
  check_policy_matches(params, corpus);
  if (beam_width < 1) throw ConfigError("eval-beam: beam width must be >= 1");

  const std::vector<std::size_t> images = corpus.split_indices(options.split);
  const DocFreq& df = corpus.doc_freq();

  EvalReport report;
  report.protocol = EvalProtocol::kBeam;
  report.metric_names = {"bleu4", "rouge_l", "cider"};
  report.params["beam_width"] = std::to_string(beam_width);
  report.params["split"] = split_name(options.split);
  report.image_ids.resize(images.size());
  report.rows.resize(images.size());

  par::for_index(static_cast<std::int64_t>(images.size()), options.threads,
                 [&](std::int64_t k) {
                   const std::size_t idx = images[static_cast<std::size_t>(k)];
                   const ImageEntry& image = corpus.images()[idx];
                   const Caption best = beam_search(params, static_cast<int>(idx), beam_width);
                   report.image_ids[static_cast<std::size_t>(k)] = image.image_id;
                   report.rows[static_cast<std::size_t>(k)] = {
                       bleu_n(best, image.refs, 4), rouge_l(best, image.refs),
                       cider(best, image.refs, df)};
                 });
  finalize(report);
  return report;
}

EvalReport eval_oracle(const PolicyParams& params, const RefCorpus& corpus,
                       int num_samples, std::uint64_t seed,
                       const EvalOptions& options) {
  check_policy_matches(params, corpus);
  if (num_samples < 1) throw ConfigError("eval-oracle: num_samples must be >= 1");

  const std::vector<std::size_t> images = corpus.split_indices(options.split);
  const DocFreq& df = corpus.doc_freq();

  EvalReport report;
  report.protocol = EvalProtocol::kOracle;
  report.metric_names = {"bleu4", "rouge_l", "cider"};
  report.params["num_samples"] = std::to_string(num_samples);
  report.params["seed"] = std::to_string(seed);
  report.params["split"] = split_name(options.split);
  report.image_ids.resize(images.size());
  report.rows.resize(images.size());

  par::for_index(static_cast<std::int64_t>(images.size()), options.threads,
                 [&](std::int64_t k) {
                   const std::size_t idx = images[static_cast<std::size_t>(k)];
                   const ImageEntry& image = corpus.images()[idx];
                   auto rng = make_rng(seed, "sample", static_cast<std::uint64_t>(idx));
                   CiderScorer scorer(image.refs, df);
                   double best_bleu = 0.0, best_rouge = 0.0, best_cider = 0.0;
                   for (int s = 0; s < num_samples; ++s) {
                     const Rollout r = sample(params, static_cast<int>(idx), rng);
                     best_bleu = std::max(best_bleu, bleu_n(r.caption, image.refs, 4));
                     best_rouge = std::max(best_rouge, rouge_l(r.caption, image.refs));
                     best_cider = std::max(best_cider, scorer.score(r.caption));
                   }
                   report.image_ids[static_cast<std::size_t>(k)] = image.image_id;
                   report.rows[static_cast<std::size_t>(k)] = {best_bleu, best_rouge,
                                                               best_cider};
                 });
  finalize(report);
  return report;
}

EvalReport eval_human_loo(const RefCorpus& corpus, const EvalOptions& options) {
  const std::vector<std::size_t> all = corpus.split_indices(options.split);
  std::vector<std::size_t> images;
  int skipped = 0;
  for (std::size_t idx : all) {
    if (corpus.images()[idx].refs.size() >= 2) {
      images.push_back(idx);
    } else {
      std::cerr << "eval-human: skipping image '" << corpus.images()[idx].image_id
                << "' with a single reference\n";
      ++skipped;
    }
  }
  const DocFreq& df = corpus.doc_freq();

  EvalReport report;
  report.protocol = EvalProtocol::kHumanLoo;
  report.metric_names = {"cider", "self_cider"};
  report.params["split"] = split_name(options.split);
  report.params["skipped"] = std::to_string(skipped);
  report.image_ids.resize(images.size());
  report.rows.resize(images.size());

  par::for_index(static_cast<std::int64_t>(images.size()), options.threads,
                 [&](std::int64_t k) {
                   const std::size_t idx = images[static_cast<std::size_t>(k)];
                   const std::vector<Caption>& refs = corpus.images()[idx].refs;
                   double cider_sum = 0.0;
                   for (std::size_t r = 0; r < refs.size(); ++r) {
                     std::vector<Caption> rest;
                     for (std::size_t o = 0; o < refs.size(); ++o)
                       if (o != r) rest.push_back(refs[o]);
                     cider_sum += cider(refs[r], rest, df);
                   }
                   report.image_ids[static_cast<std::size_t>(k)] =
                       corpus.images()[idx].image_id;
                   report.rows[static_cast<std::size_t>(k)] = {
                       cider_sum / static_cast<double>(refs.size()),
                       self_cider_diversity(refs, df, 1)};
                 });
  finalize(report);
  return report;
}

}  // namespace rdpp
