#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "rdpp/corpus.hpp"
#include "rdpp/errors.hpp"
#include "rdpp/eval.hpp"
#include "rdpp/metrics.hpp"
#include "rdpp/policy.hpp"
#include "rdpp/rng.hpp"

using rdpp::Caption;
using rdpp::EvalOptions;
using rdpp::EvalReport;
using rdpp::ImageEntry;
using rdpp::PolicyParams;
using rdpp::RefCorpus;
using rdpp::Split;
using rdpp::SynthSpec;
using rdpp::Vocab;
using rdpp::eval_beam;
using rdpp::eval_human_loo;
using rdpp::eval_oracle;
using rdpp::eval_random_sampling;
using rdpp::init_policy;

namespace {

RefCorpus small_corpus(std::uint64_t seed = 14) {
  SynthSpec spec;
  spec.num_images = 30;
  spec.vocab_size = 16;
  spec.refs_per_image = 3;
  spec.seed = seed;
  return rdpp::generate_synthetic(spec);
}

PolicyParams random_policy(const RefCorpus& corpus, std::uint64_t seed,
                           double scale = 0.5) {
  std::size_t max_len = 0;
  for (const auto& img : corpus.images())
    for (const auto& ref : img.refs) max_len = std::max(max_len, ref.length());
  return init_policy(Vocab(rdpp::corpus_vocabulary(corpus)),
                     static_cast<int>(corpus.size()), static_cast<int>(max_len),
                     seed, scale);
}

}  // namespace

TEST_CASE("aggregate row is the column mean") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 1);
  EvalOptions opt;
  opt.split = Split::kAll;
  const EvalReport report = eval_random_sampling(p, corpus, 5, 42, opt);

  REQUIRE(report.rows.size() == corpus.size());
  REQUIRE(report.aggregate.size() == report.metric_names.size());
  for (std::size_t m = 0; m < report.metric_names.size(); ++m) {
    double mean = 0.0;
    for (const auto& row : report.rows) mean += row[m];
    mean /= static_cast<double>(report.rows.size());
    CHECK(report.aggregate[m] == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("sampling report is deterministic and thread-count invariant") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 2);
  EvalOptions serial;
  serial.split = Split::kAll;
  serial.threads = 1;
  EvalOptions wide = serial;
  wide.threads = 4;

  const std::string a = eval_random_sampling(p, corpus, 6, 7, serial).to_csv();
  const std::string b = eval_random_sampling(p, corpus, 6, 7, serial).to_csv();
  const std::string c = eval_random_sampling(p, corpus, 6, 7, wide).to_csv();
  CHECK(a == b);
  CHECK(a == c);

  const std::string ja = eval_oracle(p, corpus, 6, 7, serial).to_json();
  const std::string jc = eval_oracle(p, corpus, 6, 7, wide).to_json();
  CHECK(ja == jc);
}

TEST_CASE("eval respects the split option") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 3);
  EvalOptions opt;
  opt.split = Split::kVal;
  const EvalReport report = eval_random_sampling(p, corpus, 4, 1, opt);
  CHECK(report.rows.size() == corpus.split_indices(Split::kVal).size());
  CHECK(report.params.at("split") == "val");
}

TEST_CASE("a collapsed policy has near-zero sample diversity") {
  const RefCorpus corpus = small_corpus();
  PolicyParams p = random_policy(corpus, 4, 0.0);
  // Saturate every context toward one fixed caption.
  for (int c = 0; c < p.num_contexts; ++c) {
    Eigen::MatrixXd& l = p.logits[c];
    l.setZero();
    l(p.vocab.bos_state(), 0) = 20.0;
    l(0, 1) = 20.0;
    l(1, 2) = 20.0;
    l(2, p.vocab.eos_action()) = 20.0;
  }
  EvalOptions opt;
  opt.split = Split::kAll;
  const EvalReport report = eval_random_sampling(p, corpus, 8, 5, opt);
  const std::size_t div = 1;  // self_cider column
  CHECK(report.aggregate[div] < 0.05);
}

TEST_CASE("a broad random policy keeps sample diversity high") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 5, 0.1);
  EvalOptions opt;
  opt.split = Split::kAll;
  const EvalReport report = eval_random_sampling(p, corpus, 8, 6, opt);
  CHECK(report.aggregate[1] > 0.7);
}

TEST_CASE("oracle maxima are per metric, not per sample") {
  // Context 0 emits exactly two captions with equal mass:
  //   A = "runs in a park"  (high BLEU/ROUGE: contiguous chunk of the ref)
  //   B = "the zebra"       (high CIDEr: the only rare tokens in the corpus)
  // Every function word of A appears in all five images, so its IDF weights
  // vanish and CIDEr(A) = 0, while BLEU(B) = 0 because the reference has
  // 3- and 4-grams the two-token B cannot match.
  std::vector<ImageEntry> images;
  images.push_back({"img0", {rdpp::tokenize("the zebra runs in a park")}});
  images.push_back({"img1", {rdpp::tokenize("a dog runs in a park")}});
  images.push_back({"img2", {rdpp::tokenize("a cat runs in a park")}});
  images.push_back({"img3", {rdpp::tokenize("a bird runs in a park")}});
  images.push_back({"img4", {rdpp::tokenize("a fox runs in a park")}});
  const RefCorpus corpus(std::move(images));

  PolicyParams p = random_policy(corpus, 0, 0.0);
  Eigen::MatrixXd& l = p.logits[0];
  l.setConstant(-15.0);
  const Vocab& v = p.vocab;
  l(v.bos_state(), v.id("runs")) = 5.0;
  l(v.bos_state(), v.id("the")) = 5.0;
  l(v.id("runs"), v.id("in")) = 15.0;
  l(v.id("in"), v.id("a")) = 15.0;
  l(v.id("a"), v.id("park")) = 15.0;
  l(v.id("park"), v.eos_action()) = 15.0;
  l(v.id("the"), v.id("zebra")) = 15.0;
  l(v.id("zebra"), v.eos_action()) = 15.0;

  const Caption a = rdpp::tokenize("runs in a park");
  const Caption b = rdpp::tokenize("the zebra");
  const int num_samples = 10;
  const std::uint64_t seed = 3;

  // Replicate the per-image sample stream and make sure both captions occur.
  {
    auto rng = rdpp::make_rng(seed, "sample", 0);
    std::set<std::string> seen;
    for (int s = 0; s < num_samples; ++s)
      seen.insert(rdpp::sample(p, 0, rng).caption.text());
    REQUIRE(seen == std::set<std::string>{a.text(), b.text()});
  }

  const auto& refs = corpus.images()[0].refs;
  const rdpp::DocFreq& df = corpus.doc_freq();
  CHECK(rdpp::cider(a, refs, df) == 0.0);
  CHECK(rdpp::cider(b, refs, df) > 4.0);
  CHECK(rdpp::bleu_n(b, refs, 4) == 0.0);
  CHECK(rdpp::bleu_n(a, refs, 4) ==
        doctest::Approx(std::exp(1.0 - 6.0 / 4.0)).epsilon(1e-12));

  EvalOptions opt;
  opt.split = Split::kAll;
  const EvalReport report = eval_oracle(p, corpus, num_samples, seed, opt);
  REQUIRE(report.image_ids[0] == "img0");
  const auto& row = report.rows[0];
  // bleu4 and rouge_l peak at A, cider peaks at B.
  CHECK(row[0] == rdpp::bleu_n(a, refs, 4));
  CHECK(row[1] == rdpp::rouge_l(a, refs));
  CHECK(row[2] == rdpp::cider(b, refs, df));
  CHECK(row[2] > rdpp::cider(a, refs, df));
}

TEST_CASE("oracle values never decrease as the sample budget grows") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 6);
  EvalOptions opt;
  opt.split = Split::kAll;
  const EvalReport ten = eval_oracle(p, corpus, 10, 9, opt);
  const EvalReport twenty = eval_oracle(p, corpus, 20, 9, opt);
  REQUIRE(ten.rows.size() == twenty.rows.size());
  for (std::size_t i = 0; i < ten.rows.size(); ++i)
    for (std::size_t m = 0; m < ten.rows[i].size(); ++m)
      CHECK(twenty.rows[i][m] >= ten.rows[i][m]);
}

TEST_CASE("single-sample oracle equals the metrics of the first draw") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 8);
  EvalOptions opt;
  opt.split = Split::kAll;
  const EvalReport one = eval_oracle(p, corpus, 1, 13, opt);

  const rdpp::DocFreq& df = corpus.doc_freq();
  for (std::size_t idx = 0; idx < 5; ++idx) {
    auto rng = rdpp::make_rng(13, "sample", idx);
    const Caption first = rdpp::sample(p, static_cast<int>(idx), rng).caption;
    const auto& refs = corpus.images()[idx].refs;
    CHECK(one.rows[idx][0] == rdpp::bleu_n(first, refs, 4));
    CHECK(one.rows[idx][1] == rdpp::rouge_l(first, refs));
    CHECK(one.rows[idx][2] == rdpp::cider(first, refs, df));
  }
}

TEST_CASE("beam report scores the beam caption") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 10);
  EvalOptions opt;
  opt.split = Split::kTest;
  const EvalReport report = eval_beam(p, corpus, 3, opt);
  CHECK(report.params.at("beam_width") == "3");

  const rdpp::DocFreq& df = corpus.doc_freq();
  const auto test_indices = corpus.split_indices(Split::kTest);
  REQUIRE(report.rows.size() == test_indices.size());
  for (std::size_t k = 0; k < test_indices.size(); ++k) {
    const std::size_t idx = test_indices[k];
    const Caption best = rdpp::beam_search(p, static_cast<int>(idx), 3);
    const auto& refs = corpus.images()[idx].refs;
    CHECK(report.rows[k][0] == rdpp::bleu_n(best, refs, 4));
    CHECK(report.rows[k][1] == rdpp::rouge_l(best, refs));
    CHECK(report.rows[k][2] == rdpp::cider(best, refs, df));
  }
}

TEST_CASE("human leave-one-out worked examples") {
  // Two identical references: each held-out ref matches the other exactly.
  std::vector<ImageEntry> same;
  same.push_back({"img0", {rdpp::tokenize("a dog runs fast today"),
                           rdpp::tokenize("a dog runs fast today")}});
  same.push_back({"img1", {rdpp::tokenize("a cat sits on a mat"),
                           rdpp::tokenize("a cat sits on a mat")}});
  const RefCorpus identical(std::move(same));
  EvalOptions opt;
  opt.split = Split::kAll;
  EvalReport report = eval_human_loo(identical, opt);
  CHECK(report.aggregate[0] == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(report.aggregate[1] == doctest::Approx(0.0).epsilon(1e-12));

  // Token-disjoint references: zero accuracy, full diversity.
  std::vector<ImageEntry> disjoint;
  disjoint.push_back({"img0", {rdpp::tokenize("a b c d"),
                               rdpp::tokenize("e f g h"),
                               rdpp::tokenize("i j k l")}});
  disjoint.push_back({"img1", {rdpp::tokenize("m n o p"),
                               rdpp::tokenize("q r s t")}});
  const RefCorpus apart(std::move(disjoint));
  report = eval_human_loo(apart, opt);
  CHECK(report.aggregate[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.aggregate[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("human leave-one-out matches a hand-assembled mean") {
  std::vector<ImageEntry> images;
  images.push_back({"img0", {rdpp::tokenize("a dog runs in the park"),
                             rdpp::tokenize("the dog is running outside"),
                             rdpp::tokenize("a brown dog runs around")}});
  images.push_back({"img1", {rdpp::tokenize("two cats sleep on a couch"),
                             rdpp::tokenize("cats are sleeping together")}});
  const RefCorpus corpus(std::move(images));
  const rdpp::DocFreq& df = corpus.doc_freq();

  EvalOptions opt;
  opt.split = Split::kAll;
  const EvalReport report = eval_human_loo(corpus, opt);

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& refs = corpus.images()[i].refs;
    double loo = 0.0;
    for (std::size_t r = 0; r < refs.size(); ++r) {
      std::vector<Caption> rest;
      for (std::size_t o = 0; o < refs.size(); ++o)
        if (o != r) rest.push_back(refs[o]);
      loo += rdpp::cider(refs[r], rest, df);
    }
    loo /= static_cast<double>(refs.size());
    CHECK(report.rows[i][0] == doctest::Approx(loo).epsilon(1e-12));
    CHECK(report.rows[i][1] ==
          doctest::Approx(rdpp::self_cider_diversity(refs, df)).epsilon(1e-12));
  }
}

TEST_CASE("human leave-one-out skips single-reference images with a count") {
  std::vector<ImageEntry> images;
  images.push_back({"img0", {rdpp::tokenize("a dog runs fast")}});
  images.push_back({"img1", {rdpp::tokenize("a cat sits still"),
                             rdpp::tokenize("the cat is sitting")}});
  const RefCorpus corpus(std::move(images));
  EvalOptions opt;
  opt.split = Split::kAll;
  const EvalReport report = eval_human_loo(corpus, opt);
  CHECK(report.rows.size() == 1);
  CHECK(report.image_ids[0] == "img1");
  CHECK(report.params.at("skipped") == "1");
}

TEST_CASE("eval rejects nonsensical budgets") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 11);
  CHECK_THROWS_AS(eval_random_sampling(p, corpus, 1, 0), rdpp::ConfigError);
  CHECK_THROWS_AS(eval_oracle(p, corpus, 0, 0), rdpp::ConfigError);
  CHECK_THROWS_AS(eval_beam(p, corpus, 0), rdpp::ConfigError);
}

TEST_CASE("csv and json outputs carry the protocol and params") {
  const RefCorpus corpus = small_corpus();
  const PolicyParams p = random_policy(corpus, 12);
  EvalOptions opt;
  opt.split = Split::kVal;
  const EvalReport report = eval_random_sampling(p, corpus, 4, 77, opt);

  const std::string csv = report.to_csv();
  CHECK(csv.find("# format_version=1") != std::string::npos);
  CHECK(csv.find("# protocol=random_sampling") != std::string::npos);
  CHECK(csv.find("# num_samples=4") != std::string::npos);
  CHECK(csv.find("image_id,cider,self_cider") != std::string::npos);
  CHECK(csv.find("AGG,") != std::string::npos);

  const std::string json = report.to_json();
  CHECK(json.find("\"protocol\": \"random_sampling\"") != std::string::npos);
  CHECK(json.find("\"format_version\": 1") != std::string::npos);
  CHECK(json.find("\"aggregate\"") != std::string::npos);
}
