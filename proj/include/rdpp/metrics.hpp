#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "rdpp/caption.hpp"

namespace rdpp {

inline constexpr int kMaxNgramOrder = 4;

/// Per-order document frequencies over a reference corpus. df[n-1][gram] is
/// the number of images whose reference set contains the gram; IDF is
/// log(num_images / df), natural log, with unseen grams treated as df = 1.
struct DocFreq {
  std::array<std::unordered_map<std::string, int>, kMaxNgramOrder> df;
  int num_images = 0;

  double idf(int n, const std::string& gram) const;
};

/// df[g] counts images where any reference contains g, for n = 1..4.
DocFreq build_doc_freq(const std::vector<std::vector<Caption>>& image_refs);

/// Per-order unit-normalized TF-IDF vectors for one caption. nonzero[n-1]
/// records whether the order-n vector was normalizable.
struct TfIdfProfile {
  std::array<std::unordered_map<std::string, double>, kMaxNgramOrder> vec;
  std::array<bool, kMaxNgramOrder> nonzero{};
};

TfIdfProfile tfidf_profile(const Caption& c, const DocFreq& df);

/// CIDEr quality score in [0, 10]: 10 x mean over orders 1..4 of the mean
/// TF-IDF cosine against each reference. Cosine with a zero vector is 0.
double cider(const Caption& candidate, const std::vector<Caption>& refs,
             const DocFreq& df);

/// Caches reference profiles so many candidates can be scored against the
/// same reference set cheaply.
class CiderScorer {
 public:
  CiderScorer(const std::vector<Caption>& refs, const DocFreq& df);
  double score(const Caption& candidate) const;

 private:
  const DocFreq& df_;
  std::vector<TfIdfProfile> ref_profiles_;
};

/// Unit-interval caption similarity: mean TF-IDF cosine over the n-gram
/// orders where both captions have nonzero vectors. Identical token
/// sequences score exactly 1; pairs with no commonly active order score 0.
double similarity_unit(const Caption& ci, const Caption& cj, const DocFreq& df);

double similarity_from_profiles(const Caption& ci, const TfIdfProfile& pi,
                                const Caption& cj, const TfIdfProfile& pj);

/// Pairwise similarity kernel for a caption list. Profiles are computed once
/// and the upper triangle is filled in parallel; entries are independent so
/// the result is identical for any thread count.
Eigen::MatrixXd similarity_matrix(const std::vector<Caption>& captions,
                                  const DocFreq& df, int threads = 0);

/// Plain-loop reference implementation of similarity_matrix.
Eigen::MatrixXd similarity_matrix_serial(const std::vector<Caption>& captions,
                                         const DocFreq& df);

/// Spectral step of the diversity score on an already-built similarity
/// kernel: d = -log(lambda_1 / sum lambda) / log(m), clamped to [0, 1];
/// 0 when the kernel is 1x1.
double diversity_from_kernel(const Eigen::MatrixXd& kernel);

/// Spectral diversity of a caption set: d = -log(lambda_1 / sum lambda) /
/// log(m) over the eigenvalues of the pairwise similarity kernel, clamped to
/// [0, 1]. 0 for one caption or identical sets, 1 for pairwise-dissimilar
/// sets. Throws EmptySetError on an empty list.
double self_cider_diversity(const std::vector<Caption>& captions,
                            const DocFreq& df, int threads = 0);

/// Sentence-level BLEU-n with brevity penalty and uniform order weights.
/// Orders where both the candidate and every reference lack n-grams are
/// skipped; an order where only the candidate lacks them scores 0.
double bleu_n(const Caption& candidate, const std::vector<Caption>& refs, int n);

/// ROUGE-L: longest-common-subsequence F-measure (beta = 1.2), max over refs.
double rouge_l(const Caption& candidate, const std::vector<Caption>& refs);

}  // namespace rdpp
