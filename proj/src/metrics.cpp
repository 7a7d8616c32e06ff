#include "rdpp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rdpp/errors.hpp"
#include "rdpp/parallel.hpp"

namespace rdpp {

namespace {

double sparse_dot(const std::unordered_map<std::string, double>& a,
                  const std::unordered_map<std::string, double>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double dot = 0.0;
  for (const auto& [gram, w] : small) {
    auto it = large.find(gram);
    if (it != large.end()) dot += w * it->second;
  }
  return dot;
}

}  // namespace

double DocFreq::idf(int n, const std::string& gram) const {
  const auto& table = df[n - 1];
  auto it = table.find(gram);
  const int d = it == table.end() ? 1 : it->second;
  return std::log(static_cast<double>(num_images) / static_cast<double>(d));
}

DocFreq build_doc_freq(const std::vector<std::vector<Caption>>& image_refs) {
  DocFreq out;
  out.num_images = static_cast<int>(image_refs.size());
  for (const auto& refs : image_refs) {
    for (int n = 1; n <= kMaxNgramOrder; ++n) {
      std::set<std::string> seen;
      for (const Caption& ref : refs)
        for (const auto& [gram, count] : extract_ngrams(ref, n)) seen.insert(gram);
      for (const auto& gram : seen) ++out.df[n - 1][gram];
    }
  }
  return out;
}

TfIdfProfile tfidf_profile(const Caption& c, const DocFreq& df) {
  TfIdfProfile profile;
  for (int n = 1; n <= kMaxNgramOrder; ++n) {
    auto& vec = profile.vec[n - 1];
    double norm_sq = 0.0;
    for (const auto& [gram, count] : extract_ngrams(c, n)) {
      const double w = count * df.idf(n, gram);
      vec[gram] = w;
      norm_sq += w * w;
    }
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [gram, w] : vec) w *= inv;
      profile.nonzero[n - 1] = true;
    } else {
      vec.clear();
      profile.nonzero[n - 1] = false;
    }
  }
  return profile;
}

CiderScorer::CiderScorer(const std::vector<Caption>& refs, const DocFreq& df)
    : df_(df) {
  if (refs.empty()) throw EmptySetError("cider requires at least one reference");
  ref_profiles_.reserve(refs.size());
  for (const Caption& ref : refs) ref_profiles_.push_back(tfidf_profile(ref, df));
}

double CiderScorer::score(const Caption& candidate) const {
  const TfIdfProfile cand = tfidf_profile(candidate, df_);
  double total = 0.0;
  for (int n = 0; n < kMaxNgramOrder; ++n) {
    if (!cand.nonzero[n]) continue;
    double level = 0.0;
    for (const TfIdfProfile& ref : ref_profiles_) {
      if (!ref.nonzero[n]) continue;
      level += sparse_dot(cand.vec[n], ref.vec[n]);
    }
    total += level / static_cast<double>(ref_profiles_.size());
  }
  return 10.0 * total / kMaxNgramOrder;
}

double cider(const Caption& candidate, const std::vector<Caption>& refs,
             const DocFreq& df) {
  return CiderScorer(refs, df).score(candidate);
}

double similarity_from_profiles(const Caption& ci, const TfIdfProfile& pi,
                                const Caption& cj, const TfIdfProfile& pj) {
  if (ci.tokens == cj.tokens) return 1.0;
  int active = 0;
  double total = 0.0;
  for (int n = 0; n < kMaxNgramOrder; ++n) {
    if (!pi.nonzero[n] || !pj.nonzero[n]) continue;
    ++active;
    total += sparse_dot(pi.vec[n], pj.vec[n]);
  }
  return active == 0 ? 0.0 : total / active;
}

double similarity_unit(const Caption& ci, const Caption& cj, const DocFreq& df) {
  return similarity_from_profiles(ci, tfidf_profile(ci, df), cj,
                                  tfidf_profile(cj, df));
}

Eigen::MatrixXd similarity_matrix(const std::vector<Caption>& captions,
                                  const DocFreq& df, int threads) {
  const std::int64_t m = static_cast<std::int64_t>(captions.size());
  std::vector<TfIdfProfile> profiles(captions.size());
  par::for_index(m, threads,
                 [&](std::int64_t i) { profiles[i] = tfidf_profile(captions[i], df); });

  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(m, m);
  // One parallel index per strict-upper-triangle entry.
  const std::int64_t pairs = m * (m - 1) / 2;
  par::for_index(pairs, threads, [&](std::int64_t k) {
    // Invert k -> (i, j), j > i, walking row lengths.
    std::int64_t i = 0, remaining = k;
    while (remaining >= m - 1 - i) {
      remaining -= m - 1 - i;
      ++i;
    }
    const std::int64_t j = i + 1 + remaining;
    const double v = similarity_from_profiles(captions[i], profiles[i],
                                              captions[j], profiles[j]);
    s(i, j) = v;
    s(j, i) = v;
  });
  return s;
}

Eigen::MatrixXd similarity_matrix_serial(const std::vector<Caption>& captions,
                                         const DocFreq& df) {
  const Eigen::Index m = static_cast<Eigen::Index>(captions.size());
  std::vector<TfIdfProfile> profiles;
  profiles.reserve(captions.size());
  for (const Caption& c : captions) profiles.push_back(tfidf_profile(c, df));

  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = similarity_from_profiles(captions[i], profiles[i],
                                                captions[j], profiles[j]);
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

double diversity_from_kernel(const Eigen::MatrixXd& kernel) {
  if (kernel.rows() != kernel.cols() || kernel.rows() == 0)
    throw ShapeError("diversity kernel must be square and non-empty");
  const Eigen::Index m = kernel.rows();
  if (m == 1) return 0.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel);
  const Eigen::VectorXd lambda = solver.eigenvalues().cwiseMax(0.0);
  const double total = lambda.sum();
  if (total <= 0.0) return 0.0;
  const double ratio = lambda.maxCoeff() / total;
  const double d = -std::log(ratio) / std::log(static_cast<double>(m));
  return std::clamp(d, 0.0, 1.0);
}

double self_cider_diversity(const std::vector<Caption>& captions,
                            const DocFreq& df, int threads) {
  if (captions.empty())
    throw EmptySetError("diversity of an empty caption set is undefined");
  if (captions.size() == 1) return 0.0;
  return diversity_from_kernel(similarity_matrix(captions, df, threads));
}

double bleu_n(const Caption& candidate, const std::vector<Caption>& refs, int n) {
  if (refs.empty()) throw EmptySetError("bleu requires at least one reference");
  if (n < 1 || n > kMaxNgramOrder) throw ShapeError("bleu order must be 1..4");

  double log_precision = 0.0;
  int active_orders = 0;
  for (int k = 1; k <= n; ++k) {
    const auto cand_grams = extract_ngrams(candidate, k);
    int cand_total = 0;
    for (const auto& [gram, count] : cand_grams) cand_total += count;

    std::unordered_map<std::string, int> ref_max;
    bool refs_have_order = false;
    for (const Caption& ref : refs) {
      const auto ref_grams = extract_ngrams(ref, k);
      if (!ref_grams.empty()) refs_have_order = true;
      for (const auto& [gram, count] : ref_grams) {
        auto& slot = ref_max[gram];
        slot = std::max(slot, count);
      }
    }
    int matched = 0;
    for (const auto& [gram, count] : cand_grams) {
      auto it = ref_max.find(gram);
      if (it != ref_max.end()) matched += std::min(count, it->second);
    }

    if (cand_total == 0 && !refs_have_order) continue;  // order vacuous for both
    if (cand_total == 0 || matched == 0) return 0.0;
    log_precision += std::log(static_cast<double>(matched) / cand_total);
    ++active_orders;
  }
  if (active_orders == 0) return 0.0;

  // Effective reference length: closest to the candidate, shorter wins ties.
  const std::size_t c = candidate.length();
  std::size_t r = refs.front().length();
  for (const Caption& ref : refs) {
    const std::size_t len = ref.length();
    const auto diff = [&](std::size_t x) {
      return x > c ? x - c : c - x;
    };
    if (diff(len) < diff(r) || (diff(len) == diff(r) && len < r)) r = len;
  }
  const double bp =
      c >= r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_precision / active_orders);
}

namespace {

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

double rouge_l(const Caption& candidate, const std::vector<Caption>& refs) {
  if (refs.empty()) throw EmptySetError("rouge-l requires at least one reference");
  constexpr double kBetaSq = 1.2 * 1.2;
  double best = 0.0;
  for (const Caption& ref : refs) {
    const double lcs = static_cast<double>(lcs_length(candidate.tokens, ref.tokens));
    if (lcs == 0.0) continue;
    const double p = lcs / static_cast<double>(candidate.length());
    const double r = lcs / static_cast<double>(ref.length());
    const double f = (1.0 + kBetaSq) * p * r / (r + kBetaSq * p);
    best = std::max(best, f);
  }
  return best;
}

}  // namespace rdpp
