#include "oracles.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

namespace oracle {

std::map<std::string, int> ngrams(const Tokens& toks, int n) {
  std::map<std::string, int> out;
  if (n <= 0) return out;
  for (std::size_t start = 0; start + n <= toks.size(); ++start) {
    std::string key = toks[start];
    for (int k = 1; k < n; ++k) key += " " + toks[start + k];
    out[key] += 1;
  }
  return out;
}

namespace {

// df[n][gram] = number of images whose reference set mentions the gram.
std::map<std::string, int> doc_freq(const std::vector<std::vector<Tokens>>& corpus,
                                    int n) {
  std::map<std::string, int> df;
  for (const auto& image : corpus) {
    std::set<std::string> seen;
    for (const auto& ref : image)
      for (const auto& kv : ngrams(ref, n)) seen.insert(kv.first);
    for (const auto& g : seen) df[g] += 1;
  }
  return df;
}

std::map<std::string, double> tfidf(const Tokens& toks, int n,
                                    const std::map<std::string, int>& df,
                                    int num_images) {
  std::map<std::string, double> v;
  for (const auto& kv : ngrams(toks, n)) {
    auto it = df.find(kv.first);
    const int d = it == df.end() ? 1 : it->second;
    v[kv.first] = kv.second * std::log(static_cast<double>(num_images) / d);
  }
  return v;
}

double cosine(const std::map<std::string, double>& a,
              const std::map<std::string, double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& kv : a) {
    na += kv.second * kv.second;
    auto it = b.find(kv.first);
    if (it != b.end()) dot += kv.second * it->second;
  }
  for (const auto& kv : b) nb += kv.second * kv.second;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double cider(const Tokens& cand, const std::vector<Tokens>& refs,
             const std::vector<std::vector<Tokens>>& corpus) {
  const int num_images = static_cast<int>(corpus.size());
  double total = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const auto df = doc_freq(corpus, n);
    const auto cv = tfidf(cand, n, df, num_images);
    double mean_cos = 0.0;
    for (const auto& ref : refs)
      mean_cos += cosine(cv, tfidf(ref, n, df, num_images));
    total += mean_cos / static_cast<double>(refs.size());
  }
  return 10.0 * total / 4.0;
}

double determinant(Eigen::MatrixXd m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 1.0;
  double det = 1.0;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (m(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      m.row(pivot).swap(m.row(col));
      det = -det;
    }
    det *= m(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      m.row(r).tail(n - col) -= f * m.row(col).tail(n - col);
    }
  }
  return det;
}

int lcs(const Tokens& a, const Tokens& b) {
  std::vector<std::vector<int>> t(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1
                                     : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

}  // namespace oracle
