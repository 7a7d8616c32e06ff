#include "rdpp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "rdpp/errors.hpp"
#include "rdpp/rng.hpp"

namespace rdpp {

namespace {

constexpr char kMagic[8] = {'R', 'D', 'P', 'P', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kFormatVersion = 1;

struct StepDist {
  Eigen::VectorXd probs;  ///< masked entries exactly 0
  Eigen::VectorXd logs;   ///< -inf at masked entries
};

void check_context(const PolicyParams& params, int context) {
  if (context < 0 || context >= params.num_contexts)
    throw ShapeError("policy: context " + std::to_string(context) +
                     " out of range for " + std::to_string(params.num_contexts) +
                     " contexts");
}

/// Softmax over the next-token row. EOS is excluded when allow_eos is false.
StepDist step_dist(const PolicyParams& params, int context, int state, bool allow_eos) {
  const Eigen::MatrixXd& slab = params.logits[static_cast<std::size_t>(context)];
  const int actions = params.vocab.num_actions();
  const int limit = allow_eos ? actions : params.vocab.size();

  double max_logit = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < limit; ++a) max_logit = std::max(max_logit, slab(state, a));

  StepDist d;
  d.probs = Eigen::VectorXd::Zero(actions);
  d.logs = Eigen::VectorXd::Constant(actions, -std::numeric_limits<double>::infinity());
  double norm = 0.0;
  for (int a = 0; a < limit; ++a) {
    d.probs(a) = std::exp(slab(state, a) - max_logit);
    norm += d.probs(a);
  }
  const double log_norm = std::log(norm);
  for (int a = 0; a < limit; ++a) {
    d.probs(a) /= norm;
    d.logs(a) = slab(state, a) - max_logit - log_norm;
  }
  return d;
}

Eigen::RowVectorXd one_hot_minus_softmax(const StepDist& d, int picked) {
  Eigen::RowVectorXd g = -d.probs.transpose();
  g(picked) += 1.0;
  return g;
}

}  // namespace

Vocab::Vocab(std::vector<std::string> words) : words_(std::move(words)) {
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  if (words_.empty()) throw VocabError("vocabulary is empty");
  for (const std::string& w : words_)
    if (w.empty()) throw VocabError("vocabulary contains an empty token");
}

int Vocab::id(const std::string& token) const {
  auto it = std::lower_bound(words_.begin(), words_.end(), token);
  if (it == words_.end() || *it != token)
    throw VocabError("token '" + token + "' is not in the vocabulary");
  return static_cast<int>(it - words_.begin());
}

const std::string& Vocab::word(int id) const {
  if (id < 0 || id >= size())
    throw VocabError("word id " + std::to_string(id) + " out of range");
  return words_[static_cast<std::size_t>(id)];
}

PolicyParams init_policy(const Vocab& vocab, int num_contexts, int max_len,
                         std::uint64_t seed, double scale) {
  if (num_contexts < 1)
    throw ShapeError("init_policy: need at least one context");
  if (max_len < 1) throw ShapeError("init_policy: max_len must be >= 1");

  PolicyParams params{vocab, num_contexts, max_len, {}};
  const int n = vocab.num_states();
  auto rng = make_rng(seed, "policy-init");
  params.logits.reserve(static_cast<std::size_t>(num_contexts));
  for (int c = 0; c < num_contexts; ++c) {
    Eigen::MatrixXd slab(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) slab(i, j) = scale * (2.0 * uniform01(rng) - 1.0);
    params.logits.push_back(std::move(slab));
  }
  return params;
}

LogProbResult log_prob_grad(const PolicyParams& params, int context,
                            const Caption& caption) {
  check_context(params, context);
  if (caption.tokens.empty())
    throw EmptyCaptionError("log_prob_grad: caption has no tokens");
  const int len = static_cast<int>(caption.tokens.size());
  if (len > params.max_len)
    throw ShapeError("log_prob_grad: caption length " + std::to_string(len) +
                     " exceeds max_len " + std::to_string(params.max_len));

  LogProbResult result;
  int state = params.vocab.bos_state();
  for (int t = 0; t < len; ++t) {
    const int tok = params.vocab.id(caption.tokens[static_cast<std::size_t>(t)]);
    const StepDist d = step_dist(params, context, state, t > 0);
    result.log_prob += d.logs(tok);
    result.grad_rows.emplace_back(state, one_hot_minus_softmax(d, tok));
    state = tok;
  }
  if (len < params.max_len) {
    const int eos = params.vocab.eos_action();
    const StepDist d = step_dist(params, context, state, true);
    result.log_prob += d.logs(eos);
    result.grad_rows.emplace_back(state, one_hot_minus_softmax(d, eos));
  }
  return result;
}

Rollout sample(const PolicyParams& params, int context, std::mt19937_64& rng) {
  check_context(params, context);
  const int eos = params.vocab.eos_action();

  Rollout rollout;
  int state = params.vocab.bos_state();
  for (int t = 0; t < params.max_len; ++t) {
    const StepDist d = step_dist(params, context, state, t > 0);
    const double u = uniform01(rng);
    int picked = -1;
    double acc = 0.0;
    for (int a = 0; a < d.probs.size(); ++a) {
      if (d.probs(a) <= 0.0) continue;
      acc += d.probs(a);
      picked = a;
      if (u < acc) break;
    }
    rollout.log_prob += d.logs(picked);
    rollout.grad_rows.emplace_back(state, one_hot_minus_softmax(d, picked));
    if (picked == eos) break;
    rollout.caption.tokens.push_back(params.vocab.word(picked));
    state = picked;
  }
  return rollout;
}

namespace {

struct Hyp {
  std::vector<int> toks;
  int state = 0;
  double lp = 0.0;
  bool done = false;
};

bool better(double lp_a, const std::vector<int>& toks_a, double lp_b,
            const std::vector<int>& toks_b) {
  if (lp_a != lp_b) return lp_a > lp_b;
  return toks_a < toks_b;
}

}  // namespace

Caption beam_search(const PolicyParams& params, int context, int beam_width) {
  check_context(params, context);
  if (beam_width < 1)
    throw ShapeError("beam_search: beam width must be >= 1");
  const int eos = params.vocab.eos_action();
  const int num_words = params.vocab.size();

  // Terminated hypotheses stay in the beam and compete for slots, so width 1
  // degenerates to greedy decoding over the full softmax.
  std::vector<Hyp> pool{Hyp{{}, params.vocab.bos_state(), 0.0, false}};
  for (int t = 0; t < params.max_len; ++t) {
    const bool any_active = std::any_of(pool.begin(), pool.end(),
                                        [](const Hyp& h) { return !h.done; });
    if (!any_active) break;
    std::vector<Hyp> expanded;
    expanded.reserve(pool.size() * static_cast<std::size_t>(num_words + 1));
    for (Hyp& hyp : pool) {
      if (hyp.done) {
        expanded.push_back(std::move(hyp));
        continue;
      }
      const StepDist d = step_dist(params, context, hyp.state, t > 0);
      if (t > 0) {
        Hyp ended = hyp;
        ended.lp += d.logs(eos);
        ended.done = true;
        expanded.push_back(std::move(ended));
      }
      for (int w = 0; w < num_words; ++w) {
        Hyp next = hyp;
        next.toks.push_back(w);
        next.state = w;
        next.lp += d.logs(w);
        expanded.push_back(std::move(next));
      }
    }
    std::sort(expanded.begin(), expanded.end(), [](const Hyp& a, const Hyp& b) {
      return better(a.lp, a.toks, b.lp, b.toks);
    });
    if (expanded.size() > static_cast<std::size_t>(beam_width))
      expanded.resize(static_cast<std::size_t>(beam_width));
    pool = std::move(expanded);
  }

  // Hypotheses still active at the cap are force-terminated with no EOS
  // factor, matching the sampling convention. lp is unchanged, so the pool
  // stays sorted and the front is the answer.
  Caption out;
  for (int tok : pool.front().toks) out.tokens.push_back(params.vocab.word(tok));
  return out;
}

namespace {

void enumerate_dfs(const PolicyParams& params, int context, int state, int depth,
                   double lp, std::vector<int>& toks,
                   std::vector<std::pair<std::vector<int>, double>>& out) {
  if (depth == params.max_len) {
    out.emplace_back(toks, std::exp(lp));
    return;
  }
  const StepDist d = step_dist(params, context, state, depth > 0);
  if (depth > 0)
    out.emplace_back(toks, std::exp(lp + d.logs(params.vocab.eos_action())));
  for (int w = 0; w < params.vocab.size(); ++w) {
    toks.push_back(w);
    enumerate_dfs(params, context, w, depth + 1, lp + d.logs(w), toks, out);
    toks.pop_back();
  }
}

}  // namespace

std::vector<std::pair<Caption, double>> enumerate_all(const PolicyParams& params,
                                                      int context) {
  check_context(params, context);
  const double space = std::pow(static_cast<double>(params.vocab.size()),
                                static_cast<double>(params.max_len));
  if (space > 1e6)
    throw CapacityError("enumerate_all: vocab^max_len = " + std::to_string(space) +
                        " exceeds the enumerable limit of 1e6");

  std::vector<std::pair<std::vector<int>, double>> raw;
  std::vector<int> toks;
  enumerate_dfs(params, context, params.vocab.bos_state(), 0, 0.0, toks, raw);
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::pair<Caption, double>> out;
  out.reserve(raw.size());
  for (const auto& [ids, p] : raw) {
    Caption c;
    for (int id : ids) c.tokens.push_back(params.vocab.word(id));
    out.emplace_back(std::move(c), p);
  }
  return out;
}

XeResult xe_step(const PolicyParams& params, int context, const Caption& reference) {
  LogProbResult lp = log_prob_grad(params, context, reference);
  XeResult result;
  result.loss = -lp.log_prob;
  result.grad_rows = std::move(lp.grad_rows);
  for (auto& [row, grad] : result.grad_rows) grad = -grad;
  return result;
}

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in, const char* what) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
    throw FormatError(std::string("checkpoint: truncated while reading ") + what);
  return v;
}

}  // namespace

void save_checkpoint(const PolicyParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("checkpoint: cannot open '" + path + "' for writing");

  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(params.num_contexts));
  write_u32(out, static_cast<std::uint32_t>(params.max_len));
  write_u32(out, static_cast<std::uint32_t>(params.vocab.size()));
  for (const std::string& w : params.vocab.words()) {
    write_u32(out, static_cast<std::uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
  }
  const int n = params.vocab.num_states();
  for (const Eigen::MatrixXd& slab : params.logits)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = slab(i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
  if (!out) throw FormatError("checkpoint: write to '" + path + "' failed");
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("checkpoint: cannot open '" + path + "'");

  char magic[sizeof(kMagic)] = {};
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("checkpoint: bad magic in '" + path + "'");
  const std::uint32_t version = read_u32(in, "version");
  if (version != kFormatVersion)
    throw FormatError("checkpoint: unsupported format version " + std::to_string(version));

  const std::uint32_t num_contexts = read_u32(in, "num_contexts");
  const std::uint32_t max_len = read_u32(in, "max_len");
  const std::uint32_t vocab_size = read_u32(in, "vocab_size");
  if (num_contexts == 0 || num_contexts > 10'000'000)
    throw FormatError("checkpoint: implausible context count");
  if (max_len == 0 || max_len > 1'000'000)
    throw FormatError("checkpoint: implausible max_len");
  if (vocab_size == 0 || vocab_size > 1'000'000)
    throw FormatError("checkpoint: implausible vocabulary size");

  std::vector<std::string> words;
  words.reserve(vocab_size);
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    const std::uint32_t len = read_u32(in, "word length");
    if (len == 0 || len > 1'000'000) throw FormatError("checkpoint: implausible word length");
    std::string w(len, '\0');
    if (!in.read(w.data(), static_cast<std::streamsize>(len)))
      throw FormatError("checkpoint: truncated word table");
    if (!words.empty() && !(words.back() < w))
      throw FormatError("checkpoint: word table is not strictly increasing");
    words.push_back(std::move(w));
  }

  const int n = static_cast<int>(vocab_size) + 1;
  std::vector<Eigen::MatrixXd> slabs;
  slabs.reserve(num_contexts);
  for (std::uint32_t c = 0; c < num_contexts; ++c) {
    Eigen::MatrixXd slab(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
          throw FormatError("checkpoint: truncated logits");
        if (!std::isfinite(v)) throw FormatError("checkpoint: non-finite logit value");
        slab(i, j) = v;
      }
    slabs.push_back(std::move(slab));
  }
  if (in.peek() != std::ifstream::traits_type::eof())
    throw FormatError("checkpoint: trailing bytes in '" + path + "'");

  return PolicyParams{Vocab(std::move(words)), static_cast<int>(num_contexts),
                      static_cast<int>(max_len), std::move(slabs)};
}

}  // namespace rdpp
