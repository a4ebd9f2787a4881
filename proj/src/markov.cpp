#include "lyap/markov.hpp"

#include <algorithm>
#include <cmath>

#include "lyap/errors.hpp"

namespace lyap {

namespace {

// Wielandt: a nonnegative k x k matrix is primitive iff its boolean power
// (k-1)^2 + 1 is strictly positive.
bool is_primitive(const std::vector<std::vector<double>>& t, int k) {
  std::vector<char> b(static_cast<size_t>(k) * k, 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) b[static_cast<size_t>(i) * k + j] = t[i][j] > 0.0 ? 1 : 0;
  int power = (k - 1) * (k - 1) + 1;
  std::vector<char> cur = b, next(b.size());
  for (int step = 1; step < power; ++step) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        char v = 0;
        for (int q = 0; q < k && !v; ++q)
          v = (cur[static_cast<size_t>(i) * k + q] && b[static_cast<size_t>(q) * k + j]) ? 1 : 0;
        next[static_cast<size_t>(i) * k + j] = v;
      }
    cur.swap(next);
  }
  return std::all_of(cur.begin(), cur.end(), [](char v) { return v != 0; });
}

}  // namespace

MarkovChainSpec MarkovChainSpec::build(const std::vector<std::vector<double>>& transition,
                                       bool strict_full_shift) {
  int k = static_cast<int>(transition.size());
  if (k < 1) throw ValidationError("bad-transition", "transition matrix must be non-empty");

  MarkovChainSpec spec;
  spec.k_ = k;
  spec.t_.assign(static_cast<size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(transition[i].size()) != k)
      throw ValidationError("bad-transition", "transition matrix must be square");
    double row_sum = 0.0;
    for (int j = 0; j < k; ++j) {
      double v = transition[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("bad-transition", "transition entries must be finite and >= 0");
      if (strict_full_shift && v <= 0.0)
        throw ValidationError("full-shift-violation",
                              "zero transition probability violates the full-shift assumption "
                              "(set strict_full_shift = false to accept a primitive chain)");
      spec.t_[spec.idx(i, j)] = v;
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > 1e-12)
      throw ValidationError("bad-transition", "transition rows must sum to 1 within 1e-12");
  }
  if (!strict_full_shift) {
    spec.partial_support_ = std::any_of(spec.t_.begin(), spec.t_.end(),
                                        [](double v) { return v == 0.0; });
    if (spec.partial_support_ && !is_primitive(transition, k))
      throw ValidationError("chain-not-primitive",
                            "transition matrix must be irreducible and aperiodic");
  }

  // Stationary vector by power iteration on the left; positive primitive T
  // converges geometrically, so iterate to stagnation.
  spec.pi_.assign(static_cast<size_t>(k), 1.0 / k);
  std::vector<double> next(static_cast<size_t>(k));
  for (int it = 0; it < 200000; ++it) {
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += spec.pi_[static_cast<size_t>(i)] * spec.t_[spec.idx(i, j)];
      next[static_cast<size_t>(j)] = s;
    }
    double total = 0.0;
    for (double v : next) total += v;
    double delta = 0.0;
    for (int j = 0; j < k; ++j) {
      next[static_cast<size_t>(j)] /= total;
      delta = std::max(delta, std::abs(next[static_cast<size_t>(j)] - spec.pi_[static_cast<size_t>(j)]));
    }
    spec.pi_.swap(next);
    if (delta < 1e-16) break;
  }
  double resid = 0.0;
  for (int j = 0; j < k; ++j) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += spec.pi_[static_cast<size_t>(i)] * spec.t_[spec.idx(i, j)];
    resid = std::max(resid, std::abs(s - spec.pi_[static_cast<size_t>(j)]));
  }
  if (resid > 1e-12)
    throw ConvergenceError("stationary-distribution",
                           "stationary vector did not converge to 1e-12", {resid});
  for (double v : spec.pi_)
    if (!(v > 0.0))
      throw ValidationError("bad-transition", "stationary vector must be strictly positive");

  // Backward kernel, column-normalized so each column sums to 1 exactly.
  spec.p_.assign(static_cast<size_t>(k) * k, 0.0);
  for (int j = 0; j < k; ++j) {
    double col = 0.0;
    for (int i = 0; i < k; ++i) {
      double v = spec.pi_[static_cast<size_t>(i)] * spec.t_[spec.idx(i, j)] /
                 spec.pi_[static_cast<size_t>(j)];
      spec.p_[spec.idx(i, j)] = v;
      col += v;
    }
    for (int i = 0; i < k; ++i) spec.p_[spec.idx(i, j)] /= col;
  }
  return spec;
}

int MarkovChainSpec::sample_initial(RngStream& rng) const {
  return rng.sample_discrete(pi_);
}

int MarkovChainSpec::sample_step(int from, RngStream& rng) const {
  return rng.sample_discrete(
      std::span<const double>(t_.data() + static_cast<size_t>(from) * k_, static_cast<size_t>(k_)));
}

double word_probability(const MarkovChainSpec& chain, std::span<const int> word, int terminal) {
  int k = chain.k();
  if (terminal < 0 || terminal >= k)
    throw ValidationError("symbol-out-of-range", "terminal symbol out of range");
  for (int s : word)
    if (s < 0 || s >= k) throw ValidationError("symbol-out-of-range", "word symbol out of range");
  if (word.empty()) return 1.0;
  size_t n = word.size();
  double prob = chain.backward(word[n - 1], terminal);
  for (size_t q = n - 1; q-- > 0;) prob *= chain.backward(word[q], word[q + 1]);
  return prob;
}

std::vector<int> sample_path(const MarkovChainSpec& chain, long n, RngStream& rng) {
  if (n < 1) throw ValidationError("bad-count", "path length must be >= 1");
  std::vector<int> path(static_cast<size_t>(n));
  path[0] = chain.sample_initial(rng);
  for (long m = 1; m < n; ++m)
    path[static_cast<size_t>(m)] = chain.sample_step(path[static_cast<size_t>(m - 1)], rng);
  return path;
}

}  // namespace lyap
