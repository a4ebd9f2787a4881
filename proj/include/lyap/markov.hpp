#pragma once

#include <span>
#include <vector>

#include "lyap/rng.hpp"

namespace lyap {

// The symbol process. Users supply the forward transition matrix T
// (T[a][b] = probability the next symbol is b given the current one is a);
// the stationary vector pi and the backward kernel P[i][j] = pi_i T[i][j] / pi_j
// are derived. P is column-stochastic: summing P[i][j] over i gives 1.
class MarkovChainSpec {
 public:
  // strict_full_shift = true rejects any zero transition probability.
  // With false, an irreducible aperiodic T is accepted and flagged.
  static MarkovChainSpec build(const std::vector<std::vector<double>>& transition,
                               bool strict_full_shift = true);

  int k() const { return k_; }
  double transition(int i, int j) const { return t_[idx(i, j)]; }
  double stationary(int i) const { return pi_[static_cast<size_t>(i)]; }
  double backward(int i, int j) const { return p_[idx(i, j)]; }
  const std::vector<double>& pi() const { return pi_; }
  bool partial_support() const { return partial_support_; }

  int sample_initial(RngStream& rng) const;
  int sample_step(int from, RngStream& rng) const;

 private:
  size_t idx(int i, int j) const { return static_cast<size_t>(i) * k_ + j; }

  int k_ = 0;
  std::vector<double> t_, pi_, p_;
  bool partial_support_ = false;
};

/// P(word, terminal): probability that the n coordinates before the terminal
/// symbol equal the word, conditioned on the terminal. Symbols are 0-based.
double word_probability(const MarkovChainSpec& chain, std::span<const int> word, int terminal);

/// Stationary forward trajectory of length n: initial symbol ~ pi, steps ~ T.
std::vector<int> sample_path(const MarkovChainSpec& chain, long n, RngStream& rng);

}  // namespace lyap
