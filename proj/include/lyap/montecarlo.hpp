#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lyap/grid_function.hpp"
#include "lyap/markov.hpp"
#include "lyap/matrix.hpp"
#include "lyap/projective.hpp"

namespace lyap {

struct EstimateResult {
  double gamma_hat = 0.0;
  double std_error = 0.0;
  long n_steps = 0;
  int n_replicas = 0;
  std::string method;
  std::vector<double> trace;  // per-block partial means
};

// Subadditive estimator: mean over replicas of (1/n) log ||M_{xi_1} ... M_{xi_n}||
// along stationary forward paths. The running product is renormalized every
// 32 steps so no overflow is possible. Replicas use independent RNG streams
// derived from (seed, replica) and run in parallel; the reduction order is
// fixed, so results are bit-identical for any worker count.
EstimateResult estimate_subadditive(const MatrixFamily& family, const MarkovChainSpec& chain,
                                    long n, int replicas, uint64_t seed);
EstimateResult estimate_subadditive_serial(const MatrixFamily& family,
                                           const MarkovChainSpec& chain, long n, int replicas,
                                           uint64_t seed);

// Ergodic estimator from the Furstenberg identity: average of
// log||M^T_{xi_m} x_{m-1}|| along the projective chain driven by the
// transposed family (transposition lets the product grow by appending while
// ||product|| is unchanged). Standard error by batch means over ~sqrt(n)
// batches; that error bar is a heuristic, not a CLT guarantee.
EstimateResult estimate_furstenberg(const MatrixFamily& family, const MarkovChainSpec& chain,
                                    long n, long burn_in, uint64_t seed);

// Exact small-n oracle: sum over all k^n words of the conditional word
// probability times e^{t log||M_{i_0} M_{i_1} ... M_{i_{n-1}} x||}, the word's
// first symbol acting leftmost. Budget k^n <= 1e7.
double enumerate_exact(const MatrixFamily& family, const MarkovChainSpec& chain, int n, double t,
                       int terminal, const ProjPoint& x);

// The same sum evaluated at every grid node (j, x_m), comparable directly
// with the n-fold discretized operator applied to 1. Budget k^n <= 1e5.
GridFunction enumerate_exact_grid(const MatrixFamily& family, const MarkovChainSpec& chain, int n,
                                  double t, int n_grid, double alpha, double theta);
GridFunction enumerate_exact_grid_serial(const MatrixFamily& family, const MarkovChainSpec& chain,
                                         int n, double t, int n_grid, double alpha, double theta);

}  // namespace lyap
