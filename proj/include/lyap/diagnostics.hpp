#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lyap/markov.hpp"
#include "lyap/matrix.hpp"
#include "lyap/transfer.hpp"

namespace lyap {

// All probes in this module are sampling heuristics: they can falsify the
// standing hypotheses (strong irreducibility, contraction, properness) but
// never certify them.

struct ContractionRow {
  int n;
  double max_mean_ratio;  // max over pairs of E[ d^alpha(psi.x, psi.y) / d^alpha(x, y) ]
  double per_step_rate;   // max_mean_ratio^(1/n)
};

std::vector<ContractionRow> contraction_average(const MatrixFamily& family,
                                                const MarkovChainSpec& chain, int n_max, int pairs,
                                                double alpha, uint64_t seed);

struct IndexProbeResult {
  int n;
  std::vector<double> ratios;  // sigma_2 / sigma_1 of sampled products, sorted
  double median;
  double min;
  double max;
};

IndexProbeResult index_probe(const MatrixFamily& family, const MarkovChainSpec& chain, int n,
                             int samples, uint64_t seed);

struct PropernessCurve {
  double center_angle;        // the candidate hyperplane (a line of RP^1)
  std::vector<double> mass;   // nu-mass of the d_X-ball, per epsilon
};

struct PropernessResult {
  std::vector<double> eps_grid;
  std::vector<double> max_mass;  // per epsilon, worst candidate
  std::vector<PropernessCurve> curves;
  bool atom_flag;  // mass >= 0.05 persists at the smallest epsilon
};

// Candidates are `directions` evenly spread lines plus the heaviest grid
// nodes of nu, so atoms cannot hide between sampled directions. d = 2.
PropernessResult properness_probe(const EigenMeasure& nu, int directions,
                                  const std::vector<double>& eps_grid);

enum class IrreducibilityVerdict { pass, fail, inconclusive };

struct IrreducibilityResult {
  IrreducibilityVerdict verdict;
  std::vector<double> witness_angles;  // closed invariant line family, if found
  int seed_lines;                      // eigendirections harvested from short products
  std::string note;
};

// Harvests the real eigendirections of all products up to length max_len and
// tries to close each line orbit under the family action. A finite closed
// orbit is an exact invariance witness (fail); orbits escaping the cap are
// heuristic evidence of strong irreducibility (pass). d = 2.
IrreducibilityResult irreducibility_heuristic(const MatrixFamily& family, int max_len = 4,
                                              double tol = 1e-8, int cap = 64);

struct EllBoundResult {
  bool pass;
  double max_slack;  // max over samples of ell(psi(n)) - n*K (should be <= 1e-9)
  int samples;
};

// Checks ell(psi(n)) <= n K on sampled products of length n.
EllBoundResult ell_product_bound_check(const MatrixFamily& family, const MarkovChainSpec& chain,
                                       int n, int samples, uint64_t seed);

/// d = 2 determinant closure: gamma_1 + gamma_2 = sum_i pi_i log|det M_i|, exactly.
double det_closure_check(const MatrixFamily& family, const MarkovChainSpec& chain);

}  // namespace lyap
