#pragma once

#include <complex>
#include <vector>

#include "lyap/grid_function.hpp"
#include "lyap/markov.hpp"
#include "lyap/matrix.hpp"

namespace lyap {

// Fixed measure of the adjoint of the normalized operator: nonnegative node
// weights of total mass 1 whose symbol marginal reproduces the stationary
// vector of the chain.
class EigenMeasure {
 public:
  EigenMeasure(int k, int n_grid, std::vector<double> weights);

  int k() const { return k_; }
  int n_grid() const { return n_; }
  double weight(int i, int m) const { return w_[static_cast<size_t>(i) * n_ + m]; }
  const std::vector<double>& weights() const { return w_; }
  double symbol_mass(int i) const { return q_[static_cast<size_t>(i)]; }

 private:
  int k_ = 0, n_ = 0;
  std::vector<double> w_;
  std::vector<double> q_;
};

struct PowerIterationResult {
  double beta;
  GridFunction eigenfunction;  // positive, sup-norm 1
  int iterations;
  bool possible_nonsimple;  // period-2 ratio oscillation was averaged out
};

struct BetaDerivativeResult {
  double h;
  double raw_h;        // central difference of log beta at step h
  double raw_half_h;   // same at step h/2
  double extrapolated; // one Richardson level
};

struct SpectralGapTrace {
  std::vector<double> residuals;  // sup norm of L0^n w - Qw, n = 1..n_max
  double rate;
  bool early_zero;  // residuals dropped below 1e-13 before the fit window
};

struct SpectralGapResult {
  double rate;  // worst fitted per-step decay over the probes
  bool no_gap;  // rate >= 0.99
  bool early_zero;
  int fit_lo, fit_hi;
  std::vector<SpectralGapTrace> probes;
};

struct LasotaYorkeRow {
  int n;
  double sup;
  double seminorm;
};

struct LasotaYorkeResult {
  std::vector<LasotaYorkeRow> rows;  // n = 0..n_max
  double big_c;     // fitted C in |L^n w| <= C |w|_inf + delta^n |w|
  double delta;     // fitted per-step seminorm decay
  bool contraction; // delta < 0.99
  bool sup_bound_ok;    // for normalized weights: sup never grew past 1e-12 slack
  double max_residual;  // max over n of seminorm_n - (C sup_0 + delta^n seminorm_0)
};

// Markovian transfer operator on the (symbol, RP^1-grid) discretization:
//
//   (L_t w)(j, x) = sum_i P[i][j] * e^{t log||M_i x||} * w(i, M_i . x)
//
// with off-grid evaluation by linear interpolation. The log-gains and the
// interpolation targets are precomputed per (symbol, node); the adjoint used
// for the eigenmeasure is the exact transpose of the discretized map.
// Application is parallel over nodes with a fixed per-node summation order,
// so results are bit-identical for any worker count.
class TransferOperator {
 public:
  TransferOperator(MatrixFamily family, MarkovChainSpec chain, int n_grid, double alpha = 0.5,
                   double theta = 0.25, double t_max = 0.5);

  int k() const { return chain_.k(); }
  int n_grid() const { return n_; }
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }
  double t_max() const { return t_max_; }
  const MatrixFamily& family() const { return family_; }
  const MarkovChainSpec& chain() const { return chain_; }
  double gain(int i, int m) const { return gain_[static_cast<size_t>(i) * n_ + m]; }

  GridFunction unit_function() const;

  GridFunction apply(const GridFunction& w, Complex t) const;
  // Reference kernel: recomputes actions and gains from scratch, serially.
  GridFunction apply_serial(const GridFunction& w, Complex t) const;
  // General weighted operator L_g; the weight is interpolated at the image point.
  GridFunction apply_weighted(const GridFunction& w, const GridFunction& g) const;

  /// Perron eigenvalue beta(t) for real t by sup-normalized power iteration.
  PowerIterationResult leading_eigenvalue(double t) const;

  /// Adjoint fixed point at t = 0, mass-normalized.
  EigenMeasure eigenmeasure() const;

  /// First-order eigenvalue perturbation at t = 0 with eigenfunction 1:
  /// gamma = sum_{j,m} nu[j][m] * sum_i P[i][j] * log||M_i x_m||.
  double lyapunov_via_perturbation(const EigenMeasure& nu) const;

  /// Central difference of log beta at 0 with one Richardson level.
  BetaDerivativeResult lyapunov_via_beta_derivative(double h) const;

  SpectralGapResult spectral_gap(const std::vector<GridFunction>& probes, int n_max,
                                 const EigenMeasure& nu, int fit_lo = 10, int fit_hi = 40) const;

  /// Seminorm trajectory of L_t^n w for t real or purely imaginary, with the
  /// fitted (C, delta) of the Lasota-Yorke bound.
  LasotaYorkeResult lasota_yorke_probe(const GridFunction& w, Complex t, int n_max) const;

 private:
  std::vector<Complex> weight_table(Complex t) const;
  std::vector<Complex> weight_table(const GridFunction& g) const;
  GridFunction apply_tabulated(const GridFunction& w, const std::vector<Complex>& wt,
                               bool parallel) const;

  MatrixFamily family_;
  MarkovChainSpec chain_;
  int n_;
  double alpha_, theta_, t_max_;
  std::vector<double> gain_;      // k*N, log ||M_i x_m||
  std::vector<InterpCoef> coef_;  // k*N, interpolation target of M_i . x_m
};

/// Quadrature of w against the eigenmeasure (the rank-one projection Q).
Complex q_projection(const EigenMeasure& nu, const GridFunction& w);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace lyap
