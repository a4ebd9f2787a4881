#include "lyap/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lyap/errors.hpp"

namespace lyap {

namespace {

Complex interp_value(const GridFunction& w, int i, const InterpCoef& c) {
  if (c.frac == 0.0) return w.value(i, c.idx);
  int next = c.idx + 1 == w.n_grid() ? 0 : c.idx + 1;
  return (1.0 - c.frac) * w.value(i, c.idx) + c.frac * w.value(i, next);
}

std::vector<double> trace_tail(const std::vector<double>& trace, size_t keep = 16) {
  if (trace.size() <= keep) return trace;
  return std::vector<double>(trace.end() - static_cast<long>(keep), trace.end());
}

}  // namespace

EigenMeasure::EigenMeasure(int k, int n_grid, std::vector<double> weights)
    : k_(k), n_(n_grid), w_(std::move(weights)) {
  if (w_.size() != static_cast<size_t>(k_) * n_)
    throw ValidationError("bad-grid", "eigenmeasure weight count mismatch");
  double total = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("bad-measure", "eigenmeasure weights must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("bad-measure", "eigenmeasure must have total mass 1 within 1e-12");
  q_.assign(static_cast<size_t>(k_), 0.0);
  for (int i = 0; i < k_; ++i)
    for (int m = 0; m < n_; ++m) q_[static_cast<size_t>(i)] += weight(i, m);
}

TransferOperator::TransferOperator(MatrixFamily family, MarkovChainSpec chain, int n_grid,
                                   double alpha, double theta, double t_max)
    : family_(std::move(family)),
      chain_(std::move(chain)),
      n_(n_grid),
      alpha_(alpha),
      theta_(theta),
      t_max_(t_max) {
  if (family_.dim() != 2)
    throw ValidationError("unsupported-dimension",
                          "grid transfer operators require d = 2 (use the Monte-Carlo "
                          "estimators for higher dimension)");
  if (family_.size() != chain_.k())
    throw ValidationError("family-chain-mismatch",
                          "matrix count must equal the chain's symbol count");
  if (n_ < 8) throw ValidationError("bad-grid", "grid size must be >= 8");
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) throw ValidationError("bad-grid", "alpha must lie in (0, 1]");
  if (!(theta_ > 0.0 && theta_ < 1.0)) throw ValidationError("bad-grid", "theta must lie in (0, 1)");
  if (!(t_max_ > 0.0)) throw ValidationError("bad-grid", "t_max must be positive");

  const int k = chain_.k();
  gain_.resize(static_cast<size_t>(k) * n_);
  coef_.resize(static_cast<size_t>(k) * n_);
  for (int i = 0; i < k; ++i) {
    for (int m = 0; m < n_; ++m) {
      ProjPoint x = grid_point(m, n_);
      size_t idx = static_cast<size_t>(i) * n_ + m;
      gain_[idx] = log_gain(family_[i], x);
      coef_[idx] = interp_coef(angle_chart(proj_action(family_[i], x)), n_);
    }
  }
}

GridFunction TransferOperator::unit_function() const {
  return GridFunction::constant(chain_.k(), n_, Complex(1.0, 0.0), alpha_, theta_);
}

std::vector<Complex> TransferOperator::weight_table(Complex t) const {
  std::vector<Complex> wt(gain_.size());
  for (size_t idx = 0; idx < gain_.size(); ++idx) wt[idx] = std::exp(t * gain_[idx]);
  return wt;
}

std::vector<Complex> TransferOperator::weight_table(const GridFunction& g) const {
  if (g.k() != chain_.k() || g.n_grid() != n_)
    throw ValidationError("grid-mismatch", "weight function shape must match the operator");
  std::vector<Complex> wt(gain_.size());
  const int k = chain_.k();
  for (int i = 0; i < k; ++i)
    for (int m = 0; m < n_; ++m) {
      size_t idx = static_cast<size_t>(i) * n_ + m;
      wt[idx] = std::exp(interp_value(g, i, coef_[idx]));
    }
  return wt;
}

GridFunction TransferOperator::apply_tabulated(const GridFunction& w,
                                               const std::vector<Complex>& wt,
                                               bool parallel) const {
  if (w.k() != chain_.k() || w.n_grid() != n_)
    throw ValidationError("grid-mismatch", "grid function shape must match the operator");
  const int k = chain_.k();
  GridFunction out(k, n_, w.alpha(), w.theta());
#pragma omp parallel for schedule(static) if (parallel)
  for (int m = 0; m < n_; ++m) {
    for (int i = 0; i < k; ++i) {
      size_t idx = static_cast<size_t>(i) * n_ + m;
      Complex term = wt[idx] * interp_value(w, i, coef_[idx]);
      for (int j = 0; j < k; ++j) out.value(j, m) += chain_.backward(i, j) * term;
    }
  }
  return out;
}

GridFunction TransferOperator::apply(const GridFunction& w, Complex t) const {
  return apply_tabulated(w, weight_table(t), true);
}

GridFunction TransferOperator::apply_serial(const GridFunction& w, Complex t) const {
  // Definition-following reference: recompute the action and gain per node.
  if (w.k() != chain_.k() || w.n_grid() != n_)
    throw ValidationError("grid-mismatch", "grid function shape must match the operator");
  const int k = chain_.k();
  GridFunction out(k, n_, w.alpha(), w.theta());
  for (int m = 0; m < n_; ++m) {
    ProjPoint x = grid_point(m, n_);
    for (int i = 0; i < k; ++i) {
      Complex weight = std::exp(t * log_gain(family_[i], x));
      Complex term = weight * eval(w, i, proj_action(family_[i], x));
      for (int j = 0; j < k; ++j) out.value(j, m) += chain_.backward(i, j) * term;
    }
  }
  return out;
}

GridFunction TransferOperator::apply_weighted(const GridFunction& w, const GridFunction& g) const {
  return apply_tabulated(w, weight_table(g), true);
}

PowerIterationResult TransferOperator::leading_eigenvalue(double t) const {
  if (!std::isfinite(t) || std::abs(t) > t_max_)
    throw ValidationError("t-out-of-range", "leading_eigenvalue requires |t| <= t_max");
  const auto wt = weight_table(Complex(t, 0.0));
  const int max_iter = 100000;

  GridFunction w = unit_function();
  std::vector<double> trace;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double prev2 = std::numeric_limits<double>::quiet_NaN();
  int oscillating = 0;
  for (int it = 1; it <= max_iter; ++it) {
    GridFunction v = apply_tabulated(w, wt, true);
    double beta = sup_norm(v);
    if (!std::isfinite(beta) || beta <= 0.0)
      throw ConvergenceError("power-iteration", "iterate collapsed or overflowed",
                             trace_tail(trace));
    v *= Complex(1.0 / beta, 0.0);
    w = std::move(v);
    trace.push_back(beta);
    double scale = std::max(1.0, std::abs(beta));
    if (it >= 2 && std::abs(beta - prev) < 1e-12 * scale)
      return {beta, std::move(w), it, false};
    if (it >= 3 && std::abs(beta - prev2) < 1e-9 * scale) {
      // Period-2 ratio oscillation: contraction should preclude a non-simple
      // leading eigenvalue, but reducible input cannot be excluded.
      if (++oscillating >= 100) return {(beta + prev) / 2.0, std::move(w), it, true};
    } else {
      oscillating = 0;
    }
    prev2 = prev;
    prev = beta;
  }
  throw ConvergenceError("power-iteration",
                         "leading eigenvalue did not converge within 1e5 iterations",
                         trace_tail(trace));
}

EigenMeasure TransferOperator::eigenmeasure() const {
  const int k = chain_.k();
  const size_t total = static_cast<size_t>(k) * n_;
  std::vector<double> nu(total), out(total);
  for (int i = 0; i < k; ++i)
    for (int m = 0; m < n_; ++m)
      nu[static_cast<size_t>(i) * n_ + m] = chain_.stationary(i) / n_;

  std::vector<double> trace;
  for (int it = 1; it <= 200000; ++it) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < k; ++i) {
      for (int m = 0; m < n_; ++m) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += chain_.backward(i, j) * nu[static_cast<size_t>(j) * n_ + m];
        const InterpCoef& c = coef_[static_cast<size_t>(i) * n_ + m];
        size_t base = static_cast<size_t>(i) * n_;
        if (c.frac == 0.0) {
          out[base + c.idx] += s;
        } else {
          int next = c.idx + 1 == n_ ? 0 : c.idx + 1;
          out[base + c.idx] += s * (1.0 - c.frac);
          out[base + next] += s * c.frac;
        }
      }
    }
    double mass = 0.0;
    for (double v : out) mass += v;
    double inv = 1.0 / mass;
    double resid = 0.0;
    for (size_t idx = 0; idx < total; ++idx) {
      out[idx] *= inv;
      resid += std::abs(out[idx] - nu[idx]);
    }
    nu.swap(out);
    trace.push_back(resid);
    if (resid < 1e-13) {
      EigenMeasure measure(k, n_, std::move(nu));
      for (int i = 0; i < k; ++i)
        if (std::abs(measure.symbol_mass(i) - chain_.stationary(i)) > 1e-8)
          throw ConvergenceError("eigenmeasure-marginal",
                                 "eigenmeasure symbol marginal drifted from the stationary vector",
                                 trace_tail(trace));
      return measure;
    }
  }
  throw ConvergenceError("eigenmeasure",
                         "adjoint fixed point did not converge within 2e5 iterations",
                         trace_tail(trace));
}

double TransferOperator::lyapunov_via_perturbation(const EigenMeasure& nu) const {
  if (nu.k() != chain_.k() || nu.n_grid() != n_)
    throw ValidationError("grid-mismatch", "eigenmeasure shape must match the operator");
  const int k = chain_.k();
  double gamma = 0.0;
  for (int j = 0; j < k; ++j) {
    for (int m = 0; m < n_; ++m) {
      double inner = 0.0;
      for (int i = 0; i < k; ++i) inner += chain_.backward(i, j) * gain_[static_cast<size_t>(i) * n_ + m];
      gamma += nu.weight(j, m) * inner;
    }
  }
  return gamma;
}

BetaDerivativeResult TransferOperator::lyapunov_via_beta_derivative(double h) const {
  if (!(h >= 1e-5 && h <= 1e-1))
    throw ValidationError("bad-step", "finite-difference step must lie in [1e-5, 1e-1]");
  auto diff = [this](double step) {
    double plus = leading_eigenvalue(step).beta;
    double minus = leading_eigenvalue(-step).beta;
    return (std::log(plus) - std::log(minus)) / (2.0 * step);
  };
  double raw = diff(h);
  double raw_half = diff(h / 2.0);
  return {h, raw, raw_half, (4.0 * raw_half - raw) / 3.0};
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SpectralGapResult TransferOperator::spectral_gap(const std::vector<GridFunction>& probes,
                                                 int n_max, const EigenMeasure& nu, int fit_lo,
                                                 int fit_hi) const {
  if (probes.empty()) throw ValidationError("bad-probes", "spectral_gap needs at least one probe");
  if (n_max < fit_lo + 2)
    throw ValidationError("bad-probes", "n_max too small for the fit window");
  fit_hi = std::min(fit_hi, n_max);
  const auto wt = weight_table(Complex(0.0, 0.0));

  SpectralGapResult result;
  result.fit_lo = fit_lo;
  result.fit_hi = fit_hi;
  result.rate = 0.0;
  result.early_zero = true;
  for (const auto& probe : probes) {
    Complex q = q_projection(nu, probe);
    SpectralGapTrace trace;
    trace.residuals.reserve(static_cast<size_t>(n_max));
    GridFunction v = probe;
    for (int n = 1; n <= n_max; ++n) {
      v = apply_tabulated(v, wt, true);
      trace.residuals.push_back(sup_norm_minus_const(v, q));
    }
    std::vector<double> xs, ys;
    for (int n = fit_lo; n <= fit_hi; ++n) {
      double r = trace.residuals[static_cast<size_t>(n - 1)];
      if (r > 1e-13) {
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(r));
      }
    }
    if (xs.size() < 2) {
      trace.early_zero = true;
      trace.rate = 0.0;
    } else {
      trace.early_zero = false;
      trace.rate = std::exp(fit_slope(xs, ys));
      result.early_zero = false;
    }
    result.rate = std::max(result.rate, trace.rate);
    result.probes.push_back(std::move(trace));
  }
  result.no_gap = result.rate >= 0.99;
  return result;
}

LasotaYorkeResult TransferOperator::lasota_yorke_probe(const GridFunction& w, Complex t,
                                                       int n_max) const {
  const bool purely_imaginary = t.real() == 0.0;
  const bool real_t = t.imag() == 0.0;
  if (!purely_imaginary && !real_t)
    throw ValidationError("weight-not-supported", "t must be real or purely imaginary");
  if (n_max < 4) throw ValidationError("bad-probes", "n_max must be >= 4");
  const auto wt = weight_table(t);

  LasotaYorkeResult result;
  result.rows.reserve(static_cast<size_t>(n_max) + 1);
  const double sup0 = sup_norm(w);
  const double semi0 = holder_seminorm(w);
  result.rows.push_back({0, sup0, semi0});
  GridFunction v = w;
  for (int n = 1; n <= n_max; ++n) {
    v = apply_tabulated(v, wt, true);
    result.rows.push_back({n, sup_norm(v), holder_seminorm(v)});
  }

  result.sup_bound_ok = true;
  if (purely_imaginary) {
    for (const auto& row : result.rows)
      if (row.sup > sup0 + 1e-12) result.sup_bound_ok = false;
  }

  // Per-step seminorm decay from the trajectory tail, then the smallest C
  // that makes the bound hold along the whole trajectory.
  std::vector<double> xs, ys;
  for (int n = std::max(2, n_max / 4); n <= n_max; ++n) {
    double s = result.rows[static_cast<size_t>(n)].seminorm;
    if (s > 1e-13) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(s));
    }
  }
  result.delta = xs.size() < 2 ? 0.0 : std::exp(fit_slope(xs, ys));
  double c_best = 0.0;
  double sup_floor = std::max(sup0, 1e-300);
  for (int n = 1; n <= n_max; ++n) {
    double s = result.rows[static_cast<size_t>(n)].seminorm;
    c_best = std::max(c_best, (s - std::pow(result.delta, n) * semi0) / sup_floor);
  }
  result.big_c = std::max(0.0, c_best);
  double max_resid = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    double s = result.rows[static_cast<size_t>(n)].seminorm;
    max_resid = std::max(max_resid, s - (result.big_c * sup0 + std::pow(result.delta, n) * semi0));
  }
  result.max_residual = max_resid;
  result.contraction = result.delta < 0.99;
  return result;
}

Complex q_projection(const EigenMeasure& nu, const GridFunction& w) {
  if (nu.k() != w.k() || nu.n_grid() != w.n_grid())
    throw ValidationError("grid-mismatch", "eigenmeasure and grid function shapes differ");
  Complex total(0.0, 0.0);
  for (int i = 0; i < w.k(); ++i)
    for (int m = 0; m < w.n_grid(); ++m) total += nu.weight(i, m) * w.value(i, m);
  return total;
}

}  // namespace lyap
