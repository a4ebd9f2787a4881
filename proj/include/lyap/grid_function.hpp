#pragma once

#include <complex>
#include <span>
#include <vector>

#include "lyap/projective.hpp"
#include "lyap/rng.hpp"

namespace lyap {

using Complex = std::complex<double>;

// Angle node m of an N-point grid on RP^1: theta_m = m * pi / N. Node N is
// identified with node 0 (period-pi wraparound).
double grid_angle(int m, int n_grid);
ProjPoint grid_point(int m, int n_grid);

// Linear interpolation target: value(angle) = (1-frac) * v[idx] + frac * v[idx+1 mod N].
// Queries within 1e-9 grid units of a node snap to it, so node queries are exact.
struct InterpCoef {
  int idx;
  double frac;
};
InterpCoef interp_coef(double angle, int n_grid);

// Discretized element of the Hölder space: k arrays of N complex values over
// the angle grid, tagged with the Hölder exponent alpha and the symbol-metric
// base theta.
class GridFunction {
 public:
  GridFunction(int k, int n_grid, double alpha, double theta);

  static GridFunction constant(int k, int n_grid, Complex value, double alpha, double theta);

  int k() const { return k_; }
  int n_grid() const { return n_; }
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }

  Complex value(int i, int m) const { return v_[static_cast<size_t>(i) * n_ + m]; }
  Complex& value(int i, int m) { return v_[static_cast<size_t>(i) * n_ + m]; }
  const std::vector<Complex>& data() const { return v_; }
  std::vector<Complex>& data() { return v_; }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(Complex c);

  // True if every stored imaginary part is exactly zero.
  bool is_real() const;

 private:
  int k_ = 0, n_ = 0;
  double alpha_ = 0.5, theta_ = 0.25;
  std::vector<Complex> v_;
};

/// Interpolating evaluation at an arbitrary line; exact at grid nodes. d = 2.
Complex eval(const GridFunction& w, int i, const ProjPoint& x);

/// max |value| over all symbols and nodes.
double sup_norm(const GridFunction& w);

/// max |value - c| over all symbols and nodes.
double sup_norm_minus_const(const GridFunction& w, Complex c);

// Discrete |.|_{theta,alpha} seminorm: max of the x-part
// |w(i,x_m)-w(i,x_m')| / d_X^alpha(x_m,x_m') over node pairs and of the
// symbol-part |w(i,x_m)-w(j,x_m)| over symbol pairs (distinct first symbols
// sit at symbol-metric distance 1). All pairs are scanned for N <= 2048, a
// deterministic stratified sample of ~1e6 pairs above.
double holder_seminorm(const GridFunction& w);
double holder_seminorm_serial(const GridFunction& w);  // reference kernel

/// Random real trigonometric polynomial (period pi, frequencies <= 2*max_freq),
/// used as probe input for the operator diagnostics.
GridFunction random_bandlimited(int k, int n_grid, int max_freq, RngStream& rng, double alpha,
                                double theta);

}  // namespace lyap
