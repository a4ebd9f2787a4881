#include "lyap/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "lyap/errors.hpp"

namespace lyap {

double grid_angle(int m, int n_grid) { return kPi * static_cast<double>(m) / n_grid; }

ProjPoint grid_point(int m, int n_grid) { return ProjPoint::from_angle(grid_angle(m, n_grid)); }

InterpCoef interp_coef(double angle, int n_grid) {
  double u = angle * static_cast<double>(n_grid) / kPi;
  double base = std::floor(u);
  double frac = u - base;
  int idx = static_cast<int>(base);
  // Snap near-node queries so node evaluation is exact.
  if (frac < 1e-9) {
    frac = 0.0;
  } else if (frac > 1.0 - 1e-9) {
    idx += 1;
    frac = 0.0;
  }
  idx %= n_grid;
  if (idx < 0) idx += n_grid;
  return {idx, frac};
}

GridFunction::GridFunction(int k, int n_grid, double alpha, double theta)
    : k_(k), n_(n_grid), alpha_(alpha), theta_(theta) {
  if (k_ < 1) throw ValidationError("bad-grid", "grid function needs k >= 1 symbols");
  if (n_ < 2) throw ValidationError("bad-grid", "grid function needs at least 2 nodes");
  if (!(alpha_ > 0.0 && alpha_ <= 1.0))
    throw ValidationError("bad-grid", "alpha must lie in (0, 1]");
  if (!(theta_ > 0.0 && theta_ < 1.0)) throw ValidationError("bad-grid", "theta must lie in (0, 1)");
  v_.assign(static_cast<size_t>(k_) * n_, Complex(0.0, 0.0));
}

GridFunction GridFunction::constant(int k, int n_grid, Complex value, double alpha, double theta) {
  GridFunction w(k, n_grid, alpha, theta);
  std::fill(w.v_.begin(), w.v_.end(), value);
  return w;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(Complex c) {
  for (auto& v : v_) v *= c;
  return *this;
}

bool GridFunction::is_real() const {
  for (const auto& v : v_)
    if (v.imag() != 0.0) return false;
  return true;
}

Complex eval(const GridFunction& w, int i, const ProjPoint& x) {
  if (i < 0 || i >= w.k()) throw ValidationError("symbol-out-of-range", "symbol index out of range");
  InterpCoef c = interp_coef(angle_chart(x), w.n_grid());
  if (c.frac == 0.0) return w.value(i, c.idx);
  int next = c.idx + 1 == w.n_grid() ? 0 : c.idx + 1;
  return (1.0 - c.frac) * w.value(i, c.idx) + c.frac * w.value(i, next);
}

double sup_norm(const GridFunction& w) {
  double best = 0.0;
  for (const auto& v : w.data()) best = std::max(best, std::abs(v));
  return best;
}

double sup_norm_minus_const(const GridFunction& w, Complex c) {
  double best = 0.0;
  for (const auto& v : w.data()) best = std::max(best, std::abs(v - c));
  return best;
}

namespace {

constexpr int kExactPairLimit = 2048;    // all-pairs x-scan up to this N
constexpr long kSampledPairBudget = 2000000;  // ~1e6 sampled pairs above

double abs2(Complex z) {
  double re = z.real(), im = z.imag();
  return re * re + im * im;
}

// Symbol part: distinct first symbols sit at distance theta^0 = 1, and mixed
// pairs cannot beat the two pure parts because the denominators add.
double symbol_part(const GridFunction& w) {
  double best2 = 0.0;
  for (int i = 0; i < w.k(); ++i)
    for (int j = i + 1; j < w.k(); ++j)
      for (int m = 0; m < w.n_grid(); ++m)
        best2 = std::max(best2, abs2(w.value(i, m) - w.value(j, m)));
  return std::sqrt(best2);
}

int samples_per_offset(int n) {
  return static_cast<int>(std::max<long>(1, kSampledPairBudget / n));
}

size_t sampled_base(int o, int j, int n) {
  return (static_cast<size_t>(o) * 2654435761ULL + static_cast<size_t>(j) * 40503ULL) %
         static_cast<size_t>(n);
}

}  // namespace

double holder_seminorm(const GridFunction& w) {
  const int n = w.n_grid();
  const int k = w.k();
  const int half = n / 2;
  std::vector<double> denom(static_cast<size_t>(half) + 1, 1.0);
  for (int o = 1; o <= half; ++o)
    denom[static_cast<size_t>(o)] = std::pow(std::sin(grid_angle(o, n)), w.alpha());

  const bool exact = n <= kExactPairLimit;
  const int per_offset = exact ? 0 : samples_per_offset(n);
  double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (int o = 1; o <= half; ++o) {
    double diff2 = 0.0;
    for (int i = 0; i < k; ++i) {
      if (exact) {
        for (int m = 0; m < n; ++m) {
          int m2 = m + o;
          if (m2 >= n) m2 -= n;
          diff2 = std::max(diff2, abs2(w.value(i, m) - w.value(i, m2)));
        }
      } else {
        for (int j = 0; j < per_offset; ++j) {
          int m = static_cast<int>(sampled_base(o, j, n));
          int m2 = m + o;
          if (m2 >= n) m2 -= n;
          diff2 = std::max(diff2, abs2(w.value(i, m) - w.value(i, m2)));
        }
      }
    }
    best = std::max(best, std::sqrt(diff2) / denom[static_cast<size_t>(o)]);
  }
  return std::max(best, symbol_part(w));
}

double holder_seminorm_serial(const GridFunction& w) {
  // Straightforward pair loop kept as the reference for the kernel above;
  // distances come from proj_metric on the actual grid points.
  const int n = w.n_grid();
  const int k = w.k();
  std::vector<ProjPoint> nodes;
  nodes.reserve(static_cast<size_t>(n));
  for (int m = 0; m < n; ++m) nodes.push_back(grid_point(m, n));

  const bool exact = n <= kExactPairLimit;
  const int per_offset = exact ? 0 : samples_per_offset(n);
  double best = 0.0;
  for (int o = 1; o <= n / 2; ++o) {
    auto consider = [&](int m) {
      int m2 = (m + o) % n;
      double dx = std::pow(proj_metric(nodes[static_cast<size_t>(m)], nodes[static_cast<size_t>(m2)]),
                           w.alpha());
      for (int i = 0; i < k; ++i)
        best = std::max(best, std::abs(w.value(i, m) - w.value(i, m2)) / dx);
    };
    if (exact) {
      for (int m = 0; m < n; ++m) consider(m);
    } else {
      for (int j = 0; j < per_offset; ++j) consider(static_cast<int>(sampled_base(o, j, n)));
    }
  }
  return std::max(best, symbol_part(w));
}

GridFunction random_bandlimited(int k, int n_grid, int max_freq, RngStream& rng, double alpha,
                                double theta) {
  GridFunction w(k, n_grid, alpha, theta);
  for (int i = 0; i < k; ++i) {
    double offset = rng.uniform(-0.5, 0.5);
    std::vector<double> ca(static_cast<size_t>(max_freq) + 1, 0.0);
    std::vector<double> cb(static_cast<size_t>(max_freq) + 1, 0.0);
    for (int f = 1; f <= max_freq; ++f) {
      ca[static_cast<size_t>(f)] = rng.uniform(-1.0, 1.0) / f;
      cb[static_cast<size_t>(f)] = rng.uniform(-1.0, 1.0) / f;
    }
    for (int m = 0; m < n_grid; ++m) {
      double t = grid_angle(m, n_grid);
      double v = offset;
      for (int f = 1; f <= max_freq; ++f)
        v += ca[static_cast<size_t>(f)] * std::cos(2.0 * f * t) +
             cb[static_cast<size_t>(f)] * std::sin(2.0 * f * t);
      w.value(i, m) = Complex(v, 0.0);
    }
  }
  double s = sup_norm(w);
  if (s > 0.0) w *= Complex(1.0 / s, 0.0);
  return w;
}

}  // namespace lyap
