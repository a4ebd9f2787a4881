#include "lyap/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "lyap/errors.hpp"
#include "lyap/projective.hpp"
#include "lyap/rng.hpp"

namespace lyap {

namespace {

constexpr int kRenormEvery = 32;

void check_family_chain(const MatrixFamily& family, const MarkovChainSpec& chain) {
  if (family.size() != chain.k())
    throw ValidationError("family-chain-mismatch",
                          "matrix count must equal the chain's symbol count");
}

double norm2_of(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return s;
}

// d_X of the images [Mu], [Mv] from the unnormalized images directly:
// ||u ^ v|| / (||u|| ||v||).
double image_metric(std::span<const double> u, std::span<const double> v) {
  double wedge2 = 0.0;
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j) {
      double w = u[i] * v[j] - u[j] * v[i];
      wedge2 += w * w;
    }
  return std::min(1.0, std::sqrt(wedge2 / (norm2_of(u) * norm2_of(v))));
}

}  // namespace

std::vector<ContractionRow> contraction_average(const MatrixFamily& family,
                                                const MarkovChainSpec& chain, int n_max, int pairs,
                                                double alpha, uint64_t seed) {
  check_family_chain(family, chain);
  if (n_max < 1) throw ValidationError("bad-count", "n_max must be >= 1");
  if (pairs < 100) throw ValidationError("bad-count", "need at least 100 pairs");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("bad-grid", "alpha must lie in (0, 1]");

  const int d = family.dim();
  const int n_paths = 160;

  // Pairs stratified over separations, from pi/2 down to ~1e-6 radians.
  std::vector<std::vector<double>> xs(static_cast<size_t>(pairs)), ys(static_cast<size_t>(pairs));
  std::vector<double> d0(static_cast<size_t>(pairs));
  for (int p = 0; p < pairs; ++p) {
    RngStream rng(seed, 1000000u + static_cast<uint64_t>(p));
    std::vector<double> x = rng.random_unit_vector(d);
    std::vector<double> t(static_cast<size_t>(d));
    double tn = 0.0;
    do {
      t = rng.random_unit_vector(d);
      double dot = 0.0;
      for (int i = 0; i < d; ++i) dot += t[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
      for (int i = 0; i < d; ++i) t[static_cast<size_t>(i)] -= dot * x[static_cast<size_t>(i)];
      tn = std::sqrt(norm2_of(t));
    } while (tn < 1e-8);
    for (double& c : t) c /= tn;
    double delta = 0.5 * kPi * std::pow(10.0, -6.0 * p / std::max(1, pairs - 1));
    std::vector<double> y(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i)
      y[static_cast<size_t>(i)] = std::cos(delta) * x[static_cast<size_t>(i)] +
                                  std::sin(delta) * t[static_cast<size_t>(i)];
    xs[static_cast<size_t>(p)] = std::move(x);
    ys[static_cast<size_t>(p)] = std::move(y);
    d0[static_cast<size_t>(p)] = std::sin(delta);
  }

  // acc[path][n][pair]; merged in path order so the result is reproducible
  // for any worker count.
  std::vector<double> acc(static_cast<size_t>(n_paths) * n_max * pairs, 0.0);
#pragma omp parallel for schedule(static)
  for (int path = 0; path < n_paths; ++path) {
    RngStream rng(seed, static_cast<uint64_t>(path));
    Mat prod(d), scratch(d);
    std::vector<double> u(static_cast<size_t>(d)), v(static_cast<size_t>(d));
    int sym = 0;
    double* slice = acc.data() + static_cast<size_t>(path) * n_max * pairs;
    for (int n = 1; n <= n_max; ++n) {
      sym = n == 1 ? chain.sample_initial(rng) : chain.sample_step(sym, rng);
      if (n == 1) {
        prod = family[sym].mat();
      } else {
        matmul_into(prod, family[sym].mat(), scratch);
        prod.a.swap(scratch.a);
      }
      if (n % kRenormEvery == 0) scale_in_place(prod, 1.0 / max_abs(prod));
      for (int p = 0; p < pairs; ++p) {
        matvec(prod, xs[static_cast<size_t>(p)], u);
        matvec(prod, ys[static_cast<size_t>(p)], v);
        double ratio = image_metric(u, v) / d0[static_cast<size_t>(p)];
        slice[static_cast<size_t>(n - 1) * pairs + p] += std::pow(ratio, alpha);
      }
    }
  }

  std::vector<ContractionRow> table;
  table.reserve(static_cast<size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
      double mean = 0.0;
      for (int path = 0; path < n_paths; ++path)
        mean += acc[(static_cast<size_t>(path) * n_max + (n - 1)) * pairs + p];
      mean /= static_cast<double>(n_paths);
      worst = std::max(worst, mean);
    }
    table.push_back({n, worst, std::pow(worst, 1.0 / n)});
  }
  return table;
}

IndexProbeResult index_probe(const MatrixFamily& family, const MarkovChainSpec& chain, int n,
                             int samples, uint64_t seed) {
  check_family_chain(family, chain);
  if (n < 1) throw ValidationError("bad-count", "n must be >= 1");
  if (samples < 2) throw ValidationError("bad-count", "samples must be >= 2");

  const int d = family.dim();
  std::vector<double> ratios(static_cast<size_t>(samples));
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < samples; ++s) {
    RngStream rng(seed, static_cast<uint64_t>(s));
    Mat prod(d), scratch(d);
    int sym = 0;
    for (int m = 1; m <= n; ++m) {
      sym = m == 1 ? chain.sample_initial(rng) : chain.sample_step(sym, rng);
      if (m == 1) {
        prod = family[sym].mat();
      } else {
        matmul_into(prod, family[sym].mat(), scratch);
        prod.a.swap(scratch.a);
      }
      if (m % kRenormEvery == 0) scale_in_place(prod, 1.0 / max_abs(prod));
    }
    auto sigma = singular_values(prod);
    ratios[static_cast<size_t>(s)] = sigma[1] / sigma[0];
  }
  std::sort(ratios.begin(), ratios.end());
  IndexProbeResult result;
  result.n = n;
  result.min = ratios.front();
  result.max = ratios.back();
  result.median = samples % 2 == 1
                      ? ratios[static_cast<size_t>(samples / 2)]
                      : 0.5 * (ratios[static_cast<size_t>(samples / 2) - 1] +
                               ratios[static_cast<size_t>(samples / 2)]);
  result.ratios = std::move(ratios);
  return result;
}

PropernessResult properness_probe(const EigenMeasure& nu, int directions,
                                  const std::vector<double>& eps_grid) {
  if (directions < 1) throw ValidationError("bad-count", "directions must be >= 1");
  if (eps_grid.empty()) throw ValidationError("bad-count", "eps grid must be non-empty");
  const int n = nu.n_grid();

  std::vector<double> total(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < nu.k(); ++i)
    for (int m = 0; m < n; ++m) total[static_cast<size_t>(m)] += nu.weight(i, m);

  // Evenly spread candidate lines plus the heaviest nodes, so atoms cannot
  // fall between sampled directions.
  std::vector<double> centers;
  for (int c = 0; c < directions; ++c)
    centers.push_back((c + 0.5) * kPi / directions);
  std::vector<int> order(static_cast<size_t>(n));
  for (int m = 0; m < n; ++m) order[static_cast<size_t>(m)] = m;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return total[static_cast<size_t>(a)] > total[static_cast<size_t>(b)]; });
  for (int r = 0; r < std::min(8, n); ++r) {
    int m = order[static_cast<size_t>(r)];
    if (total[static_cast<size_t>(m)] > 1e-6) centers.push_back(grid_angle(m, n));
  }

  PropernessResult result;
  result.eps_grid = eps_grid;
  result.max_mass.assign(eps_grid.size(), 0.0);
  for (double center : centers) {
    PropernessCurve curve;
    curve.center_angle = center;
    for (size_t e = 0; e < eps_grid.size(); ++e) {
      double reach = std::asin(std::min(1.0, eps_grid[e]));
      double mass = 0.0;
      for (int m = 0; m < n; ++m) {
        double raw = std::abs(grid_angle(m, n) - center);
        raw = std::fmod(raw, kPi);
        double dist = std::min(raw, kPi - raw);
        if (dist <= reach + 1e-15) mass += total[static_cast<size_t>(m)];
      }
      curve.mass.push_back(mass);
      result.max_mass[e] = std::max(result.max_mass[e], mass);
    }
    result.curves.push_back(std::move(curve));
  }

  size_t smallest = 0;
  for (size_t e = 1; e < eps_grid.size(); ++e)
    if (eps_grid[e] < eps_grid[smallest]) smallest = e;
  result.atom_flag = result.max_mass[smallest] >= 0.05;
  return result;
}

namespace {

void collect_eigenlines(const Mat& m, std::vector<ProjPoint>& lines) {
  double a = m.at(0, 0), b = m.at(0, 1), c = m.at(1, 0), dd = m.at(1, 1);
  double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(dd);
  if (scale == 0.0) return;
  // Multiples of the identity fix every line; they carry no direction info.
  if (std::abs(b) <= 1e-13 * scale && std::abs(c) <= 1e-13 * scale &&
      std::abs(a - dd) <= 1e-13 * scale)
    return;
  double tr = a + dd;
  double det = a * dd - b * c;
  double disc = tr * tr - 4.0 * det;
  if (disc < -1e-13 * scale * scale) return;  // complex pair, no real eigenline
  double root = std::sqrt(std::max(0.0, disc));
  for (double lambda : {0.5 * (tr + root), 0.5 * (tr - root)}) {
    double v1[2] = {b, lambda - a};
    double v2[2] = {lambda - dd, c};
    double n1 = v1[0] * v1[0] + v1[1] * v1[1];
    double n2 = v2[0] * v2[0] + v2[1] * v2[1];
    const double* v = n1 >= n2 ? v1 : v2;
    double nn = std::max(n1, n2);
    if (nn <= 1e-20 * scale * scale) continue;
    lines.emplace_back(std::vector<double>{v[0], v[1]});
  }
}

bool contains_line(const std::vector<ProjPoint>& set, const ProjPoint& x, double tol) {
  for (const auto& p : set)
    if (proj_metric(p, x) <= tol) return true;
  return false;
}

}  // namespace

IrreducibilityResult irreducibility_heuristic(const MatrixFamily& family, int max_len, double tol,
                                              int cap) {
  if (family.dim() != 2)
    throw ValidationError("unsupported-dimension", "irreducibility heuristic requires d = 2");
  const int k = family.size();

  // Real eigendirections of every product up to length max_len. Any finite
  // invariant line family consists of lines periodic under short products,
  // so these seeds see it.
  std::vector<ProjPoint> seeds;
  std::vector<Mat> current, next;
  current.push_back(Mat::identity(2));
  for (int len = 1; len <= max_len; ++len) {
    next.clear();
    for (const Mat& prefix : current)
      for (int i = 0; i < k; ++i) {
        Mat prod = matmul(prefix, family[i].mat());
        collect_eigenlines(prod, seeds);
        next.push_back(std::move(prod));
      }
    current.swap(next);
  }
  std::vector<ProjPoint> unique_seeds;
  for (const auto& s : seeds)
    if (!contains_line(unique_seeds, s, tol)) unique_seeds.push_back(s);

  IrreducibilityResult result;
  result.seed_lines = static_cast<int>(unique_seeds.size());
  bool fallback = unique_seeds.empty();
  if (fallback) {
    unique_seeds.push_back(ProjPoint::axis(2, 0));
    result.note = "no real eigendirections among short products; seeded with a fixed line";
  }

  std::vector<ProjPoint> witness;
  bool any_closed = false;
  for (const auto& seed : unique_seeds) {
    std::vector<ProjPoint> orbit{seed};
    bool escaped = false;
    for (size_t head = 0; head < orbit.size() && !escaped; ++head) {
      ProjPoint line = orbit[head];
      for (int i = 0; i < k; ++i) {
        ProjPoint image = proj_action(family[i], line);
        if (!contains_line(orbit, image, tol)) {
          orbit.push_back(image);
          if (static_cast<int>(orbit.size()) > cap) {
            escaped = true;
            break;
          }
        }
      }
    }
    if (!escaped) {
      any_closed = true;
      for (const auto& p : orbit)
        if (!contains_line(witness, p, tol)) witness.push_back(p);
    }
  }

  if (any_closed) {
    result.verdict = IrreducibilityVerdict::fail;
    for (const auto& p : witness) result.witness_angles.push_back(angle_chart(p));
    std::sort(result.witness_angles.begin(), result.witness_angles.end());
  } else if (!fallback) {
    result.verdict = IrreducibilityVerdict::pass;
  } else {
    result.verdict = IrreducibilityVerdict::inconclusive;
  }
  return result;
}

EllBoundResult ell_product_bound_check(const MatrixFamily& family, const MarkovChainSpec& chain,
                                       int n, int samples, uint64_t seed) {
  check_family_chain(family, chain);
  if (n < 1) throw ValidationError("bad-count", "n must be >= 1");
  if (samples < 1) throw ValidationError("bad-count", "samples must be >= 1");

  const int d = family.dim();
  const double bound = n * family.max_ell();
  std::vector<double> slack(static_cast<size_t>(samples));
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < samples; ++s) {
    RngStream rng(seed, static_cast<uint64_t>(s));
    Mat prod(d), scratch(d);
    double log_scale = 0.0;
    int sym = 0;
    for (int m = 1; m <= n; ++m) {
      sym = m == 1 ? chain.sample_initial(rng) : chain.sample_step(sym, rng);
      if (m == 1) {
        prod = family[sym].mat();
      } else {
        matmul_into(prod, family[sym].mat(), scratch);
        prod.a.swap(scratch.a);
      }
      if (m % kRenormEvery == 0) {
        double sc = max_abs(prod);
        log_scale += std::log(sc);
        scale_in_place(prod, 1.0 / sc);
      }
    }
    auto sigma = singular_values(prod);
    double log_s1 = log_scale + std::log(sigma.front());
    double log_sd = log_scale + std::log(sigma.back());
    double ell_n = std::max(std::max(log_s1, 0.0), std::max(-log_sd, 0.0));
    slack[static_cast<size_t>(s)] = ell_n - bound;
  }
  EllBoundResult result;
  result.samples = samples;
  result.max_slack = *std::max_element(slack.begin(), slack.end());
  result.pass = result.max_slack <= 1e-9;
  return result;
}

double det_closure_check(const MatrixFamily& family, const MarkovChainSpec& chain) {
  check_family_chain(family, chain);
  if (family.dim() != 2)
    throw ValidationError("unsupported-dimension", "determinant closure requires d = 2");
  double total = 0.0;
  for (int i = 0; i < family.size(); ++i)
    total += chain.stationary(i) * std::log(std::abs(family[i].det()));
  return total;
}

}  // namespace lyap
