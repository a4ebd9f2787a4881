// Acceptance suite: runs every shipped correctness criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "lyap/diagnostics.hpp"
#include "lyap/errors.hpp"
#include "lyap/montecarlo.hpp"
#include "lyap/transfer.hpp"
#include "test_families.hpp"

using namespace lyap;
using namespace lyap::testing;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += msg;
    }
  }
};

int g_failures = 0;

void criterion(int id, const std::string& label, const std::function<void(Checker&)>& body) {
  Checker check;
  try {
    body(check);
  } catch (const std::exception& e) {
    check.require(false, std::string("exception: ") + e.what());
  }
  if (check.ok) {
    std::printf("PASS  %2d  %s\n", id, label.c_str());
  } else {
    std::printf("FAIL  %2d  %s  [%s]\n", id, label.c_str(), check.detail.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

MarkovChainSpec random_chain(RngStream& rng, int k) {
  std::vector<std::vector<double>> t(static_cast<size_t>(k), std::vector<double>(k));
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (int j = 0; j < k; ++j) {
      t[static_cast<size_t>(i)][static_cast<size_t>(j)] = rng.uniform(0.05, 1.0);
      row += t[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    for (int j = 0; j < k; ++j) t[static_cast<size_t>(i)][static_cast<size_t>(j)] /= row;
  }
  return MarkovChainSpec::build(t);
}

InvertibleMatrix random_invertible2(RngStream& rng, double scale) {
  for (;;) {
    std::vector<double> entries(4);
    for (auto& e : entries) e = rng.uniform(-scale, scale);
    try {
      return InvertibleMatrix(std::move(entries), 2);
    } catch (const ValidationError&) {
    }
  }
}

MatrixFamily random_family(RngStream& rng, int k, double scale) {
  std::vector<InvertibleMatrix> mats;
  for (int i = 0; i < k; ++i) mats.push_back(random_invertible2(rng, scale));
  return MatrixFamily(std::move(mats));
}

double ell_raw(const Mat& m) {
  auto sigma = singular_values(m);
  return std::max(log_plus(sigma.front()), log_plus(1.0 / sigma.back()));
}

}  // namespace

int main() {
  const MarkovChainSpec chain = bench_chain();
  const MatrixFamily conformal = conformal_family();
  const MatrixFamily contracting = contracting_family();
  const double gamma_exact = conformal_exact_gamma();
  const int n_grid = 1024;

  criterion(1, "conformal benchmark: all four gamma routes within tolerance, < 30 s", [&](Checker& c) {
    auto start = std::chrono::steady_clock::now();

    TransferOperator op(conformal, chain, n_grid);
    EigenMeasure nu = op.eigenmeasure();
    double pert = op.lyapunov_via_perturbation(nu);
    c.require(std::abs(pert - gamma_exact) <= 1e-6,
              "perturbation route off by " + num(std::abs(pert - gamma_exact)));
    double deriv = op.lyapunov_via_beta_derivative(1e-3).extrapolated;
    c.require(std::abs(deriv - gamma_exact) <= 1e-6,
              "beta-derivative route off by " + num(std::abs(deriv - gamma_exact)));

    auto sub = estimate_subadditive(conformal, chain, 100000, 64, 20250);
    c.require(std::abs(sub.gamma_hat - gamma_exact) <= 3.0 * sub.std_error,
              "subadditive off by " + num(std::abs(sub.gamma_hat - gamma_exact)) + " vs 3 se = " +
                  num(3.0 * sub.std_error));
    auto fur = estimate_furstenberg(conformal, chain, 100000, 1000, 20251);
    c.require(std::abs(fur.gamma_hat - gamma_exact) <= 3.0 * fur.std_error,
              "furstenberg off by " + num(std::abs(fur.gamma_hat - gamma_exact)) + " vs 3 se = " +
                  num(3.0 * fur.std_error));

    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(seconds < 30.0, "took " + num(seconds) + " s");
  });

  criterion(2, "oracle equivalence of the discretized powers (n = 1..6, N = 1024)", [&](Checker& c) {
    TransferOperator op_contracting(contracting, chain, n_grid);
    for (double t : {0.0, 0.1, -0.1}) {
      GridFunction w = op_contracting.unit_function();
      for (int n = 1; n <= 6; ++n) {
        w = op_contracting.apply(w, Complex(t, 0.0));
        GridFunction exact = enumerate_exact_grid(contracting, chain, n, t, n_grid, 0.5, 0.25);
        double worst = 0.0;
        for (size_t i = 0; i < w.data().size(); ++i)
          worst = std::max(worst, std::abs(w.data()[i] - exact.data()[i]));
        c.require(worst <= 1e-3, "contracting err " + num(worst) + " at n=" + std::to_string(n) +
                                     " t=" + num(t));
      }
    }
    TransferOperator op_conformal(conformal, chain, n_grid);
    for (double t : {0.0, 0.1, -0.1}) {
      GridFunction w = op_conformal.unit_function();
      for (int n = 1; n <= 6; ++n) {
        w = op_conformal.apply(w, Complex(t, 0.0));
        GridFunction exact = enumerate_exact_grid(conformal, chain, n, t, n_grid, 0.5, 0.25);
        double worst = 0.0;
        for (size_t i = 0; i < w.data().size(); ++i)
          worst = std::max(worst, std::abs(w.data()[i] - exact.data()[i]));
        c.require(worst <= 1e-12, "conformal err " + num(worst) + " at n=" + std::to_string(n) +
                                      " t=" + num(t));
      }
    }
  });

  criterion(3, "normalization: L_0 1 = 1 within 1e-14 on 20 random configs", [&](Checker& c) {
    RngStream rng(301, 0);
    for (int trial = 0; trial < 20; ++trial) {
      int k = 1 + static_cast<int>(rng.next_u64() % 3);
      int grid = 64 << (rng.next_u64() % 3);
      MarkovChainSpec rchain = random_chain(rng, k);
      MatrixFamily rfam = random_family(rng, k, 2.0);
      TransferOperator op(rfam, rchain, grid);
      GridFunction out = op.apply(op.unit_function(), Complex(0.0, 0.0));
      double worst = sup_norm_minus_const(out, Complex(1.0, 0.0));
      c.require(worst <= 1e-14, "config " + std::to_string(trial) + " off by " + num(worst));
    }
  });

  criterion(4, "metric distortion: d_X(Mx, My) <= e^{4 ell(M)} d_X(x, y) on 1000 samples",
            [&](Checker& c) {
    RngStream rng(401, 0);
    for (int trial = 0; trial < 1000; ++trial) {
      InvertibleMatrix m = random_invertible2(rng, 5.0);
      ProjPoint x(rng.random_unit_vector(2));
      ProjPoint y(rng.random_unit_vector(2));
      double lhs = proj_metric(proj_action(m, x), proj_action(m, y));
      double rhs = std::exp(4.0 * ell(m)) * proj_metric(x, y) + 1e-9;
      c.require(lhs <= rhs, "violation by " + num(lhs - rhs));
    }
  });

  criterion(5, "ell bounds: subadditivity and ell(psi(n)) <= n K on 1000 products", [&](Checker& c) {
    RngStream rng(501, 0);
    for (int trial = 0; trial < 1000; ++trial) {
      InvertibleMatrix a = random_invertible2(rng, 5.0);
      InvertibleMatrix b = random_invertible2(rng, 5.0);
      c.require(ell_raw(matmul(a.mat(), b.mat())) <= ell(a) + ell(b) + 1e-9,
                "subadditivity violated");
    }
    auto bound = ell_product_bound_check(contracting, chain, 20, 1000, 502);
    c.require(bound.pass, "ell(psi(20)) exceeded 20 K by " + num(bound.max_slack));
  });

  criterion(6, "eigenmeasure duality on 100 band-limited probes (N = 1024)", [&](Checker& c) {
    TransferOperator op(contracting, chain, n_grid);
    EigenMeasure nu = op.eigenmeasure();
    RngStream rng(601, 0);
    for (int probe = 0; probe < 100; ++probe) {
      GridFunction w = random_bandlimited(2, n_grid, 8, rng, 0.5, 0.25);
      double drift = std::abs(q_projection(nu, op.apply(w, Complex(0.0, 0.0))) - q_projection(nu, w));
      double allowed = 5e-6 * sup_norm(w) + 4.0 / n_grid;
      c.require(drift <= allowed, "probe " + std::to_string(probe) + " drift " + num(drift));
    }
  });

  criterion(7, "spectral gap: rate < 0.95 on the contracting benchmark, no-gap flag on rotations",
            [&](Checker& c) {
    TransferOperator op(contracting, chain, n_grid);
    EigenMeasure nu = op.eigenmeasure();
    RngStream rng(701, 0);
    std::vector<GridFunction> probes;
    for (int p = 0; p < 3; ++p) probes.push_back(random_bandlimited(2, n_grid, 6, rng, 0.5, 0.25));
    auto gap = op.spectral_gap(probes, 40, nu);
    c.require(gap.rate < 0.95, "contracting rate " + num(gap.rate));
    c.require(!gap.no_gap, "contracting flagged as gapless");

    TransferOperator rot(single_rotation_family(1.0), trivial_chain(), 512);
    EigenMeasure rot_nu = rot.eigenmeasure();
    std::vector<GridFunction> rot_probes{random_bandlimited(1, 512, 6, rng, 0.5, 0.25)};
    auto rot_gap = rot.spectral_gap(rot_probes, 40, rot_nu);
    c.require(rot_gap.rate >= 0.99, "rotation control rate " + num(rot_gap.rate));
    c.require(rot_gap.no_gap, "rotation control missing the no-gap flag");
  });

  criterion(8, "normalized sup-norm contraction for t in {0.1i, 0.3i}, n <= 50", [&](Checker& c) {
    TransferOperator op(contracting, chain, n_grid);
    RngStream rng(801, 0);
    GridFunction w0 = random_bandlimited(2, n_grid, 6, rng, 0.5, 0.25);
    double sup0 = sup_norm(w0);
    for (double tau : {0.1, 0.3}) {
      GridFunction w = w0;
      for (int n = 1; n <= 50; ++n) {
        w = op.apply(w, Complex(0.0, tau));
        double s = sup_norm(w);
        c.require(s <= sup0 + 1e-12,
                  "sup grew to " + num(s) + " at n=" + std::to_string(n) + " tau=" + num(tau));
      }
    }
  });

  criterion(9, "Lasota-Yorke fit: delta < 1 with consistent residuals over 10 probes",
            [&](Checker& c) {
    TransferOperator op(contracting, chain, n_grid, 0.5, 0.25);
    RngStream rng(901, 0);
    for (int probe = 0; probe < 10; ++probe) {
      GridFunction w = random_bandlimited(2, n_grid, 6, rng, 0.5, 0.25);
      auto ly = op.lasota_yorke_probe(w, Complex(0.0, 0.0), 40);
      c.require(ly.delta < 1.0, "probe " + std::to_string(probe) + " delta " + num(ly.delta));
      c.require(ly.max_residual <= 1e-9,
                "probe " + std::to_string(probe) + " residual " + num(ly.max_residual));
      double sup0 = ly.rows[0].sup, semi0 = ly.rows[0].seminorm;
      for (const auto& row : ly.rows)
        if (row.n >= 1)
          c.require(row.seminorm <= ly.big_c * sup0 + std::pow(ly.delta, row.n) * semi0 + 1e-9,
                    "bound broken at n=" + std::to_string(row.n));
    }
  });

  criterion(10, "determinant closure: gamma_1 + gamma_2 consistency and strict gap", [&](Checker& c) {
    double closure = det_closure_check(contracting, chain);
    auto sub = estimate_subadditive(contracting, chain, 100000, 64, 1001);
    auto fur = estimate_furstenberg(contracting, chain, 100000, 1000, 1002);
    double gamma2 = closure - fur.gamma_hat;
    double combined = 3.0 * std::sqrt(sub.std_error * sub.std_error + fur.std_error * fur.std_error);
    c.require(std::abs(sub.gamma_hat + gamma2 - closure) <= combined,
              "closure residual " + num(std::abs(sub.gamma_hat + gamma2 - closure)) + " vs " +
                  num(combined));
    c.require(gamma2 < sub.gamma_hat,
              "no strict gap: gamma2 " + num(gamma2) + " vs gamma1 " + num(sub.gamma_hat));
  });

  criterion(11, "grid convergence of gamma over N in {512, 1024, 2048}", [&](Checker& c) {
    double gamma_n[3];
    int idx = 0;
    for (int grid : {512, 1024, 2048}) {
      TransferOperator op(contracting, chain, grid);
      gamma_n[idx++] = op.lyapunov_via_perturbation(op.eigenmeasure());
    }
    double coarse = std::abs(gamma_n[1] - gamma_n[0]);
    double fine = std::abs(gamma_n[2] - gamma_n[1]);
    c.require(fine <= 5.0 * coarse, "fine step " + num(fine) + " vs 5x coarse " + num(5.0 * coarse));
    c.require(5.0 * coarse <= 1e-3, "coarse step " + num(coarse));
  });

  criterion(12, "negative controls: reducible and isometric families are detected", [&](Checker& c) {
    MatrixFamily diag = diagonal_family();
    auto irr = irreducibility_heuristic(diag);
    c.require(irr.verdict == IrreducibilityVerdict::fail, "diagonal family not flagged");
    bool has_axis0 = false, has_axis1 = false;
    for (double a : irr.witness_angles) {
      has_axis0 = has_axis0 || std::abs(a) <= 1e-8;
      has_axis1 = has_axis1 || std::abs(a - kPi / 2) <= 1e-8;
    }
    c.require(has_axis0 && has_axis1, "axis witness missing");

    TransferOperator op(diag, chain, 256);
    auto prop = properness_probe(op.eigenmeasure(), 64, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
    c.require(prop.atom_flag, "atoms not flagged by the properness probe");

    auto index = index_probe(orthogonal_family(), chain, 50, 200, 1201);
    c.require(std::abs(index.min - 1.0) <= 1e-9 && std::abs(index.max - 1.0) <= 1e-9,
              "orthogonal ratios deviate from 1");
  });

  std::printf("%s: %d/12 criteria passed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
              12 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
