#include "lyap/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lyap/diagnostics.hpp"
#include "lyap/errors.hpp"
#include "lyap/markov.hpp"
#include "lyap/matrix.hpp"
#include "lyap/montecarlo.hpp"
#include "lyap/transfer.hpp"

namespace lyap {

using nlohmann::json;

namespace {

// Stage-id constants feeding derive_seed so stages never share RNG streams.
enum : uint64_t {
  kSeedSubadditive = 101,
  kSeedFurstenberg = 102,
  kSeedGapProbes = 103,
  kSeedContraction = 104,
  kSeedIndex = 105,
  kSeedEllBound = 106,
  kSeedLyProbe = 107,
};

class StageClock {
 public:
  explicit StageClock(json& timings) : timings_(timings) {}

  template <class Fn>
  auto time(const std::string& stage, Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(stage, start);
    } else {
      auto value = fn();
      record(stage, start);
      return value;
    }
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
    timings_[stage] = ms;
  }

  json& timings_;
};

void csv_row(std::ostringstream& csv, const std::string& method, long n, double value,
             const std::string& stderr_field = "") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  csv << method << ',' << n << ',' << buf << ',' << stderr_field << '\n';
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json estimate_json(const EstimateResult& r) {
  // The batch-means error bar is a serial-correlation proxy, not a CLT bound.
  const char* se_method =
      r.method == "furstenberg" ? "batch means (heuristic)" : "replica variance";
  return json{{"gamma", r.gamma_hat},
              {"std_error", r.std_error},
              {"std_error_method", se_method},
              {"n_steps", r.n_steps},
              {"n_replicas", r.n_replicas},
              {"method", r.method},
              {"trace", r.trace}};
}

MatrixFamily build_family(const RunConfig& cfg) {
  if (cfg.matrices.empty())
    throw ValidationError("config-schema", "at least one matrix is required");
  std::vector<InvertibleMatrix> mats;
  mats.reserve(cfg.matrices.size());
  for (const auto& entries : cfg.matrices) {
    int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(entries.size()))));
    if (static_cast<size_t>(d) * static_cast<size_t>(d) != entries.size())
      throw ValidationError("config-schema", "matrix entry count must be a perfect square");
    mats.emplace_back(entries, d);
  }
  return MatrixFamily(std::move(mats));
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  try {
    if (j.contains("schema_version")) {
      if (!j.at("schema_version").is_string() || j.at("schema_version").get<std::string>() != "1")
        throw ValidationError("config-schema", "unsupported schema_version (expected \"1\")");
    }
    cfg.matrices = j.at("matrices").get<std::vector<std::vector<double>>>();
    cfg.transition = j.at("transition").get<std::vector<std::vector<double>>>();
    cfg.mode = j.value("mode", cfg.mode);
    cfg.grid_n = j.value("grid_n", cfg.grid_n);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.theta = j.value("theta", cfg.theta);
    cfg.t_step = j.value("t_step", cfg.t_step);
    cfg.t_max = j.value("t_max", cfg.t_max);
    if (j.contains("mc")) {
      const auto& m = j.at("mc");
      cfg.mc.n = m.value("n", cfg.mc.n);
      cfg.mc.replicas = m.value("replicas", cfg.mc.replicas);
      cfg.mc.burn_in = m.value("burn_in", cfg.mc.burn_in);
    }
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      cfg.oracle.n = o.value("n", cfg.oracle.n);
      cfg.oracle.t = o.value("t", cfg.oracle.t);
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.strict_full_shift = j.value("strict_full_shift", cfg.strict_full_shift);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
  } catch (const json::exception& e) {
    throw ValidationError("config-parse", e.what());
  }
  static const char* kModes[] = {"estimate", "spectrum", "diagnose", "oracle", "all"};
  bool known = false;
  for (const char* m : kModes) known = known || cfg.mode == m;
  if (!known) throw ValidationError("config-schema", "unknown mode: " + cfg.mode);
  return cfg;
}

json RunConfig::to_json() const {
  return json{{"schema_version", "1"},
              {"matrices", matrices},
              {"transition", transition},
              {"mode", mode},
              {"grid_n", grid_n},
              {"alpha", alpha},
              {"theta", theta},
              {"t_step", t_step},
              {"t_max", t_max},
              {"mc", json{{"n", mc.n}, {"replicas", mc.replicas}, {"burn_in", mc.burn_in}}},
              {"oracle", json{{"n", oracle.n}, {"t", oracle.t}}},
              {"seed", seed},
              {"workers", workers},
              {"strict_full_shift", strict_full_shift},
              {"out_dir", out_dir}};
}

RunOutput run(const RunConfig& cfg) {
#ifdef _OPENMP
  if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
#endif

  MatrixFamily family = build_family(cfg);
  MarkovChainSpec chain = MarkovChainSpec::build(cfg.transition, cfg.strict_full_shift);
  if (family.size() != chain.k())
    throw ValidationError("config-schema", "matrix count must equal the transition dimension");
  const int d = family.dim();

  const bool want_estimate = cfg.mode == "estimate" || cfg.mode == "all";
  const bool want_spectrum = cfg.mode == "spectrum" || cfg.mode == "all";
  const bool want_diagnose = cfg.mode == "diagnose" || cfg.mode == "all";
  const bool want_oracle = cfg.mode == "oracle" || cfg.mode == "all";
  if (cfg.mode == "spectrum" && d != 2)
    throw ValidationError("unsupported-dimension",
                          "spectrum mode requires d = 2; use estimate for higher dimension");

  json results;
  json timings;
  StageClock clock(timings);
  std::ostringstream csv;
  csv << "method,n,value,stderr\n";
  std::vector<std::string> warnings;
  if (chain.partial_support())
    warnings.push_back(
        "transition matrix has zero entries: estimators remain valid for primitive chains, "
        "but the full-shift assumption behind the operator theory is not met");

  if (want_estimate) {
    EstimateResult sub = clock.time("estimate_subadditive", [&] {
      return estimate_subadditive(family, chain, cfg.mc.n, cfg.mc.replicas,
                                  derive_seed(cfg.seed, kSeedSubadditive));
    });
    EstimateResult fur = clock.time("estimate_furstenberg", [&] {
      return estimate_furstenberg(family, chain, cfg.mc.n, cfg.mc.burn_in,
                                  derive_seed(cfg.seed, kSeedFurstenberg));
    });
    results["estimates"]["subadditive"] = estimate_json(sub);
    results["estimates"]["furstenberg"] = estimate_json(fur);
    for (size_t b = 0; b < sub.trace.size(); ++b)
      csv_row(csv, "subadditive", static_cast<long>(b + 1), sub.trace[b]);
    csv_row(csv, "subadditive_final", sub.n_steps, sub.gamma_hat, format_double(sub.std_error));
    for (size_t b = 0; b < fur.trace.size(); ++b)
      csv_row(csv, "furstenberg", static_cast<long>(b + 1), fur.trace[b]);
    csv_row(csv, "furstenberg_final", fur.n_steps, fur.gamma_hat, format_double(fur.std_error));
  }

  if (want_spectrum && d == 2) {
    TransferOperator op(family, chain, cfg.grid_n, cfg.alpha, cfg.theta, cfg.t_max);
    EigenMeasure nu = clock.time("eigenmeasure", [&] { return op.eigenmeasure(); });

    double gamma_pert =
        clock.time("lyapunov_perturbation", [&] { return op.lyapunov_via_perturbation(nu); });
    results["estimates"]["perturbation"] = json{{"gamma", gamma_pert}, {"grid_n", cfg.grid_n}};

    BetaDerivativeResult bd = clock.time("lyapunov_beta_derivative",
                                         [&] { return op.lyapunov_via_beta_derivative(cfg.t_step); });
    results["estimates"]["beta_derivative"] = json{{"gamma", bd.extrapolated},
                                                   {"raw_h", bd.raw_h},
                                                   {"raw_half_h", bd.raw_half_h},
                                                   {"h", bd.h}};

    clock.time("beta_curve", [&] {
      json curve = json::array();
      const int points = 9;
      for (int p = 0; p < points; ++p) {
        double t = -cfg.t_max + 2.0 * cfg.t_max * p / (points - 1);
        auto pi = op.leading_eigenvalue(t);
        curve.push_back(json{{"t", t},
                             {"beta", pi.beta},
                             {"iterations", pi.iterations},
                             {"possible_nonsimple", pi.possible_nonsimple}});
      }
      results["beta_curve"] = std::move(curve);
    });

    clock.time("spectral_gap", [&] {
      RngStream rng(derive_seed(cfg.seed, kSeedGapProbes), 0);
      std::vector<GridFunction> probes;
      for (int p = 0; p < 3; ++p)
        probes.push_back(random_bandlimited(chain.k(), cfg.grid_n, 6, rng, cfg.alpha, cfg.theta));
      SpectralGapResult gap = op.spectral_gap(probes, 40, nu);
      json probe_rates = json::array();
      for (size_t p = 0; p < gap.probes.size(); ++p) {
        probe_rates.push_back(json{{"rate", gap.probes[p].rate},
                                   {"early_zero", gap.probes[p].early_zero}});
        for (size_t n = 0; n < gap.probes[p].residuals.size(); ++n)
          csv_row(csv, "spectral_gap_probe" + std::to_string(p), static_cast<long>(n + 1),
                  gap.probes[p].residuals[n]);
      }
      results["spectral_gap"] = json{{"rate", gap.rate},
                                     {"no_gap", gap.no_gap},
                                     {"fit_lo", gap.fit_lo},
                                     {"fit_hi", gap.fit_hi},
                                     {"probes", probe_rates}};
      if (gap.no_gap)
        warnings.push_back("no spectral gap detected: the family may not be contracting");
    });

    clock.time("lasota_yorke", [&] {
      RngStream rng(derive_seed(cfg.seed, kSeedLyProbe), 0);
      GridFunction probe = random_bandlimited(chain.k(), cfg.grid_n, 6, rng, cfg.alpha, cfg.theta);
      LasotaYorkeResult ly = op.lasota_yorke_probe(probe, Complex(0.0, 0.0), 40);
      for (const auto& row : ly.rows)
        csv_row(csv, "lasota_yorke_seminorm", row.n, row.seminorm);
      results["lasota_yorke"] = json{{"c", ly.big_c},
                                     {"delta", ly.delta},
                                     {"contraction", ly.contraction},
                                     {"sup_bound_ok", ly.sup_bound_ok},
                                     {"max_residual", ly.max_residual}};
      if (!ly.contraction)
        warnings.push_back("Lasota-Yorke probe found no seminorm contraction for the chosen "
                           "(alpha, theta)");
    });

    clock.time("grid_convergence", [&] {
      json table = json::array();
      for (int n_grid : {256, 512, 1024, 2048}) {
        TransferOperator op_n(family, chain, n_grid, cfg.alpha, cfg.theta, cfg.t_max);
        double g = op_n.lyapunov_via_perturbation(op_n.eigenmeasure());
        table.push_back(json{{"grid_n", n_grid}, {"gamma", g}});
        csv_row(csv, "grid_convergence", n_grid, g);
      }
      results["grid_convergence"] = std::move(table);
    });
  } else if (want_spectrum && d != 2) {
    warnings.push_back("spectrum stage skipped: grid transfer operators require d = 2");
  }

  if (want_diagnose) {
    clock.time("diagnose", [&] {
      json diag;
      diag["note"] = "sampling heuristics: these probes can falsify the standing hypotheses "
                     "(contraction, strong irreducibility, properness) but never certify them";
      auto contraction = contraction_average(family, chain, 20, 120, cfg.alpha,
                                             derive_seed(cfg.seed, kSeedContraction));
      json ctable = json::array();
      for (const auto& row : contraction)
        ctable.push_back(json{{"n", row.n},
                              {"max_mean_ratio", row.max_mean_ratio},
                              {"per_step_rate", row.per_step_rate}});
      diag["contraction_average"] = std::move(ctable);

      auto index = index_probe(family, chain, 50, 400, derive_seed(cfg.seed, kSeedIndex));
      diag["index_probe"] = json{{"n", index.n},
                                 {"median_ratio", index.median},
                                 {"min_ratio", index.min},
                                 {"max_ratio", index.max}};

      auto ell_bound =
          ell_product_bound_check(family, chain, 20, 1000, derive_seed(cfg.seed, kSeedEllBound));
      diag["ell_product_bound"] = json{{"pass", ell_bound.pass},
                                       {"max_slack", ell_bound.max_slack},
                                       {"samples", ell_bound.samples}};

      if (d == 2) {
        diag["det_closure"] = json{{"gamma1_plus_gamma2", det_closure_check(family, chain)}};

        auto irr = irreducibility_heuristic(family);
        const char* verdict = irr.verdict == IrreducibilityVerdict::pass ? "pass"
                              : irr.verdict == IrreducibilityVerdict::fail ? "fail"
                                                                           : "inconclusive";
        diag["irreducibility"] = json{{"verdict", verdict},
                                      {"witness_angles", irr.witness_angles},
                                      {"seed_lines", irr.seed_lines},
                                      {"note", irr.note}};
        if (irr.verdict == IrreducibilityVerdict::fail)
          warnings.push_back("irreducibility heuristic found an invariant family of lines");

        int nu_grid = std::min(cfg.grid_n, 512);
        TransferOperator op_nu(family, chain, nu_grid, cfg.alpha, cfg.theta, cfg.t_max);
        auto prop = properness_probe(op_nu.eigenmeasure(), 64,
                                     {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
        json ptable = json::array();
        for (size_t e = 0; e < prop.eps_grid.size(); ++e)
          ptable.push_back(json{{"eps", prop.eps_grid[e]}, {"max_mass", prop.max_mass[e]}});
        diag["properness"] = json{{"table", ptable},
                                  {"atom_flag", prop.atom_flag},
                                  {"grid_n", nu_grid}};
        if (prop.atom_flag)
          warnings.push_back("properness probe found persistent ball mass: the invariant "
                             "measure is not proper (atoms on lines)");
      } else {
        diag["dimension_note"] = "hyperplane and irreducibility probes are d = 2 only";
      }
      results["diagnostics"] = std::move(diag);
    });
  }

  if (want_oracle) {
    bool over_budget =
        std::pow(static_cast<double>(chain.k()), static_cast<double>(cfg.oracle.n)) > 1e7;
    if (over_budget && cfg.mode == "oracle")
      throw ValidationError("enumeration-budget", "k^n exceeds the enumeration budget");
    if (over_budget) {
      warnings.push_back("oracle stage skipped: k^n exceeds the enumeration budget");
    } else {
      clock.time("oracle", [&] {
        json oracle;
        const double h = cfg.oracle.t;
        std::vector<ProjPoint> points;
        if (d == 2) {
          for (int a = 0; a < 8; ++a) points.push_back(ProjPoint::from_angle(a * kPi / 8));
        } else {
          for (int i = 0; i < d; ++i) points.push_back(ProjPoint::axis(d, i));
        }
        json values = json::array();
        for (int j = 0; j < chain.k(); ++j) {
          for (size_t p = 0; p < points.size(); ++p) {
            json row;
            row["terminal"] = j;
            row["point"] = p;
            for (double t : {-h, 0.0, h})
              row[t == 0.0 ? "e0" : (t > 0.0 ? "eplus" : "eminus")] =
                  enumerate_exact(family, chain, cfg.oracle.n, t, j, points[p]);
            values.push_back(std::move(row));
          }
        }
        oracle["n"] = cfg.oracle.n;
        oracle["t"] = h;
        oracle["values"] = std::move(values);

        // (E(n,h) - E(n,-h)) / (2 h n), pi-averaged over terminals: tends
        // toward gamma as n grows.
        json seq = json::array();
        ProjPoint x0 = ProjPoint::axis(d, 0);
        for (int n = 1; n <= cfg.oracle.n; ++n) {
          double v = 0.0;
          for (int j = 0; j < chain.k(); ++j)
            v += chain.stationary(j) * (enumerate_exact(family, chain, n, h, j, x0) -
                                        enumerate_exact(family, chain, n, -h, j, x0)) /
                 (2.0 * h * n);
          seq.push_back(v);
          csv_row(csv, "oracle_derivative", n, v);
        }
        oracle["derivative_sequence"] = std::move(seq);
        results["oracle"] = std::move(oracle);
      });
    }
  }

  results["warnings"] = warnings;

  RunOutput out;
  out.report = json{{"schema_version", "1"},
                    {"config", cfg.to_json()},
                    {"results", std::move(results)},
                    {"timings_ms", std::move(timings)}};
  out.csv = csv.str();
  return out;
}

}  // namespace lyap
