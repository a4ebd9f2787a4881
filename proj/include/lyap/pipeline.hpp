#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace lyap {

struct McConfig {
  long n = 100000;
  int replicas = 64;
  long burn_in = 1000;
};

struct OracleConfig {
  int n = 6;
  double t = 0.1;
};

// Batch run configuration; JSON schema version "1", lowercase snake-case keys.
struct RunConfig {
  std::vector<std::vector<double>> matrices;   // row-major d*d entries each
  std::vector<std::vector<double>> transition; // k x k forward matrix rows
  std::string mode = "all";  // estimate | spectrum | diagnose | oracle | all
  int grid_n = 1024;
  double alpha = 0.5;
  double theta = 0.25;
  double t_step = 1e-3;
  double t_max = 0.5;
  McConfig mc;
  OracleConfig oracle;
  uint64_t seed = 1;
  int workers = 0;  // 0 = all available; 1 guarantees the bit-exact rerun contract
  bool strict_full_shift = true;
  std::string out_dir = ".";

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RunOutput {
  // { schema_version, config, results, timings_ms }; "results" reruns
  // bit-exactly from the embedded config and seed.
  nlohmann::json report;
  std::string csv;  // convergence traces: method,n,value,stderr
};

RunOutput run(const RunConfig& cfg);

}  // namespace lyap
