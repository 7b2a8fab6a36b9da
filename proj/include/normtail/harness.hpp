#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "normtail/noise.hpp"
#include "normtail/optimizers.hpp"
#include "normtail/problems.hpp"
#include "normtail/schedules.hpp"

#include <json.hpp>

namespace normtail {

struct SweepConfig {
  ProblemSpec problem;
  NoiseSpec noise;
  std::vector<AlgorithmId> algorithms;
  std::vector<long> t_grid;  // strictly increasing
  int replicates = 50;
  std::uint64_t seed = 0;
  std::string metric = "avg_grad_norm";
  std::map<AlgorithmId, HyperParams> overrides;  // manual hyperparameters
  int parallel = 1;
};

// Parses the single-object JSON config (keys: problem, noise, algorithms,
// t_grid, replicates, seed, metric, overrides).
SweepConfig parse_config(const nlohmann::json& j);

// Theorem-matched schedule for each algorithm.
HyperParams schedule_for(AlgorithmId algo, double sigma, double p, double L,
                         long T, double grad_w0_norm);

struct RunResult {
  AlgorithmId algo;
  std::string problem;
  int dim = 0;
  double p = 0.0, sigma = 0.0;
  NoiseFamily family = NoiseFamily::none;
  long T = 0;
  std::uint64_t seed = 0;  // derived per-run stream key
  int replicate = 0;
  double avg_grad_norm = 0.0, final_grad_norm = 0.0, final_f_gap = 0.0;
  HyperParams hyper;
  double wall_ms = 0.0;
  bool failed = false;  // numerical failure; metrics are NaN
  long failed_at = -1;
};

// Executes every (algorithm, T, replicate) cell. Cells are independent and
// may run on config.parallel worker threads; rows come back sorted by
// (algo, T, replicate) regardless of the worker count.
std::vector<RunResult> run_sweep(const SweepConfig& config);

struct Aggregate {
  double mean = 0.0, median = 0.0, p99 = 0.0;
  int n = 0, failures = 0;
};

// Mean/median/p99 (nearest-rank) of finite values; NaN cells are counted as
// failures and excluded. Throws on an empty group.
Aggregate aggregate(std::span<const double> values);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

// Ordinary least squares on (log T, log metric). Requires >= 3 points and
// strictly positive metrics.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

// Exact schema, comma separated, "\n" line endings; numerics round-trip at
// 17 significant digits; infinite h renders as "inf".
extern const char* kCsvHeader;
void emit_csv(std::span<const RunResult> results, std::ostream& os);
std::vector<RunResult> parse_csv(std::istream& is);

// Log-log line chart, one series per algorithm (mean metric over T).
void emit_svg(std::span<const RunResult> results, const std::string& metric,
              std::ostream& os);

nlohmann::json to_json(const HyperParams& hyper);
HyperParams hyperparams_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunResult& result);

// Shortest-width formatting that still round-trips a double exactly.
std::string format_double(double x);

}  // namespace normtail
