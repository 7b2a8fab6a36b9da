// Command-line front end: run / sweep / schedule / verify / fit / plot.
// Exit codes: 0 success, 1 verification failure, 2 config or I/O error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "normtail/harness.hpp"
#include "normtail/verify.hpp"

namespace {

using nlohmann::json;
using namespace normtail;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  in >> j;
  return j;
}

TraceLevel trace_from_string(const std::string& s) {
  if (s == "none") return TraceLevel::none;
  if (s == "summary") return TraceLevel::summary;
  if (s == "full") return TraceLevel::full;
  throw ConfigError("unknown trace level: " + s);
}

double metric_of(const RunResult& r, const std::string& metric) {
  if (metric == "avg_grad_norm") return r.avg_grad_norm;
  if (metric == "final_grad_norm") return r.final_grad_norm;
  if (metric == "final_f_gap") return r.final_f_gap;
  throw ConfigError("unknown metric: " + metric);
}

json aggregate_json(const Aggregate& a) {
  return json{{"mean", a.mean},
              {"median", a.median},
              {"p99", a.p99},
              {"n", a.n},
              {"failures", a.failures}};
}

// Per-(algo, T) aggregates of the chosen metric plus the final-gradient tail
// ratio p99/median, the number the heavy-tail comparison reads off.
json build_report(std::span<const RunResult> results,
                  const std::string& metric) {
  std::map<std::string, std::map<long, std::vector<const RunResult*>>> groups;
  for (const RunResult& r : results)
    groups[to_string(r.algo)][r.T].push_back(&r);

  json report = json::array();
  for (const auto& [algo, byT] : groups) {
    for (const auto& [T, rows] : byT) {
      std::vector<double> ms, fs;
      for (const RunResult* r : rows) {
        ms.push_back(metric_of(*r, metric));
        fs.push_back(r->final_grad_norm);
      }
      Aggregate am = aggregate(ms);
      Aggregate af = aggregate(fs);
      json cell{{"algo", algo},
                {"T", T},
                {"metric", metric},
                {"aggregate", aggregate_json(am)},
                {"final_grad_norm", aggregate_json(af)}};
      if (af.median > 0.0) cell["tail_ratio"] = af.p99 / af.median;
      report.push_back(std::move(cell));
    }
  }
  return report;
}

json fit_json(std::span<const RunResult> results, const std::string& metric) {
  std::map<std::string, std::map<long, std::vector<double>>> groups;
  for (const RunResult& r : results)
    groups[to_string(r.algo)][r.T].push_back(metric_of(r, metric));

  json out = json::object();
  for (const auto& [algo, byT] : groups) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [T, vals] : byT) {
      Aggregate a = aggregate(vals);
      if (a.mean > 0.0) pts.push_back({static_cast<double>(T), a.mean});
    }
    if (pts.size() < 3) continue;
    RateFit fit = fit_rate(pts);
    out[algo] = json{{"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"r_squared", fit.r_squared},
                     {"n_points", fit.n_points},
                     {"metric", metric}};
  }
  if (out.empty())
    throw ConfigError("fit: no algorithm has >= 3 positive grid points");
  return out;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Normalized/clipped SGD benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", trace = "none",
              metric = "avg_grad_norm", csv_path, out_file;
  std::optional<std::uint64_t> seed;
  int parallel = 1;

  auto* cmd_run = app.add_subcommand("run", "single run, prints JSON summary");
  cmd_run->add_option("--config", config_path)->required();
  cmd_run->add_option("--seed", seed);
  cmd_run->add_option("--trace", trace)
      ->check(CLI::IsMember({"none", "summary", "full"}));

  auto* cmd_sweep =
      app.add_subcommand("sweep", "replicated sweep, writes CSV + report JSON");
  cmd_sweep->add_option("--config", config_path)->required();
  cmd_sweep->add_option("--seed", seed);
  cmd_sweep->add_option("--out", out_dir);
  cmd_sweep->add_option("--parallel", parallel)->check(CLI::PositiveNumber);

  auto* cmd_schedule =
      app.add_subcommand("schedule", "print derived hyperparameters as JSON");
  std::string algo_name;
  double s_sigma = 1.0, s_p = 2.0, s_L = 1.0, s_g0 = 1.0;
  long s_T = 0;
  cmd_schedule->add_option("--algo", algo_name)->required();
  cmd_schedule->add_option("--sigma", s_sigma);
  cmd_schedule->add_option("--p", s_p);
  cmd_schedule->add_option("--L", s_L);
  cmd_schedule->add_option("--T", s_T)->required();
  cmd_schedule->add_option("--g0", s_g0);

  auto* cmd_verify =
      app.add_subcommand("verify", "run the inequality suite, JSON report");
  cmd_verify->add_option("--seed", seed);

  auto* cmd_fit = app.add_subcommand("fit", "fit rate slopes from a results CSV");
  cmd_fit->add_option("csv", csv_path)->required();
  cmd_fit->add_option("--metric", metric)
      ->check(CLI::IsMember({"avg_grad_norm", "final_grad_norm", "final_f_gap"}));

  auto* cmd_plot = app.add_subcommand("plot", "render a results CSV as SVG");
  cmd_plot->add_option("csv", csv_path)->required();
  cmd_plot->add_option("--out", out_file)->required();
  cmd_plot->add_option("--metric", metric)
      ->check(CLI::IsMember({"avg_grad_norm", "final_grad_norm", "final_f_gap"}));

  CLI11_PARSE(app, argc, argv);

  if (cmd_run->parsed()) {
    SweepConfig cfg = parse_config(load_config(config_path));
    if (cfg.algorithms.size() != 1 || cfg.t_grid.size() != 1)
      throw ConfigError("run: config must name exactly one algorithm and one T");
    if (seed) cfg.seed = *seed;
    AlgorithmId algo = cfg.algorithms[0];
    long T = cfg.t_grid[0];
    HyperParams hp =
        cfg.overrides.count(algo)
            ? cfg.overrides.at(algo)
            : schedule_for(algo, cfg.noise.sigma, cfg.noise.p,
                           cfg.problem.lipschitz_L, T, cfg.problem.grad_w0_norm);
    hp.T = T;
    std::uint64_t key =
        make_stream_key(cfg.seed, static_cast<std::uint32_t>(algo),
                        static_cast<std::uint64_t>(T), 0);
    Trajectory traj = run(algo, cfg.problem, cfg.noise, hp, RngStream(key),
                          trace_from_string(trace));
    json j{{"algo", to_string(algo)},
           {"problem", cfg.problem.name},
           {"T", T},
           {"seed", key},
           {"avg_grad_norm", traj.avg_grad_norm},
           {"final_grad_norm", traj.final_grad_norm},
           {"final_f_gap", traj.final_f_gap},
           {"hyper", to_json(hp)}};
    if (!traj.grad_norms.empty()) {
      j["grad_norms"] = traj.grad_norms;
      j["f_gaps"] = traj.f_gaps;
      j["eps_norms"] = traj.eps_norms;
      j["displacements"] = traj.displacements;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (cmd_sweep->parsed()) {
    SweepConfig cfg = parse_config(load_config(config_path));
    if (seed) cfg.seed = *seed;
    cfg.parallel = parallel;
    std::vector<RunResult> results = run_sweep(cfg);

    std::filesystem::create_directories(out_dir);
    std::string csv = out_dir + "/results.csv";
    {
      std::ofstream os(csv, std::ios::binary);
      if (!os) throw ConfigError("cannot write " + csv);
      emit_csv(results, os);
    }
    std::string rep = out_dir + "/report.json";
    {
      std::ofstream os(rep);
      if (!os) throw ConfigError("cannot write " + rep);
      os << build_report(results, cfg.metric).dump(2) << "\n";
    }
    std::cerr << "wrote " << csv << " and " << rep << "\n";
    return 0;
  }

  if (cmd_schedule->parsed()) {
    HyperParams hp =
        schedule_for(algorithm_from_string(algo_name), s_sigma, s_p, s_L, s_T, s_g0);
    std::cout << to_json(hp).dump(2) << "\n";
    return 0;
  }

  if (cmd_verify->parsed()) {
    std::vector<CheckReport> reports = run_default_suite(seed.value_or(0));
    json arr = json::array();
    bool all_pass = true;
    for (const CheckReport& r : reports) {
      arr.push_back(r.to_json());
      all_pass = all_pass && r.pass;
    }
    std::cout << arr.dump(2) << "\n";
    return all_pass ? 0 : 1;
  }

  if (cmd_fit->parsed() || cmd_plot->parsed()) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + csv_path);
    std::vector<RunResult> results = parse_csv(in);
    if (cmd_fit->parsed()) {
      std::cout << fit_json(results, metric).dump(2) << "\n";
    } else {
      std::ofstream os(out_file, std::ios::binary);
      if (!os) throw ConfigError("cannot write " + out_file);
      emit_svg(results, metric, os);
      std::cerr << "wrote " << out_file << "\n";
    }
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return cli_main(argc, argv);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
