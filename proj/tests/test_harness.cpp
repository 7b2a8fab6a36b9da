#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "normtail/harness.hpp"

using namespace normtail;

namespace {

nlohmann::json base_config() {
  return nlohmann::json{
      {"problem", {{"id", "quadratic"}, {"dim", 4}, {"eigenvalues", {1, 1, 1, 1}}}},
      {"noise", {{"p", 2.0}, {"sigma", 0.0}, {"family", "none"}}},
      {"algorithms", {"nsgd", "nsgdc"}},
      {"t_grid", {256, 1024}},
      {"replicates", 3},
      {"seed", 7}};
}

}  // namespace

TEST_CASE("schedule_for dispatches to the matching schedule") {
  CHECK(schedule_for(AlgorithmId::nsgd, 1, 2, 1, 4096, 1).source ==
        ScheduleSource::theorem1);
  CHECK(schedule_for(AlgorithmId::nsgd_vr, 1, 2, 1, 4096, 1).source ==
        ScheduleSource::theorem2);
  CHECK(schedule_for(AlgorithmId::nsgdc, 1, 2, 1, 4096, 1).source ==
        ScheduleSource::theorem3);
  CHECK(schedule_for(AlgorithmId::nsgdc_vr, 1, 2, 1, 4096, 1).source ==
        ScheduleSource::theorem4);
  CHECK(schedule_for(AlgorithmId::a_nsgdc, 1, 2, 1, 4096, 1).source ==
        ScheduleSource::theorem5);
  CHECK(schedule_for(AlgorithmId::a_nsgd, 1, 2, 1, 4096, 1).source ==
        ScheduleSource::proposition1);
  CHECK(schedule_for(AlgorithmId::sgdc, 1, 2, 1, 4096, 1).h ==
        doctest::Approx(8.0).epsilon(1e-12));
  CHECK(std::isinf(schedule_for(AlgorithmId::sgd_plain, 1, 2, 1, 4096, 1).h));
}

TEST_CASE("parse_config reads the documented keys") {
  nlohmann::json j = base_config();
  j["metric"] = "final_grad_norm";
  j["overrides"] = {{"nsgd", {{"theta", 0.5}, {"gamma", 0.01}, {"h", "inf"}}}};
  SweepConfig cfg = parse_config(j);
  CHECK(cfg.problem.name == "quadratic");
  CHECK(cfg.problem.dim == 4);
  CHECK(cfg.noise.family == NoiseFamily::none);
  CHECK(cfg.algorithms.size() == 2);
  CHECK(cfg.t_grid == std::vector<long>{256, 1024});
  CHECK(cfg.replicates == 3);
  CHECK(cfg.seed == 7);
  CHECK(cfg.metric == "final_grad_norm");
  REQUIRE(cfg.overrides.count(AlgorithmId::nsgd) == 1);
  CHECK(cfg.overrides.at(AlgorithmId::nsgd).theta == 0.5);
  CHECK(std::isinf(cfg.overrides.at(AlgorithmId::nsgd).h));
}

TEST_CASE("parse_config validation") {
  nlohmann::json j = base_config();
  j["t_grid"] = {1024, 256};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base_config();
  j["replicates"] = 0;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base_config();
  j["problem"]["id"] = "rosenbrock";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base_config();
  j["algorithms"] = {"adam"};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("run_sweep cardinality and determinism") {
  SweepConfig cfg = parse_config(base_config());
  std::vector<RunResult> a = run_sweep(cfg);
  CHECK(a.size() == 2 * 2 * 3);

  // Byte-identical CSV across invocations (modulo wall-clock): compare after
  // zeroing wall_ms.
  std::vector<RunResult> b = run_sweep(cfg);
  for (auto* rs : {&a, &b})
    for (RunResult& r : *rs) r.wall_ms = 0.0;
  std::ostringstream osa, osb;
  emit_csv(a, osa);
  emit_csv(b, osb);
  CHECK(osa.str() == osb.str());

  // Parallel/serial equivalence.
  SweepConfig par = cfg;
  par.parallel = 4;
  std::vector<RunResult> c = run_sweep(par);
  for (RunResult& r : c) r.wall_ms = 0.0;
  std::ostringstream osc;
  emit_csv(c, osc);
  CHECK(osa.str() == osc.str());
}

TEST_CASE("sigma = 0: nsgd and nsgdc agree; metric shrinks with budget") {
  SweepConfig cfg = parse_config(base_config());
  std::vector<RunResult> rows = run_sweep(cfg);
  double nsgd_small = 0, nsgd_big = 0;
  for (const RunResult& r : rows) {
    for (const RunResult& s : rows)
      if (r.T == s.T && r.replicate == s.replicate &&
          r.algo == AlgorithmId::nsgd && s.algo == AlgorithmId::nsgdc)
        CHECK(r.avg_grad_norm == s.avg_grad_norm);
    if (r.algo == AlgorithmId::nsgd && r.replicate == 0) {
      if (r.T == 256) nsgd_small = r.avg_grad_norm;
      if (r.T == 1024) nsgd_big = r.avg_grad_norm;
    }
  }
  CHECK(nsgd_big < nsgd_small);
}

TEST_CASE("failed cells are flagged, carry NaN, and are excluded by aggregate") {
  nlohmann::json j = base_config();
  j["algorithms"] = {"sgd_plain"};
  j["t_grid"] = {64};
  j["overrides"] = {{"sgd_plain", {{"theta", 0.0}, {"gamma", 1e200}, {"h", "inf"}}}};
  SweepConfig cfg = parse_config(j);
  std::vector<RunResult> rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3);
  std::vector<double> metrics;
  for (const RunResult& r : rows) {
    CHECK(r.failed);
    CHECK(r.failed_at >= 1);
    CHECK(std::isnan(r.avg_grad_norm));
    metrics.push_back(r.avg_grad_norm);
  }
  metrics.push_back(2.0);
  Aggregate agg = aggregate(metrics);
  CHECK(agg.n == 1);
  CHECK(agg.failures == 3);
  CHECK(agg.mean == 2.0);
}

TEST_CASE("aggregate statistics") {
  CHECK(aggregate(std::vector<double>{5.0}).mean == 5.0);
  CHECK(aggregate(std::vector<double>{5.0}).median == 5.0);
  Aggregate agg = aggregate(std::vector<double>{3.0, 1.0, 2.0});
  CHECK(agg.mean == 2.0);
  CHECK(agg.median == 2.0);

  // p99 of 200 samples is the 199th order statistic (nearest rank).
  std::vector<double> v(200);
  for (int i = 0; i < 200; ++i) v[i] = static_cast<double>(200 - i);
  agg = aggregate(v);
  CHECK(agg.p99 == 199.0);

  CHECK_THROWS_AS(aggregate(std::vector<double>{}), ConfigError);
}

TEST_CASE("fit_rate recovers power laws") {
  std::vector<std::pair<double, double>> pts;
  for (double T : {100.0, 1000.0, 10000.0})
    pts.push_back({T, 3.0 * std::pow(T, -0.5)});
  RateFit fit = fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  pts.clear();
  for (double T : {100.0, 1000.0, 10000.0}) pts.push_back({T, 2.0});
  fit = fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.r_squared == 1.0);

  // 5% multiplicative noise around T^{-0.2}.
  RngStream rng(3);
  pts.clear();
  for (double T = 100.0; T <= 1e6; T *= 2.0)
    pts.push_back({T, std::pow(T, -0.2) * (1.0 + 0.05 * (2.0 * rng.uniform01() - 1.0))});
  fit = fit_rate(pts);
  CHECK(fit.slope >= -0.25);
  CHECK(fit.slope <= -0.15);
  CHECK(fit.r_squared > 0.95);

  CHECK_THROWS_AS(fit_rate(std::vector<std::pair<double, double>>{{1, 1}, {2, 1}}),
                  ConfigError);
  CHECK_THROWS_AS(
      fit_rate(std::vector<std::pair<double, double>>{{1, 1}, {2, 1}, {3, 0.0}}),
      ConfigError);
}

TEST_CASE("csv header, empty emit, and full round trip") {
  std::ostringstream os;
  emit_csv(std::vector<RunResult>{}, os);
  CHECK(os.str() == std::string(kCsvHeader) + "\n");

  SweepConfig cfg = parse_config(base_config());
  std::vector<RunResult> rows = run_sweep(cfg);
  std::ostringstream full;
  emit_csv(rows, full);
  std::istringstream in(full.str());
  std::vector<RunResult> parsed = parse_csv(in);
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parsed[i].algo == rows[i].algo);
    CHECK(parsed[i].T == rows[i].T);
    CHECK(parsed[i].seed == rows[i].seed);
    CHECK(parsed[i].avg_grad_norm == rows[i].avg_grad_norm);  // exact round trip
    CHECK(parsed[i].final_f_gap == rows[i].final_f_gap);
    CHECK(parsed[i].hyper.gamma == rows[i].hyper.gamma);
    CHECK(std::isinf(parsed[i].hyper.h) == std::isinf(rows[i].hyper.h));
  }
  CHECK(full.str().find("inf") != std::string::npos);  // h = inf for nsgd

  std::istringstream bad("wrong,header\n");
  CHECK_THROWS_AS(parse_csv(bad), ConfigError);
}

TEST_CASE("format_double round-trips exactly") {
  RngStream rng(4);
  for (int i = 0; i < 10000; ++i) {
    double x = (rng.uniform01() - 0.5) * std::pow(10.0, 300.0 * (rng.uniform01() - 0.5));
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(std::strtod(format_double(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("svg output is a plausible log-log chart") {
  SweepConfig cfg = parse_config(base_config());
  std::vector<RunResult> rows = run_sweep(cfg);
  std::ostringstream os;
  emit_svg(rows, "avg_grad_norm", os);
  std::string svg = os.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("nsgd") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("hyperparameter json round trip keeps infinite h") {
  HyperParams hp;
  hp.theta = 0.75;
  hp.gamma = 0.125;
  hp.h = kInfiniteClip;
  hp.zeta = 3.0;
  hp.T = 512;
  HyperParams back = hyperparams_from_json(to_json(hp));
  CHECK(back.theta == hp.theta);
  CHECK(back.gamma == hp.gamma);
  CHECK(std::isinf(back.h));
  CHECK(back.zeta == hp.zeta);
  CHECK(back.T == hp.T);
}
