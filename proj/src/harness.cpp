#include "normtail/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <limits>
#include <sstream>
#include <thread>

namespace normtail {

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

HyperParams schedule_for(AlgorithmId algo, double sigma, double p, double L,
                         long T, double grad_w0_norm) {
  switch (algo) {
    case AlgorithmId::nsgd: return params_nsgd(sigma, p, L, T);
    case AlgorithmId::nsgd_vr: return params_nsgd_vr(sigma, p, L, T);
    case AlgorithmId::nsgdc: return params_nsgdc(sigma, p, L, T, grad_w0_norm);
    case AlgorithmId::nsgdc_vr:
      return params_nsgdc_vr(sigma, p, L, T, grad_w0_norm);
    case AlgorithmId::a_nsgdc:
      return params_ansgdc(sigma, p, L, T, grad_w0_norm);
    case AlgorithmId::a_nsgd: return params_ansgd(sigma, p, L, T);
    case AlgorithmId::sgdc: return params_sgdc_baseline(sigma, p, L, T);
    case AlgorithmId::sgd_plain: {
      HyperParams hp = params_sgdc_baseline(sigma, p, L, T);
      hp.h = kInfiniteClip;
      return hp;
    }
  }
  throw ConfigError("schedule_for: unknown algorithm");
}

SweepConfig parse_config(const nlohmann::json& j) {
  SweepConfig cfg;

  const auto& pj = j.at("problem");
  std::string id = pj.at("id").get<std::string>();
  int dim = pj.at("dim").get<int>();
  std::optional<std::vector<double>> w0;
  if (pj.contains("w0")) w0 = pj.at("w0").get<std::vector<double>>();
  if (id == "quadratic") {
    std::vector<double> eigenvalues =
        pj.contains("eigenvalues")
            ? pj.at("eigenvalues").get<std::vector<double>>()
            : std::vector<double>(dim, 1.0);
    cfg.problem = make_quadratic(dim, std::move(eigenvalues), std::move(w0));
  } else if (id == "log_smooth") {
    cfg.problem = make_log_smooth(dim, std::move(w0));
  } else {
    throw ConfigError("unknown problem id: " + id);
  }

  const auto& nj = j.at("noise");
  std::optional<double> alpha, cutoff, beta;
  if (nj.contains("alpha")) alpha = nj.at("alpha").get<double>();
  if (nj.contains("cutoff")) cutoff = nj.at("cutoff").get<double>();
  if (nj.contains("beta")) beta = nj.at("beta").get<double>();
  OracleFamily of = OracleFamily::linear;
  if (nj.contains("oracle_family")) {
    std::string s = nj.at("oracle_family").get<std::string>();
    if (s == "linear")
      of = OracleFamily::linear;
    else if (s == "quadratic")
      of = OracleFamily::quadratic;
    else
      throw ConfigError("unknown oracle_family: " + s);
  }
  if (of == OracleFamily::quadratic && !beta)
    beta = 0.5 * cfg.problem.lipschitz_L;
  cfg.noise = make_noise(
      nj.at("p").get<double>(), nj.at("sigma").get<double>(),
      noise_family_from_string(nj.at("family").get<std::string>()), alpha,
      cutoff, of, beta);

  for (const auto& a : j.at("algorithms"))
    cfg.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
  cfg.t_grid = j.at("t_grid").get<std::vector<long>>();
  for (std::size_t i = 1; i < cfg.t_grid.size(); ++i)
    if (cfg.t_grid[i] <= cfg.t_grid[i - 1])
      throw ConfigError("t_grid must be strictly increasing");
  if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
  if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("metric")) cfg.metric = j.at("metric").get<std::string>();
  if (j.contains("overrides"))
    for (auto it = j.at("overrides").begin(); it != j.at("overrides").end(); ++it)
      cfg.overrides[algorithm_from_string(it.key())] =
          hyperparams_from_json(it.value());
  return cfg;
}

std::vector<RunResult> run_sweep(const SweepConfig& config) {
  struct Cell {
    AlgorithmId algo;
    long T;
    int replicate;
  };
  std::vector<Cell> cells;
  for (AlgorithmId algo : config.algorithms)
    for (long T : config.t_grid)
      for (int r = 0; r < config.replicates; ++r) cells.push_back({algo, T, r});

  std::vector<RunResult> results(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < cells.size();
         i = next.fetch_add(1)) {
      const Cell& cell = cells[i];
      RunResult res;
      res.algo = cell.algo;
      res.problem = config.problem.name;
      res.dim = config.problem.dim;
      res.p = config.noise.p;
      res.sigma = config.noise.sigma;
      res.family = config.noise.family;
      res.T = cell.T;
      res.replicate = cell.replicate;
      res.seed = make_stream_key(config.seed,
                                 static_cast<std::uint32_t>(cell.algo),
                                 static_cast<std::uint64_t>(cell.T),
                                 static_cast<std::uint32_t>(cell.replicate));
      auto it = config.overrides.find(cell.algo);
      if (it != config.overrides.end()) {
        res.hyper = it->second;
        res.hyper.T = cell.T;
      } else {
        res.hyper = schedule_for(cell.algo, config.noise.sigma, config.noise.p,
                                 config.problem.lipschitz_L, cell.T,
                                 config.problem.grad_w0_norm);
      }
      auto t0 = std::chrono::steady_clock::now();
      try {
        Trajectory traj = run(cell.algo, config.problem, config.noise,
                              res.hyper, RngStream(res.seed));
        res.avg_grad_norm = traj.avg_grad_norm;
        res.final_grad_norm = traj.final_grad_norm;
        res.final_f_gap = traj.final_f_gap;
      } catch (const NumericalError& e) {
        res.failed = true;
        res.failed_at = e.iteration;
        res.avg_grad_norm = std::numeric_limits<double>::quiet_NaN();
        res.final_grad_norm = std::numeric_limits<double>::quiet_NaN();
        res.final_f_gap = std::numeric_limits<double>::quiet_NaN();
      }
      res.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      results[i] = res;
    }
  };

  int workers = std::max(1, config.parallel);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::sort(results.begin(), results.end(),
            [](const RunResult& a, const RunResult& b) {
              int c = std::strcmp(to_string(a.algo), to_string(b.algo));
              if (c != 0) return c < 0;
              if (a.T != b.T) return a.T < b.T;
              return a.replicate < b.replicate;
            });
  return results;
}

Aggregate aggregate(std::span<const double> values) {
  std::vector<double> finite;
  int failures = 0;
  for (double v : values) {
    if (std::isnan(v))
      ++failures;
    else
      finite.push_back(v);
  }
  if (finite.empty()) throw ConfigError("aggregate: empty group");
  std::sort(finite.begin(), finite.end());

  Aggregate agg;
  agg.n = static_cast<int>(finite.size());
  agg.failures = failures;
  double sum = 0.0;
  for (double v : finite) sum += v;
  agg.mean = sum / agg.n;
  agg.median = agg.n % 2 == 1
                   ? finite[agg.n / 2]
                   : 0.5 * (finite[agg.n / 2 - 1] + finite[agg.n / 2]);
  // Nearest-rank: floor(0.99 n) + 1, clamped (199th of 200).
  int rank = std::min(agg.n, static_cast<int>(std::floor(0.99 * agg.n)) + 1);
  agg.p99 = finite[rank - 1];
  return agg;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw ConfigError("fit_rate: need at least 3 points");
  std::vector<double> xs, ys;
  for (const auto& [T, metric] : points) {
    if (!(metric > 0.0))
      throw ConfigError(
          "fit_rate: non-positive metric (floor at machine epsilon or drop "
          "the point)");
    xs.push_back(std::log(T));
    ys.push_back(std::log(metric));
  }
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_rate: degenerate T grid");

  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n_points = static_cast<int>(n);
  if (syy == 0.0) {
    fit.r_squared = 1.0;  // exact (constant) fit
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

const char* kCsvHeader =
    "algo,problem,dim,p,sigma,family,T,seed,avg_grad_norm,final_grad_norm,"
    "final_f_gap,theta,gamma,h,zeta,wall_ms";

void emit_csv(std::span<const RunResult> results, std::ostream& os) {
  os << kCsvHeader << "\n";
  for (const RunResult& r : results) {
    os << to_string(r.algo) << ',' << r.problem << ',' << r.dim << ','
       << format_double(r.p) << ',' << format_double(r.sigma) << ','
       << to_string(r.family) << ',' << r.T << ',' << r.seed << ','
       << format_double(r.avg_grad_norm) << ','
       << format_double(r.final_grad_norm) << ','
       << format_double(r.final_f_gap) << ',' << format_double(r.hyper.theta)
       << ',' << format_double(r.hyper.gamma) << ','
       << format_double(r.hyper.h) << ',' << format_double(r.hyper.zeta) << ','
       << format_double(r.wall_ms) << "\n";
  }
}

std::vector<RunResult> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw ConfigError("parse_csv: unexpected header");
  std::vector<RunResult> results;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 16) throw ConfigError("parse_csv: malformed row");
    RunResult r;
    r.algo = algorithm_from_string(f[0]);
    r.problem = f[1];
    r.dim = std::stoi(f[2]);
    r.p = std::strtod(f[3].c_str(), nullptr);
    r.sigma = std::strtod(f[4].c_str(), nullptr);
    r.family = noise_family_from_string(f[5]);
    r.T = std::stol(f[6]);
    r.seed = std::stoull(f[7]);
    r.avg_grad_norm = std::strtod(f[8].c_str(), nullptr);
    r.final_grad_norm = std::strtod(f[9].c_str(), nullptr);
    r.final_f_gap = std::strtod(f[10].c_str(), nullptr);
    r.hyper.theta = std::strtod(f[11].c_str(), nullptr);
    r.hyper.gamma = std::strtod(f[12].c_str(), nullptr);
    r.hyper.h = std::strtod(f[13].c_str(), nullptr);
    r.hyper.zeta = std::strtod(f[14].c_str(), nullptr);
    r.hyper.T = r.T;
    r.wall_ms = std::strtod(f[15].c_str(), nullptr);
    r.failed = std::isnan(r.avg_grad_norm);
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

double metric_of(const RunResult& r, const std::string& metric) {
  if (metric == "avg_grad_norm") return r.avg_grad_norm;
  if (metric == "final_grad_norm") return r.final_grad_norm;
  if (metric == "final_f_gap") return r.final_f_gap;
  throw ConfigError("unknown metric: " + metric);
}

}  // namespace

void emit_svg(std::span<const RunResult> results, const std::string& metric,
              std::ostream& os) {
  // Per-(algo, T) mean of the metric.
  std::map<std::string, std::map<long, std::vector<double>>> groups;
  for (const RunResult& r : results)
    groups[to_string(r.algo)][r.T].push_back(metric_of(r, metric));

  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> pts;  // (log10 T, log10 mean)
  };
  std::vector<Series> series;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& [name, byT] : groups) {
    Series s{name, {}};
    for (auto& [T, vals] : byT) {
      Aggregate agg = aggregate(vals);
      if (!(agg.mean > 0.0)) continue;
      double x = std::log10(static_cast<double>(T));
      double y = std::log10(agg.mean);
      s.pts.push_back({x, y});
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    if (!s.pts.empty()) series.push_back(std::move(s));
  }
  if (xmin >= xmax) { xmin -= 0.5; xmax += 0.5; }
  if (ymin >= ymax) { ymin -= 0.5; ymax += 0.5; }

  const double W = 640, Hgt = 480, ml = 70, mr = 140, mt = 20, mb = 50;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return Hgt - mb - (y - ymin) / (ymax - ymin) * (Hgt - mt - mb); };
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << Hgt << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << Hgt - mb << "\" x2=\"" << W - mr
     << "\" y2=\"" << Hgt - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
     << Hgt - mb << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << Hgt - 12
     << "\" text-anchor=\"middle\">log10 T</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + Hgt - mb) / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (mt + Hgt - mb) / 2 << ")\">log10 " << metric << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    double x = xmin + (xmax - xmin) * i / 4.0;
    double y = ymin + (ymax - ymin) * i / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    os << "<text x=\"" << px(x) << "\" y=\"" << Hgt - mb + 16
       << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.2f", y);
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py(y) + 4
       << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  int idx = 0;
  for (const Series& s : series) {
    const char* color = palette[idx % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    for (const auto& [x, y] : s.pts)
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
         << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 14 + 16 * idx
       << "\" fill=\"" << color << "\">" << s.name << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
}

nlohmann::json to_json(const HyperParams& hyper) {
  return nlohmann::json{
      {"theta", hyper.theta},
      {"gamma", hyper.gamma},
      {"h", std::isinf(hyper.h) ? nlohmann::json("inf") : nlohmann::json(hyper.h)},
      {"zeta", hyper.zeta},
      {"T", hyper.T},
      {"source", to_string(hyper.source)}};
}

HyperParams hyperparams_from_json(const nlohmann::json& j) {
  HyperParams hp;
  hp.source = ScheduleSource::manual;
  if (j.contains("theta")) hp.theta = j.at("theta").get<double>();
  if (j.contains("gamma")) hp.gamma = j.at("gamma").get<double>();
  if (j.contains("zeta")) hp.zeta = j.at("zeta").get<double>();
  if (j.contains("T")) hp.T = j.at("T").get<long>();
  if (j.contains("h")) {
    const auto& h = j.at("h");
    hp.h = h.is_string() ? kInfiniteClip : h.get<double>();
  }
  return hp;
}

nlohmann::json to_json(const RunResult& result) {
  nlohmann::json j{{"algo", to_string(result.algo)},
                   {"problem", result.problem},
                   {"dim", result.dim},
                   {"p", result.p},
                   {"sigma", result.sigma},
                   {"family", to_string(result.family)},
                   {"T", result.T},
                   {"seed", result.seed},
                   {"avg_grad_norm", result.avg_grad_norm},
                   {"final_grad_norm", result.final_grad_norm},
                   {"final_f_gap", result.final_f_gap},
                   {"hyper", to_json(result.hyper)},
                   {"wall_ms", result.wall_ms},
                   {"failed", result.failed}};
  if (result.failed) j["failed_at"] = result.failed_at;
  return j;
}

}  // namespace normtail
