#include "normtail/verify.hpp"

#include <algorithm>
#include <cmath>

namespace normtail {

nlohmann::json CheckReport::to_json() const {
  return nlohmann::json{{"name", name},
                        {"pass", pass},
                        {"measured", measured},
                        {"bounds", bounds},
                        {"samples", samples},
                        {"tolerance", tolerance}};
}

CheckReport check_clip_moment_bounds(const NoiseSpec& spec,
                                     std::span<const double> mean_vec, double h,
                                     long N, RngStream rng) {
  const int d = static_cast<int>(mean_vec.size());
  if (!(norm2(mean_vec) <= 0.5 * h))
    throw ConfigError("check_clip_moment_bounds: needs ||mean|| <= h/2");

  std::vector<double> g(d), clipped(d);
  std::vector<double> sum(d, 0.0);
  double sum_sq = 0.0;
  for (long i = 0; i < N; ++i) {
    SampleTicket ticket = sample_ticket(spec, d, rng);
    for (int j = 0; j < d; ++j) g[j] = mean_vec[j] + ticket.delta[j];
    clip(g, h, clipped);
    for (int j = 0; j < d; ++j) sum[j] += clipped[j];
    sum_sq += dot(clipped, clipped);
  }
  std::vector<double> mean_clip(d);
  for (int j = 0; j < d; ++j) mean_clip[j] = sum[j] / static_cast<double>(N);
  double variance = sum_sq / static_cast<double>(N) - dot(mean_clip, mean_clip);
  std::vector<double> bias_vec(d);
  for (int j = 0; j < d; ++j) bias_vec[j] = mean_clip[j] - mean_vec[j];
  double bias = norm2(bias_vec);

  double var_bound = 10.0 * std::pow(h, 2.0 - spec.p) * std::pow(spec.sigma, spec.p);
  double bias_bound = 2.0 * std::pow(spec.sigma, spec.p) * std::pow(h, -(spec.p - 1.0));

  CheckReport rep;
  rep.name = "clip_moment_bounds";
  rep.measured = {{"clipped_variance", variance}, {"clipped_bias", bias}};
  rep.bounds = {{"variance_bound", var_bound}, {"bias_bound", bias_bound}};
  rep.samples = N;
  rep.tolerance = "raw estimate vs raw bound, no slack";
  rep.pass = variance <= var_bound && bias <= bias_bound;
  return rep;
}

CheckReport check_pmoment_to_variance(const NoiseSpec& spec,
                                      const ProblemSpec& problem, double gamma,
                                      long T, long N, RngStream rng) {
  if (!spec.cutoff)
    throw ConfigError("check_pmoment_to_variance: needs a finite cutoff");
  if (spec.oracle_family != OracleFamily::linear)
    throw ConfigError("check_pmoment_to_variance: needs the linear oracle family");

  const int d = problem.dim;
  std::vector<double> g(d), grad(d);
  eval_grad(problem, problem.w0, grad);
  double sum_sq = 0.0;
  for (long i = 0; i < N; ++i) {
    SampleTicket ticket = sample_ticket(spec, d, rng);
    oracle_grad(problem, spec, ticket, problem.w0, g);
    for (int j = 0; j < d; ++j) g[j] -= grad[j];
    sum_sq += dot(g, g);
  }
  double variance = sum_sq / static_cast<double>(N);
  double B = problem.grad_w0_norm + *spec.cutoff;
  double bound = 4.0 *
                 std::pow(B + problem.lipschitz_L * gamma * static_cast<double>(T),
                          2.0 - spec.p) *
                 std::pow(spec.sigma, spec.p);

  CheckReport rep;
  rep.name = "pmoment_to_variance";
  rep.measured = {{"oracle_variance", variance}, {"B", B}};
  rep.bounds = {{"variance_bound", bound}};
  rep.samples = N;
  rep.tolerance = "raw estimate vs raw bound, no slack";
  rep.pass = variance <= bound;
  return rep;
}

CheckReport check_descent_lemma(const ProblemSpec& problem, long trials,
                                RngStream rng) {
  const int d = problem.dim;
  std::vector<double> w(d), m(d), grad(d), dir(d), w_next(d), diff(d);
  long violations = 0, skipped = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (long i = 0; i < trials; ++i) {
    rng.fill_normal(w);
    for (double& x : w) x *= 3.0;
    rng.fill_normal(m);
    double gamma = rng.uniform01();  // (0,1)
    if (norm2(m) == 0.0) {
      ++skipped;
      continue;
    }
    normalize(m, dir);
    for (int j = 0; j < d; ++j) w_next[j] = w[j] - gamma * dir[j];
    eval_grad(problem, w, grad);
    for (int j = 0; j < d; ++j) diff[j] = m[j] - grad[j];
    double lhs = eval_value(problem, w_next) - eval_value(problem, w);
    double rhs = -gamma * norm2(grad) + 2.0 * gamma * norm2(diff) +
                 0.5 * problem.lipschitz_L * gamma * gamma;
    worst_margin = std::min(worst_margin, rhs - lhs);
    if (lhs > rhs) ++violations;
  }

  CheckReport rep;
  rep.name = "descent_lemma_" + problem.name;
  rep.measured = {{"violations", static_cast<double>(violations)},
                  {"worst_margin", worst_margin},
                  {"skipped_zero_m", static_cast<double>(skipped)}};
  rep.bounds = {{"violations_allowed", 0.0}};
  rep.samples = trials;
  rep.tolerance = "exact inequality, zero violations";
  rep.pass = violations == 0;
  return rep;
}

CheckReport check_error_recursion(AlgorithmId algo, const ProblemSpec& problem,
                                  const NoiseSpec& spec,
                                  const HyperParams& hyper, RngStream rng) {
  if (algo != AlgorithmId::nsgd && algo != AlgorithmId::nsgd_vr &&
      algo != AlgorithmId::nsgdc && algo != AlgorithmId::nsgdc_vr)
    throw ConfigError("check_error_recursion: unsupported algorithm");

  Trajectory traj = run(algo, problem, spec, hyper, rng, TraceLevel::full);
  if (traj.steps.empty())
    throw ConfigError("check_error_recursion: missing full trace");

  const int d = problem.dim;
  const double th = hyper.theta;
  double max_residual = 0.0;
  double max_vr_cross_mismatch = 0.0;

  // eps^0 = m^0 - grad f(w^0) = -grad f(w^1) since w^0 = w^1.
  std::vector<double> eps_prev(d);
  for (int j = 0; j < d; ++j) eps_prev[j] = -traj.steps[0].grad_true[j];
  std::vector<double> grad_prev = traj.steps[0].grad_true;

  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const StepTrace& st = traj.steps[t];
    double eps_norm_sq = 0.0, res_sq = 0.0;
    for (int j = 0; j < d; ++j) {
      double eps = st.m[j] - st.grad_true[j];
      double s = grad_prev[j] - st.grad_true[j];
      if (uses_vr(algo)) s += st.vr_cross[j];  // s-hat^t
      double rhs = th * eps_prev[j] + th * s +
                   (1.0 - th) * (st.contrib[j] - st.grad_true[j]);
      double r = eps - rhs;
      res_sq += r * r;
      eps_norm_sq += eps * eps;
      eps_prev[j] = eps;
    }
    max_residual = std::max(max_residual,
                            std::sqrt(res_sq) / (1.0 + std::sqrt(eps_norm_sq)));
    if (uses_vr(algo) && spec.oracle_family == OracleFamily::linear)
      // Additive noise cancels between the two evaluations, so the VR
      // correction s-hat^t is exactly the deterministic gradient difference.
      for (int j = 0; j < d; ++j) {
        double shat = (grad_prev[j] - st.grad_true[j]) + st.vr_cross[j];
        max_vr_cross_mismatch = std::max(max_vr_cross_mismatch, std::abs(shat));
      }
    grad_prev = st.grad_true;
  }

  CheckReport rep;
  rep.name = std::string("error_recursion_") + to_string(algo);
  rep.measured = {{"max_relative_residual", max_residual}};
  rep.bounds = {{"residual_bound", 1e-10}};
  rep.pass = max_residual <= 1e-10;
  if (uses_vr(algo) && spec.oracle_family == OracleFamily::linear) {
    rep.measured["max_shat_norm"] = max_vr_cross_mismatch;
    rep.bounds["shat_bound"] = 0.0;
    rep.pass = rep.pass && max_vr_cross_mismatch == 0.0;
  }
  rep.samples = hyper.T;
  rep.tolerance = "1e-10 relative per step";
  return rep;
}

CheckReport check_hessian_residual(const ProblemSpec& problem, long pairs,
                                   RngStream rng) {
  if (!problem.hessian_H)
    throw ConfigError("check_hessian_residual: problem has no certified H");
  const int d = problem.dim;
  const double H = *problem.hessian_H;
  std::vector<double> x(d), y(d), gx(d), gy(d), diff(d), hv(d), D(d);
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (long i = 0; i < pairs; ++i) {
    rng.fill_normal(x);
    rng.fill_normal(y);
    for (int j = 0; j < d; ++j) {
      x[j] *= 2.0;
      y[j] *= 2.0;
      diff[j] = x[j] - y[j];
    }
    eval_grad(problem, x, gx);
    eval_grad(problem, y, gy);
    hessian_vec(problem, x, diff, hv);
    for (int j = 0; j < d; ++j) D[j] = gx[j] - gy[j] - hv[j];
    double lhs = norm2(D);
    double rhs = 0.5 * H * dot(diff, diff);
    worst_margin = std::min(worst_margin, rhs - lhs);
    if (lhs > rhs + 1e-12 * (1.0 + rhs)) ++violations;
  }

  CheckReport rep;
  rep.name = "hessian_residual_" + problem.name;
  rep.measured = {{"violations", static_cast<double>(violations)},
                  {"worst_margin", worst_margin}};
  rep.bounds = {{"violations_allowed", 0.0}};
  rep.samples = pairs;
  rep.tolerance = "exact inequality, 1e-12 relative rounding slack";
  rep.pass = violations == 0;
  return rep;
}

CheckReport check_sigma_inequality(double sigma, double x, double y, double a) {
  if (!(0.0 <= x && x <= y && y <= a))
    throw ConfigError("check_sigma_inequality: needs 0 <= x <= y <= a");
  if (sigma < 0.0) throw ConfigError("check_sigma_inequality: sigma < 0");
  double lhs = std::pow(sigma, y);
  double rhs = std::pow(sigma, a) + std::pow(sigma, x);

  CheckReport rep;
  rep.name = "sigma_inequality";
  rep.measured = {{"lhs", lhs}};
  rep.bounds = {{"rhs", rhs}};
  rep.samples = 1;
  rep.tolerance = "exact";
  rep.pass = lhs <= rhs;
  return rep;
}

CheckReport check_displacement(const Trajectory& trajectory, double gamma) {
  long violations = 0;
  double max_disp = 0.0;
  for (std::size_t t = 0; t < trajectory.displacements.size(); ++t) {
    double bound = gamma * static_cast<double>(t + 1);
    max_disp = std::max(max_disp, trajectory.displacements[t]);
    if (trajectory.displacements[t] > bound * (1.0 + 1e-12)) ++violations;
  }

  CheckReport rep;
  rep.name = "displacement";
  rep.measured = {{"violations", static_cast<double>(violations)},
                  {"max_displacement", max_disp}};
  rep.bounds = {{"violations_allowed", 0.0},
                {"gamma_T", gamma * static_cast<double>(trajectory.T)}};
  rep.samples = static_cast<long>(trajectory.displacements.size());
  rep.tolerance = "per-iteration gamma*t bound, 1e-12 relative rounding slack";
  rep.pass = violations == 0;  // vacuously true for an empty trajectory
  return rep;
}

CheckReport check_general_normalize_contract(NormalizeKind kind, int dim,
                                             long trials, RngStream rng) {
  const double l = 1.0;
  const double U =
      kind == NormalizeKind::l2 ? 1.0 : std::sqrt(static_cast<double>(dim));
  std::vector<double> x(dim), gx(dim);
  long violations = 0;
  for (long i = 0; i < trials; ++i) {
    rng.fill_normal(x);
    general_normalize(x, kind, gx);
    double inner = dot(x, gx);
    double diamond = kind == NormalizeKind::l2 ? norm2(x) : norm1(x);
    if (inner < l * diamond - 1e-12 * (1.0 + diamond)) ++violations;
    if (norm2(gx) > U * (1.0 + 1e-12)) ++violations;
  }

  CheckReport rep;
  rep.name = std::string("general_normalize_contract_") +
             (kind == NormalizeKind::l2 ? "l2" : "sign");
  rep.measured = {{"violations", static_cast<double>(violations)}};
  rep.bounds = {{"violations_allowed", 0.0}, {"l", l}, {"U", U}};
  rep.samples = trials;
  rep.tolerance = "exact inequality, 1e-12 relative rounding slack";
  rep.pass = violations == 0;
  return rep;
}

std::vector<CheckReport> run_default_suite(std::uint64_t master_seed) {
  std::vector<CheckReport> reports;
  RngStream root(RngStream::mix(master_seed));

  // Lemma-level Monte Carlo checks at the stock heavy-tail setting.
  {
    NoiseSpec spec = make_noise(1.5, 1.0, NoiseFamily::pareto_radial);
    std::vector<double> mean(10, 0.0);
    mean[0] = 5.0;
    reports.push_back(
        check_clip_moment_bounds(spec, mean, 20.0, 200000, root.fork(1)));
  }
  {
    NoiseSpec spec =
        make_noise(1.5, 1.0, NoiseFamily::pareto_radial, {}, 1000.0);
    ProblemSpec problem = make_log_smooth(10);
    HyperParams hp = params_nsgd(1.0, 1.5, problem.lipschitz_L, 4096);
    reports.push_back(check_pmoment_to_variance(spec, problem, hp.gamma, hp.T,
                                                200000, root.fork(2)));
  }

  ProblemSpec quad = make_quadratic(8, std::vector<double>(8, 1.0));
  ProblemSpec logs = make_log_smooth(8);
  reports.push_back(check_descent_lemma(quad, 10000, root.fork(3)));
  reports.push_back(check_descent_lemma(logs, 10000, root.fork(4)));
  reports.push_back(check_hessian_residual(quad, 10000, root.fork(5)));
  reports.push_back(check_hessian_residual(logs, 10000, root.fork(6)));

  {
    NoiseSpec spec = make_noise(1.5, 1.0, NoiseFamily::pareto_radial);
    for (AlgorithmId algo : {AlgorithmId::nsgd, AlgorithmId::nsgd_vr,
                             AlgorithmId::nsgdc, AlgorithmId::nsgdc_vr}) {
      double g0 = logs.grad_w0_norm;
      HyperParams hp;
      switch (algo) {
        case AlgorithmId::nsgd: hp = params_nsgd(1.0, 1.5, 2.0, 200); break;
        case AlgorithmId::nsgd_vr: hp = params_nsgd_vr(1.0, 1.5, 2.0, 200); break;
        case AlgorithmId::nsgdc: hp = params_nsgdc(1.0, 1.5, 2.0, 200, g0); break;
        default: hp = params_nsgdc_vr(1.0, 1.5, 2.0, 200, g0); break;
      }
      reports.push_back(check_error_recursion(
          algo, logs, spec, hp, root.fork(10 + static_cast<int>(algo))));
    }
  }

  reports.push_back(check_sigma_inequality(0.5, 0.25, 0.5, 1.0));
  reports.push_back(check_sigma_inequality(1.0, 0.0, 1.0, 2.0));

  {
    NoiseSpec spec = make_noise(1.5, 1.0, NoiseFamily::pareto_radial);
    HyperParams hp = params_nsgd(1.0, 1.5, 2.0, 512);
    Trajectory traj =
        run(AlgorithmId::nsgd, logs, spec, hp, root.fork(20), TraceLevel::summary);
    reports.push_back(check_displacement(traj, hp.gamma));
  }

  reports.push_back(
      check_general_normalize_contract(NormalizeKind::l2, 8, 10000, root.fork(21)));
  reports.push_back(
      check_general_normalize_contract(NormalizeKind::sign, 8, 10000, root.fork(22)));
  return reports;
}

}  // namespace normtail
