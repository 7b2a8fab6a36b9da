#include "normtail/noise.hpp"

#include <cmath>

namespace normtail {

const char* to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::none: return "none";
    case NoiseFamily::pareto_radial: return "pareto_radial";
    case NoiseFamily::gaussian: return "gaussian";
  }
  return "?";
}

NoiseFamily noise_family_from_string(const std::string& s) {
  if (s == "none") return NoiseFamily::none;
  if (s == "pareto_radial") return NoiseFamily::pareto_radial;
  if (s == "gaussian") return NoiseFamily::gaussian;
  throw ConfigError("unknown noise family: " + s);
}

NoiseSpec make_noise(double p, double sigma, NoiseFamily family,
                     std::optional<double> alpha, std::optional<double> cutoff,
                     OracleFamily oracle_family, std::optional<double> beta) {
  if (!(p > 1.0) || !(p <= 2.0))
    throw ConfigError("noise: p must lie in (1,2]");
  if (sigma < 0.0) throw ConfigError("noise: sigma must be nonnegative");
  if ((family == NoiseFamily::none) != (sigma == 0.0))
    throw ConfigError("noise: family=none iff sigma=0");
  if (cutoff && !(*cutoff > 0.0))
    throw ConfigError("noise: cutoff must be positive");

  NoiseSpec spec;
  spec.p = p;
  spec.sigma = sigma;
  spec.family = family;
  spec.cutoff = cutoff;
  spec.oracle_family = oracle_family;
  spec.beta = beta.value_or(0.0);
  if (family == NoiseFamily::pareto_radial) {
    spec.alpha = alpha.value_or(default_alpha(p));
    if (!(spec.alpha > p))
      throw ConfigError("noise: pareto_radial needs alpha > p (finite p-th moment)");
  }
  return spec;
}

double calibrate_pareto(double p, double sigma, double alpha) {
  if (sigma == 0.0) return 0.0;
  if (!(alpha > p))
    throw ConfigError("calibrate_pareto: alpha <= p gives an infinite p-th moment");
  return sigma * std::pow((alpha - p) / alpha, 1.0 / p);
}

SampleTicket sample_ticket(const NoiseSpec& spec, int dim, RngStream& rng) {
  SampleTicket ticket;
  ticket.delta.assign(dim, 0.0);

  switch (spec.family) {
    case NoiseFamily::none:
      break;
    case NoiseFamily::pareto_radial: {
      double x_m = calibrate_pareto(spec.p, spec.sigma, spec.alpha);
      // Radius via inverse CDF, direction uniform on the unit sphere.
      double r = x_m * std::pow(rng.uniform01(), -1.0 / spec.alpha);
      if (spec.cutoff && r > *spec.cutoff) r = *spec.cutoff;
      rng.fill_normal(ticket.delta);
      double n = norm2(ticket.delta);
      if (n > 0.0)
        for (double& x : ticket.delta) x *= r / n;
      break;
    }
    case NoiseFamily::gaussian: {
      // Per-coordinate sd sigma/sqrt(d), so E||delta||^2 = sigma^2.
      double sd = spec.sigma / std::sqrt(static_cast<double>(dim));
      rng.fill_normal(ticket.delta);
      for (double& x : ticket.delta) x *= sd;
      if (spec.cutoff) {
        double n = norm2(ticket.delta);
        if (n > *spec.cutoff)
          for (double& x : ticket.delta) x *= *spec.cutoff / n;
      }
      break;
    }
  }

  if (spec.oracle_family == OracleFamily::quadratic)
    ticket.slope = spec.beta * (2.0 * rng.uniform01() - 1.0);
  return ticket;
}

void oracle_grad(const ProblemSpec& problem, const NoiseSpec& spec,
                 const SampleTicket& ticket, std::span<const double> w,
                 std::span<double> out) {
  if (static_cast<int>(ticket.delta.size()) != problem.dim)
    throw ConfigError("oracle_grad: ticket drawn for a different dimension");
  eval_grad(problem, w, out);
  for (int i = 0; i < problem.dim; ++i) out[i] += ticket.delta[i];
  if (spec.oracle_family == OracleFamily::quadratic)
    for (int i = 0; i < problem.dim; ++i)
      out[i] += ticket.slope * (w[i] - problem.w0[i]);
}

void oracle_grad_diff(const ProblemSpec& problem, const NoiseSpec& spec,
                      const SampleTicket& ticket, std::span<const double> w_a,
                      std::span<const double> w_b, std::span<double> out) {
  if (static_cast<int>(ticket.delta.size()) != problem.dim)
    throw ConfigError("oracle_grad_diff: ticket drawn for a different dimension");
  std::vector<double> grad_b(problem.dim);
  eval_grad(problem, w_a, out);
  eval_grad(problem, w_b, grad_b);
  for (int i = 0; i < problem.dim; ++i) out[i] -= grad_b[i];
  if (spec.oracle_family == OracleFamily::quadratic)
    for (int i = 0; i < problem.dim; ++i)
      out[i] += ticket.slope * (w_a[i] - w_b[i]);
}

}  // namespace normtail
