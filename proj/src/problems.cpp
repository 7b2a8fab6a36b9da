#include "normtail/problems.hpp"

#include <algorithm>
#include <cmath>

namespace normtail {

namespace {

void check_dim(const ProblemSpec& problem, std::span<const double> w) {
  if (static_cast<int>(w.size()) != problem.dim)
    throw ConfigError("dimension mismatch: problem dim " +
                      std::to_string(problem.dim) + ", vector size " +
                      std::to_string(w.size()));
}

void finish(ProblemSpec& p) {
  std::vector<double> g(p.dim);
  eval_grad(p, p.w0, g);
  p.grad_w0_norm = norm2(g);
}

}  // namespace

ProblemSpec make_quadratic(int dim, std::vector<double> eigenvalues,
                           std::optional<std::vector<double>> w0) {
  if (dim < 1) throw ConfigError("make_quadratic: dim must be positive");
  if (static_cast<int>(eigenvalues.size()) != dim)
    throw ConfigError("make_quadratic: eigenvalue count must equal dim");
  for (double ev : eigenvalues)
    if (!(ev > 0.0)) throw ConfigError("make_quadratic: eigenvalues must be positive");

  ProblemSpec p;
  p.name = "quadratic";
  p.kind = ProblemKind::quadratic;
  p.dim = dim;
  p.eigenvalues = std::move(eigenvalues);
  p.lipschitz_L = *std::max_element(p.eigenvalues.begin(), p.eigenvalues.end());
  p.hessian_H = 0.0;
  p.f_min = 0.0;
  if (w0) {
    if (static_cast<int>(w0->size()) != dim)
      throw ConfigError("make_quadratic: w0 size must equal dim");
    p.w0 = std::move(*w0);
  } else {
    // grad at c*1 is (c*lambda_i), so c = 1/||lambda|| gives unit grad norm.
    double c = 1.0 / norm2(p.eigenvalues);
    p.w0.assign(dim, c);
  }
  finish(p);
  return p;
}

ProblemSpec make_log_smooth(int dim, std::optional<std::vector<double>> w0) {
  if (dim < 1) throw ConfigError("make_log_smooth: dim must be positive");

  ProblemSpec p;
  p.name = "log_smooth";
  p.kind = ProblemKind::log_smooth;
  p.dim = dim;
  p.lipschitz_L = 2.0;
  p.hessian_H = 4.0;
  p.f_min = 0.0;
  if (w0) {
    if (static_cast<int>(w0->size()) != dim)
      throw ConfigError("make_log_smooth: w0 size must equal dim");
    p.w0 = std::move(*w0);
  } else {
    // grad at c*1 has norm sqrt(d)*2c/(1+c^2); the root in (0,1) of
    // c^2 - 2*sqrt(d)*c + 1 = 0 makes it exactly 1.
    double sd = std::sqrt(static_cast<double>(dim));
    double c = sd - std::sqrt(static_cast<double>(dim) - 1.0);
    p.w0.assign(dim, c);
  }
  finish(p);
  return p;
}

double eval_value(const ProblemSpec& problem, std::span<const double> w) {
  check_dim(problem, w);
  double f = 0.0;
  switch (problem.kind) {
    case ProblemKind::quadratic:
      for (int i = 0; i < problem.dim; ++i)
        f += 0.5 * problem.eigenvalues[i] * w[i] * w[i];
      break;
    case ProblemKind::log_smooth:
      for (int i = 0; i < problem.dim; ++i) f += std::log1p(w[i] * w[i]);
      break;
  }
  return f;
}

void eval_grad(const ProblemSpec& problem, std::span<const double> w,
               std::span<double> grad) {
  check_dim(problem, w);
  check_dim(problem, grad);
  switch (problem.kind) {
    case ProblemKind::quadratic:
      for (int i = 0; i < problem.dim; ++i)
        grad[i] = problem.eigenvalues[i] * w[i];
      break;
    case ProblemKind::log_smooth:
      for (int i = 0; i < problem.dim; ++i)
        grad[i] = 2.0 * w[i] / (1.0 + w[i] * w[i]);
      break;
  }
}

void hessian_vec(const ProblemSpec& problem, std::span<const double> w,
                 std::span<const double> v, std::span<double> out) {
  check_dim(problem, w);
  check_dim(problem, v);
  check_dim(problem, out);
  switch (problem.kind) {
    case ProblemKind::quadratic:
      for (int i = 0; i < problem.dim; ++i)
        out[i] = problem.eigenvalues[i] * v[i];
      break;
    case ProblemKind::log_smooth:
      // g''(x) = 2(1 - x^2)/(1 + x^2)^2, diagonal Hessian.
      for (int i = 0; i < problem.dim; ++i) {
        double s = 1.0 + w[i] * w[i];
        out[i] = 2.0 * (1.0 - w[i] * w[i]) / (s * s) * v[i];
      }
      break;
  }
}

}  // namespace normtail
