#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "normtail/common.hpp"

namespace normtail {

enum class ProblemKind { quadratic, log_smooth };

// A synthetic objective with exact gradient and certified smoothness
// constants. Immutable after construction; safe to evaluate concurrently.
struct ProblemSpec {
  std::string name;
  ProblemKind kind;
  int dim = 0;
  std::vector<double> eigenvalues;  // quadratic only
  double lipschitz_L = 0.0;
  std::optional<double> hessian_H;
  double f_min = 0.0;
  std::vector<double> w0;
  double grad_w0_norm = 0.0;  // ||grad f(w0)||, exact at construction
};

// f(w) = 1/2 sum_i lambda_i w_i^2, L = max lambda, H = 0.
// Default w0 is the all-ones vector scaled so ||grad f(w0)|| = 1.
ProblemSpec make_quadratic(int dim, std::vector<double> eigenvalues,
                           std::optional<std::vector<double>> w0 = {});

// f(w) = sum_i log(1 + w_i^2), L = 2, certified H = 4 (tight constant is
// about 2.92; an upper bound is all the schedules need).
ProblemSpec make_log_smooth(int dim, std::optional<std::vector<double>> w0 = {});

double eval_value(const ProblemSpec& problem, std::span<const double> w);
void eval_grad(const ProblemSpec& problem, std::span<const double> w,
               std::span<double> grad);

// Hessian-vector product at w, needed by the two-point operator check.
void hessian_vec(const ProblemSpec& problem, std::span<const double> w,
                 std::span<const double> v, std::span<double> out);

}  // namespace normtail
