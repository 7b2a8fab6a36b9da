#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "normtail/common.hpp"
#include "normtail/problems.hpp"
#include "normtail/rng.hpp"

namespace normtail {

enum class NoiseFamily { none, pareto_radial, gaussian };
enum class OracleFamily { linear, quadratic };

const char* to_string(NoiseFamily family);
NoiseFamily noise_family_from_string(const std::string& s);

// Heavy-tailed perturbation family with exactly calibrated p-th moment:
// E||delta||^p = sigma^p (<= sigma^p when truncated at cutoff).
struct NoiseSpec {
  double p = 2.0;        // tail index, in (1,2]
  double sigma = 0.0;
  NoiseFamily family = NoiseFamily::none;
  double alpha = 0.0;    // pareto_radial tail exponent, p < alpha
  std::optional<double> cutoff;  // truncation radius, makes the a.s. bound finite
  OracleFamily oracle_family = OracleFamily::linear;
  double beta = 0.0;     // quadratic oracle slope bound, |b| <= beta
};

// Default Pareto tail exponent: strictly between p and 2, so the p-th moment
// is finite while the variance is not.
inline double default_alpha(double p) { return 0.5 * (p + 2.0); }

// Validates fields and fills defaults (alpha, beta). Throws ConfigError on
// inconsistent settings.
NoiseSpec make_noise(double p, double sigma, NoiseFamily family,
                     std::optional<double> alpha = {},
                     std::optional<double> cutoff = {},
                     OracleFamily oracle_family = OracleFamily::linear,
                     std::optional<double> beta = {});

// Pareto scale x_m solving E[R^p] = alpha * x_m^p / (alpha - p) = sigma^p.
double calibrate_pareto(double p, double sigma, double alpha);

// One sample xi: the drawn perturbation parameters. Evaluating the oracle
// twice with the same ticket yields bit-identical gradients, which is what
// lets the VR correction reuse one sample at two points.
struct SampleTicket {
  std::vector<double> delta;  // additive mean-zero perturbation
  double slope = 0.0;         // b, quadratic oracle family only
};

SampleTicket sample_ticket(const NoiseSpec& spec, int dim, RngStream& rng);

// Stochastic gradient grad f(w; xi).
//   linear:    grad f(w) + delta
//   quadratic: grad f(w) + delta + b * (w - w0)
void oracle_grad(const ProblemSpec& problem, const NoiseSpec& spec,
                 const SampleTicket& ticket, std::span<const double> w,
                 std::span<double> out);

// grad f(w_a; xi) - grad f(w_b; xi) for one ticket. The shared additive delta
// cancels analytically here, so for the linear family the result is exactly
// grad f(w_a) - grad f(w_b) with no floating-point residue (the VR recursion
// checks assert this cancellation to zero error).
void oracle_grad_diff(const ProblemSpec& problem, const NoiseSpec& spec,
                      const SampleTicket& ticket, std::span<const double> w_a,
                      std::span<const double> w_b, std::span<double> out);

}  // namespace normtail
