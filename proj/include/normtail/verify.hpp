#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "normtail/noise.hpp"
#include "normtail/optimizers.hpp"
#include "normtail/problems.hpp"
#include "normtail/rng.hpp"
#include "normtail/schedules.hpp"

#include <json.hpp>

namespace normtail {

// One executable check: measured quantities against their bounds.
// pass iff every measured quantity satisfies its stated bound.
struct CheckReport {
  std::string name;
  bool pass = false;
  std::map<std::string, double> measured;
  std::map<std::string, double> bounds;
  long samples = 0;
  std::string tolerance;  // policy actually applied

  nlohmann::json to_json() const;
};

// Monte Carlo check of the clipped-moment bounds
//   E||Clip_h(g) - E Clip_h(g)||^2 <= 10 h^{2-p} sigma^p
//   ||E Clip_h(g) - mean||        <= 2 sigma^p h^{-(p-1)}
// with g = mean_vec + delta. Requires ||mean_vec|| <= h/2.
CheckReport check_clip_moment_bounds(const NoiseSpec& spec,
                                     std::span<const double> mean_vec, double h,
                                     long N, RngStream rng);

// Monte Carlo check of E||grad f(w0;xi) - grad f(w0)||^2 <= 4(B+L gamma T)^{2-p} sigma^p
// with B = grad_w0_norm + cutoff. Requires a finite cutoff and the linear
// oracle family.
CheckReport check_pmoment_to_variance(const NoiseSpec& spec,
                                      const ProblemSpec& problem, double gamma,
                                      long T, long N, RngStream rng);

// Deterministic inequality, random (w, m, gamma) triples:
//   f(w - gamma m/||m||) - f(w) <= -gamma||grad f(w)|| + 2 gamma||m - grad f(w)|| + L gamma^2/2
CheckReport check_descent_lemma(const ProblemSpec& problem, long trials,
                                RngStream rng);

// Replays the momentum-error recursion from a fully traced run and asserts
//   eps^t = theta eps^{t-1} + theta s^t + (1-theta)(contrib^t - grad f(w^t))
// (with s^t replaced by s-hat^t for the VR variants) to 1e-10 relative.
CheckReport check_error_recursion(AlgorithmId algo, const ProblemSpec& problem,
                                  const NoiseSpec& spec,
                                  const HyperParams& hyper, RngStream rng);

// ||grad f(x) - grad f(y) - H_f(x)(x-y)|| <= (H/2)||x-y||^2 on random pairs.
CheckReport check_hessian_residual(const ProblemSpec& problem, long pairs,
                                   RngStream rng);

// sigma^y <= sigma^a + sigma^x for 0 <= x <= y <= a.
CheckReport check_sigma_inequality(double sigma, double x, double y, double a);

// ||w^t - w^0|| <= gamma * t for every recorded iteration.
CheckReport check_displacement(const Trajectory& trajectory, double gamma);

// <x, G(x)> >= l ||x||_diamond and ||G(x)|| <= U on random vectors, with
// (l, U, diamond) = (1, 1, l2) or (1, sqrt(d), l1).
CheckReport check_general_normalize_contract(NormalizeKind kind, int dim,
                                             long trials, RngStream rng);

// The stock suite behind the `verify` CLI subcommand.
std::vector<CheckReport> run_default_suite(std::uint64_t master_seed);

}  // namespace normtail
