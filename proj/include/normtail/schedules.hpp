#pragma once

#include <limits>
#include <string>

#include "normtail/common.hpp"

namespace normtail {

enum class ScheduleSource {
  theorem1,
  theorem2,
  theorem3,
  theorem4,
  theorem5,
  proposition1,
  baseline,
  manual,
};

const char* to_string(ScheduleSource source);

constexpr double kInfiniteClip = std::numeric_limits<double>::infinity();

// (theta, gamma, h, zeta, T) bundle. h = infinity encodes "no clipping".
struct HyperParams {
  double theta = 0.0;
  double gamma = 0.0;
  double h = kInfiniteClip;
  double zeta = 0.0;
  long T = 0;
  ScheduleSource source = ScheduleSource::manual;
};

void validate(const HyperParams& hyper);

// Momentum schedule for plain normalized SGD:
//   1-theta = min(1/(sigma^{1/2} T^{p/(3p-2)}), 1), gamma = sqrt(1-theta)/(L sqrt(T)).
HyperParams params_nsgd(double sigma, double p, double L, long T);

// Variance-reduced variant: exponent p/(2p-1), gamma = (1-theta)^{1/4}/(L sqrt(T)).
HyperParams params_nsgd_vr(double sigma, double p, double L, long T);

// NSGD schedule plus clipping radius h = 2(gamma L T^{2p/(3p-2)} + g0); the
// exponent exceeds 1 for p <= 2, so h >= 2(g0 + L gamma T) always holds.
HyperParams params_nsgdc(double sigma, double p, double L, long T,
                         double grad_w0_norm);

// NSGD-VR schedule plus h = 2(gamma L T^{(5p+2)/(8p-4)} + g0).
HyperParams params_nsgdc_vr(double sigma, double p, double L, long T,
                            double grad_w0_norm);

// Accelerated schedule: 1-theta = min(1/(sigma^{1/2} T^{2p/(4p-1)}), 1),
// gamma = (1-theta)^{3/(4p)}/(L sqrt(T)), h = 2(gamma L T^{(2p+3)/(4p-1)} + g0),
// zeta = theta/(1-theta).
HyperParams params_ansgdc(double sigma, double p, double L, long T,
                          double grad_w0_norm);

// Same theta, gamma, zeta as params_ansgdc with h = infinity.
HyperParams params_ansgd(double sigma, double p, double L, long T);

// Clipped-SGD baseline: theta = 0, gamma = 1/(L sqrt(T)), default
// h = sigma T^{1/(3p-2)} (a heuristic following the known SGDC rate scaling;
// grid-overridable). sigma = 0 disables clipping.
HyperParams params_sgdc_baseline(double sigma, double p, double L, long T);

}  // namespace normtail
