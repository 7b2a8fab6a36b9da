#include "normtail/schedules.hpp"

#include <cmath>

namespace normtail {

const char* to_string(ScheduleSource source) {
  switch (source) {
    case ScheduleSource::theorem1: return "theorem1";
    case ScheduleSource::theorem2: return "theorem2";
    case ScheduleSource::theorem3: return "theorem3";
    case ScheduleSource::theorem4: return "theorem4";
    case ScheduleSource::theorem5: return "theorem5";
    case ScheduleSource::proposition1: return "proposition1";
    case ScheduleSource::baseline: return "baseline";
    case ScheduleSource::manual: return "manual";
  }
  return "?";
}

void validate(const HyperParams& hyper) {
  if (!(hyper.theta >= 0.0 && hyper.theta < 1.0))
    throw ConfigError("hyper: theta must lie in [0,1)");
  if (!(hyper.gamma > 0.0)) throw ConfigError("hyper: gamma must be positive");
  if (!(hyper.h > 0.0)) throw ConfigError("hyper: h must be positive");
  if (hyper.zeta < 0.0) throw ConfigError("hyper: zeta must be nonnegative");
  if (hyper.T < 1) throw ConfigError("hyper: T must be positive");
}

namespace {

void check_inputs(double sigma, double p, double L, long T) {
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError("schedule: p must lie in (1,2]");
  if (!(L > 0.0)) throw ConfigError("schedule: L must be positive");
  if (T < 1) throw ConfigError("schedule: T must be positive");
  if (sigma < 0.0) throw ConfigError("schedule: sigma must be nonnegative");
}

// min{1/(sigma^{1/2} T^e), 1}; sigma = 0 lands on the deterministic branch.
double one_minus_theta(double sigma, long T, double e) {
  if (sigma == 0.0) return 1.0;
  double s = std::sqrt(sigma) * std::pow(static_cast<double>(T), e);
  return s >= 1.0 ? 1.0 / s : 1.0;
}

double clip_radius(double gamma, double L, long T, double exponent,
                   double grad_w0_norm) {
  return 2.0 * (gamma * L * std::pow(static_cast<double>(T), exponent) +
                grad_w0_norm);
}

}  // namespace

HyperParams params_nsgd(double sigma, double p, double L, long T) {
  check_inputs(sigma, p, L, T);
  HyperParams hp;
  double om = one_minus_theta(sigma, T, p / (3.0 * p - 2.0));
  hp.theta = 1.0 - om;
  hp.gamma = std::sqrt(om) / (L * std::sqrt(static_cast<double>(T)));
  hp.T = T;
  hp.source = ScheduleSource::theorem1;
  return hp;
}

HyperParams params_nsgd_vr(double sigma, double p, double L, long T) {
  check_inputs(sigma, p, L, T);
  HyperParams hp;
  double om = one_minus_theta(sigma, T, p / (2.0 * p - 1.0));
  hp.theta = 1.0 - om;
  hp.gamma = std::pow(om, 0.25) / (L * std::sqrt(static_cast<double>(T)));
  hp.T = T;
  hp.source = ScheduleSource::theorem2;
  return hp;
}

HyperParams params_nsgdc(double sigma, double p, double L, long T,
                         double grad_w0_norm) {
  if (grad_w0_norm < 0.0) throw ConfigError("schedule: grad_w0_norm < 0");
  HyperParams hp = params_nsgd(sigma, p, L, T);
  hp.h = clip_radius(hp.gamma, L, T, 2.0 * p / (3.0 * p - 2.0), grad_w0_norm);
  hp.source = ScheduleSource::theorem3;
  return hp;
}

HyperParams params_nsgdc_vr(double sigma, double p, double L, long T,
                            double grad_w0_norm) {
  if (grad_w0_norm < 0.0) throw ConfigError("schedule: grad_w0_norm < 0");
  HyperParams hp = params_nsgd_vr(sigma, p, L, T);
  hp.h = clip_radius(hp.gamma, L, T, (5.0 * p + 2.0) / (8.0 * p - 4.0),
                     grad_w0_norm);
  hp.source = ScheduleSource::theorem4;
  return hp;
}

HyperParams params_ansgdc(double sigma, double p, double L, long T,
                          double grad_w0_norm) {
  if (grad_w0_norm < 0.0) throw ConfigError("schedule: grad_w0_norm < 0");
  check_inputs(sigma, p, L, T);
  HyperParams hp;
  double om = one_minus_theta(sigma, T, 2.0 * p / (4.0 * p - 1.0));
  hp.theta = 1.0 - om;
  hp.gamma = std::pow(om, 3.0 / (4.0 * p)) / (L * std::sqrt(static_cast<double>(T)));
  hp.h = clip_radius(hp.gamma, L, T, (2.0 * p + 3.0) / (4.0 * p - 1.0),
                     grad_w0_norm);
  hp.zeta = hp.theta / om;
  hp.T = T;
  hp.source = ScheduleSource::theorem5;
  return hp;
}

HyperParams params_ansgd(double sigma, double p, double L, long T) {
  HyperParams hp = params_ansgdc(sigma, p, L, T, 0.0);
  hp.h = kInfiniteClip;
  hp.source = ScheduleSource::proposition1;
  return hp;
}

HyperParams params_sgdc_baseline(double sigma, double p, double L, long T) {
  check_inputs(sigma, p, L, T);
  HyperParams hp;
  hp.theta = 0.0;
  hp.gamma = 1.0 / (L * std::sqrt(static_cast<double>(T)));
  hp.h = sigma == 0.0
             ? kInfiniteClip
             : sigma * std::pow(static_cast<double>(T), 1.0 / (3.0 * p - 2.0));
  hp.T = T;
  hp.source = ScheduleSource::baseline;
  return hp;
}

}  // namespace normtail
