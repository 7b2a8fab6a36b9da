#pragma once

#include <span>
#include <string>
#include <vector>

#include "normtail/common.hpp"
#include "normtail/noise.hpp"
#include "normtail/problems.hpp"
#include "normtail/rng.hpp"
#include "normtail/schedules.hpp"

namespace normtail {

enum class AlgorithmId {
  sgd_plain,  // unclipped baseline, diverges under heavy tails
  sgdc,
  nsgd,
  nsgd_vr,
  nsgdc,
  nsgdc_vr,
  a_nsgdc,
  a_nsgd,
};

const char* to_string(AlgorithmId algo);
AlgorithmId algorithm_from_string(const std::string& s);

bool uses_clipping(AlgorithmId algo);
bool uses_vr(AlgorithmId algo);
bool uses_extrapolation(AlgorithmId algo);
bool uses_normalization(AlgorithmId algo);

// Radial projection onto the ball of radius h; direction is preserved.
// clip(0, h) = 0 and h = infinity is the identity.
void clip(std::span<const double> v, double h, std::span<double> out);

// Unit direction m/||m||; the zero vector maps to itself, which freezes the
// iterate for that step and keeps the step-length law ||w' - w|| <= gamma.
void normalize(std::span<const double> m, std::span<double> out);

enum class NormalizeKind { l2, sign };

// l2 is normalize(); sign is the coordinatewise sign map (zero stays zero).
void general_normalize(std::span<const double> x, NormalizeKind kind,
                       std::span<double> out);

enum class TraceLevel { none, summary, full };

// Per-step record kept at TraceLevel::full; enough to replay the momentum
// error recursions exactly.
struct StepTrace {
  std::vector<double> grad_true;   // grad f(w^t)
  std::vector<double> contrib;     // the term fed to the momentum average:
                                   // Clip_h(g^t) for clipping algos, g^t otherwise
  std::vector<double> vr_cross;    // grad f(w^t;xi) - grad f(w^{t-1};xi), VR only
  std::vector<double> m;           // m^t
};

struct OptimizerState {
  long t = 1;
  std::vector<double> w_curr;  // w^t
  std::vector<double> w_prev;  // w^{t-1}; equals w_curr at t = 1
  std::vector<double> m;       // m^{t-1} before step(), m^t after
};

OptimizerState init_state(const ProblemSpec& problem);

// One iteration: draws exactly one ticket (from run_stream.fork(t)), updates
// m and w, advances t. VR variants evaluate the oracle twice with that one
// ticket; accelerated variants evaluate it once at the extrapolated point.
// Throws NumericalError if the new state is non-finite.
void step(AlgorithmId algo, OptimizerState& state, const ProblemSpec& problem,
          const NoiseSpec& spec, const HyperParams& hyper,
          const RngStream& run_stream, StepTrace* trace = nullptr);

struct Trajectory {
  AlgorithmId algo;
  HyperParams hyper;
  long T = 0;
  double avg_grad_norm = 0.0;  // (1/T) sum_t ||grad f(w^t)||, the headline metric
  double final_grad_norm = 0.0;
  double final_f_gap = 0.0;
  std::vector<double> w_final;
  // TraceLevel::summary and above:
  std::vector<double> grad_norms;     // ||grad f(w^t)||, t = 1..T
  std::vector<double> f_gaps;         // f(w^t) - f_min
  std::vector<double> eps_norms;      // ||m^t - grad f(w^t)||
  std::vector<double> displacements;  // ||w^{t+1} - w^0|| after step t
  // TraceLevel::full only:
  std::vector<StepTrace> steps;
};

Trajectory run(AlgorithmId algo, const ProblemSpec& problem,
               const NoiseSpec& spec, const HyperParams& hyper,
               const RngStream& stream, TraceLevel trace_level = TraceLevel::none);

}  // namespace normtail
