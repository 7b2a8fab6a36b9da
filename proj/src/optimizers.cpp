#include "normtail/optimizers.hpp"

#include <cmath>

namespace normtail {

const char* to_string(AlgorithmId algo) {
  switch (algo) {
    case AlgorithmId::sgd_plain: return "sgd_plain";
    case AlgorithmId::sgdc: return "sgdc";
    case AlgorithmId::nsgd: return "nsgd";
    case AlgorithmId::nsgd_vr: return "nsgd_vr";
    case AlgorithmId::nsgdc: return "nsgdc";
    case AlgorithmId::nsgdc_vr: return "nsgdc_vr";
    case AlgorithmId::a_nsgdc: return "a_nsgdc";
    case AlgorithmId::a_nsgd: return "a_nsgd";
  }
  return "?";
}

AlgorithmId algorithm_from_string(const std::string& s) {
  if (s == "sgd_plain") return AlgorithmId::sgd_plain;
  if (s == "sgdc") return AlgorithmId::sgdc;
  if (s == "nsgd") return AlgorithmId::nsgd;
  if (s == "nsgd_vr") return AlgorithmId::nsgd_vr;
  if (s == "nsgdc") return AlgorithmId::nsgdc;
  if (s == "nsgdc_vr") return AlgorithmId::nsgdc_vr;
  if (s == "a_nsgdc") return AlgorithmId::a_nsgdc;
  if (s == "a_nsgd") return AlgorithmId::a_nsgd;
  throw ConfigError("unknown algorithm: " + s);
}

bool uses_clipping(AlgorithmId algo) {
  return algo == AlgorithmId::sgdc || algo == AlgorithmId::nsgdc ||
         algo == AlgorithmId::nsgdc_vr || algo == AlgorithmId::a_nsgdc;
}

bool uses_vr(AlgorithmId algo) {
  return algo == AlgorithmId::nsgd_vr || algo == AlgorithmId::nsgdc_vr;
}

bool uses_extrapolation(AlgorithmId algo) {
  return algo == AlgorithmId::a_nsgdc || algo == AlgorithmId::a_nsgd;
}

bool uses_normalization(AlgorithmId algo) {
  return algo != AlgorithmId::sgd_plain && algo != AlgorithmId::sgdc;
}

void clip(std::span<const double> v, double h, std::span<double> out) {
  double n = norm2(v);
  double scale = (n > h) ? h / n : 1.0;  // covers h = inf and v = 0
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = scale * v[i];
}

void normalize(std::span<const double> m, std::span<double> out) {
  double n = norm2(m);
  if (n == 0.0) {
    for (double& x : out) x = 0.0;
    return;
  }
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] / n;
}

void general_normalize(std::span<const double> x, NormalizeKind kind,
                       std::span<double> out) {
  switch (kind) {
    case NormalizeKind::l2:
      normalize(x, out);
      break;
    case NormalizeKind::sign:
      for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = (x[i] > 0.0) ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
      break;
  }
}

OptimizerState init_state(const ProblemSpec& problem) {
  OptimizerState state;
  state.t = 1;
  state.w_curr = problem.w0;  // w^1 = w^0
  state.w_prev = problem.w0;
  state.m.assign(problem.dim, 0.0);
  return state;
}

void step(AlgorithmId algo, OptimizerState& state, const ProblemSpec& problem,
          const NoiseSpec& spec, const HyperParams& hyper,
          const RngStream& run_stream, StepTrace* trace) {
  const int d = problem.dim;
  if (static_cast<int>(state.w_curr.size()) != d)
    throw ConfigError("step: state dimension mismatch");

  RngStream ticket_rng = run_stream.fork(static_cast<std::uint64_t>(state.t));
  SampleTicket ticket = sample_ticket(spec, d, ticket_rng);

  // Point where the oracle is queried: w^t, or v^t for extrapolated variants.
  std::vector<double> query = state.w_curr;
  if (uses_extrapolation(algo) && hyper.zeta != 0.0)
    for (int i = 0; i < d; ++i)
      query[i] += hyper.zeta * (state.w_curr[i] - state.w_prev[i]);

  std::vector<double> g(d);
  oracle_grad(problem, spec, ticket, query, g);

  std::vector<double> contrib = g;
  if (uses_clipping(algo)) clip(g, hyper.h, contrib);

  std::vector<double> vr_cross;
  if (uses_vr(algo)) {
    // Same ticket at both points; redrawing here would silently destroy the
    // variance-reduction identity. The shared delta cancels analytically.
    vr_cross.resize(d);
    oracle_grad_diff(problem, spec, ticket, state.w_curr, state.w_prev, vr_cross);
  }

  const double th = hyper.theta;
  switch (algo) {
    case AlgorithmId::sgd_plain:
    case AlgorithmId::sgdc:
      state.m = contrib;
      break;
    case AlgorithmId::nsgd:
    case AlgorithmId::nsgdc:
    case AlgorithmId::a_nsgd:
    case AlgorithmId::a_nsgdc:
      for (int i = 0; i < d; ++i)
        state.m[i] = th * state.m[i] + (1.0 - th) * contrib[i];
      break;
    case AlgorithmId::nsgd_vr:
      for (int i = 0; i < d; ++i)
        state.m[i] = th * state.m[i] + contrib[i] - th * (contrib[i] - vr_cross[i]);
      break;
    case AlgorithmId::nsgdc_vr:
      for (int i = 0; i < d; ++i)
        state.m[i] = th * state.m[i] + (1.0 - th) * contrib[i] + th * vr_cross[i];
      break;
  }

  std::vector<double> direction(d);
  if (uses_normalization(algo))
    normalize(state.m, direction);
  else
    direction = state.m;  // sgd_plain / sgdc move along the (clipped) gradient

  state.w_prev = state.w_curr;
  for (int i = 0; i < d; ++i) state.w_curr[i] -= hyper.gamma * direction[i];

  if (!all_finite(state.w_curr) || !all_finite(state.m))
    throw NumericalError(std::string(to_string(algo)) +
                             ": non-finite state at iteration " +
                             std::to_string(state.t),
                         state.t);

  if (trace) {
    trace->grad_true.resize(d);
    eval_grad(problem, state.w_prev, trace->grad_true);
    trace->contrib = std::move(contrib);
    trace->vr_cross = std::move(vr_cross);
    trace->m = state.m;
  }
  ++state.t;
}

Trajectory run(AlgorithmId algo, const ProblemSpec& problem,
               const NoiseSpec& spec, const HyperParams& hyper,
               const RngStream& stream, TraceLevel trace_level) {
  validate(hyper);
  const long T = hyper.T;
  const int d = problem.dim;

  Trajectory traj;
  traj.algo = algo;
  traj.hyper = hyper;
  traj.T = T;
  if (trace_level >= TraceLevel::summary) {
    traj.grad_norms.reserve(T);
    traj.f_gaps.reserve(T);
    traj.eps_norms.reserve(T);
    traj.displacements.reserve(T);
  }

  OptimizerState state = init_state(problem);
  std::vector<double> grad(d);
  double sum_grad_norm = 0.0;

  for (long t = 1; t <= T; ++t) {
    eval_grad(problem, state.w_curr, grad);
    double gn = norm2(grad);
    sum_grad_norm += gn;
    double f_gap = eval_value(problem, state.w_curr) - problem.f_min;

    StepTrace step_trace;
    step(algo, state, problem, spec, hyper, stream,
         trace_level == TraceLevel::full ? &step_trace : nullptr);

    if (trace_level >= TraceLevel::summary) {
      traj.grad_norms.push_back(gn);
      traj.f_gaps.push_back(f_gap);
      double eps2 = 0.0, disp2 = 0.0;
      for (int i = 0; i < d; ++i) {
        double e = state.m[i] - grad[i];
        eps2 += e * e;
        double dx = state.w_curr[i] - problem.w0[i];
        disp2 += dx * dx;
      }
      traj.eps_norms.push_back(std::sqrt(eps2));
      traj.displacements.push_back(std::sqrt(disp2));
    }
    if (trace_level == TraceLevel::full) traj.steps.push_back(std::move(step_trace));

    if (t == T) {
      eval_grad(problem, state.w_curr, grad);
      traj.final_grad_norm = norm2(grad);
      traj.final_f_gap = eval_value(problem, state.w_curr) - problem.f_min;
    }
  }

  traj.avg_grad_norm = sum_grad_norm / static_cast<double>(T);
  traj.w_final = state.w_curr;
  return traj;
}

}  // namespace normtail
