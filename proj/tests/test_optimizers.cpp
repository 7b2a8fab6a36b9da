#include <doctest.h>

#include <cmath>
#include <vector>

#include "normtail/optimizers.hpp"
#include "normtail/schedules.hpp"

using namespace normtail;

TEST_CASE("clip hand examples and contraction") {
  std::vector<double> out(2);
  clip(std::vector<double>{3.0, 4.0}, 10.0, out);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == 4.0);

  clip(std::vector<double>{3.0, 4.0}, 2.5, out);
  CHECK(out[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(norm2(out) == doctest::Approx(2.5).epsilon(1e-15));

  clip(std::vector<double>{0.0, 0.0}, 1.0, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);

  clip(std::vector<double>{3.0, 4.0}, kInfiniteClip, out);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == 4.0);

  // ||clip(v,h)|| = min(||v||, h); direction preserved (cosine 1).
  std::vector<double> v{-6.0, 8.0};
  clip(v, 5.0, out);
  CHECK(norm2(out) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(dot(v, out) == doctest::Approx(norm2(v) * norm2(out)).epsilon(1e-15));
}

TEST_CASE("normalize hand examples") {
  std::vector<double> out(2);
  normalize(std::vector<double>{0.0, 3.0}, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 1.0);

  normalize(std::vector<double>{-4.0, 3.0}, out);
  CHECK(out[0] == doctest::Approx(-0.8).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.6).epsilon(1e-15));

  normalize(std::vector<double>{0.0, 0.0}, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("general_normalize hand examples") {
  std::vector<double> out2(2);
  general_normalize(std::vector<double>{0.0, 3.0}, NormalizeKind::l2, out2);
  CHECK(out2[1] == 1.0);
  CHECK(dot(std::vector<double>{0.0, 3.0}, out2) == 3.0);

  std::vector<double> x{-2.0, 0.0, 5.0}, out3(3);
  general_normalize(x, NormalizeKind::sign, out3);
  CHECK(out3[0] == -1.0);
  CHECK(out3[1] == 0.0);
  CHECK(out3[2] == 1.0);
  CHECK(dot(x, out3) == 7.0);  // = ||x||_1

  general_normalize(std::vector<double>{0.0, 0.0, 0.0}, NormalizeKind::sign, out3);
  for (double v : out3) CHECK(v == 0.0);
}

namespace {

HyperParams manual(double theta, double gamma, double h, double zeta, long T) {
  HyperParams hp;
  hp.theta = theta;
  hp.gamma = gamma;
  hp.h = h;
  hp.zeta = zeta;
  hp.T = T;
  hp.source = ScheduleSource::manual;
  return hp;
}

}  // namespace

TEST_CASE("single nsgd step by hand") {
  // sigma = 0, so g^1 = grad f(w^1) = (3,4) on the identity quadratic.
  ProblemSpec p = make_quadratic(2, {1.0, 1.0}, std::vector<double>{3.0, 4.0});
  NoiseSpec s = make_noise(2.0, 0.0, NoiseFamily::none);
  HyperParams hp = manual(0.5, 0.1, kInfiniteClip, 0.0, 1);
  OptimizerState st = init_state(p);
  step(AlgorithmId::nsgd, st, p, s, hp, RngStream(1));
  CHECK(st.m[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(st.m[1] == doctest::Approx(2.0).epsilon(1e-15));
  // unit direction (0.6, 0.8)
  CHECK(st.w_curr[0] == doctest::Approx(3.0 - 0.06).epsilon(1e-15));
  CHECK(st.w_curr[1] == doctest::Approx(4.0 - 0.08).epsilon(1e-15));
  CHECK(st.t == 2);
}

TEST_CASE("single nsgdc step by hand: clipping halves m, same direction") {
  ProblemSpec p = make_quadratic(2, {1.0, 1.0}, std::vector<double>{3.0, 4.0});
  NoiseSpec s = make_noise(2.0, 0.0, NoiseFamily::none);
  HyperParams hp = manual(0.5, 0.1, 2.5, 0.0, 1);
  OptimizerState st = init_state(p);
  step(AlgorithmId::nsgdc, st, p, s, hp, RngStream(1));
  CHECK(st.m[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(st.m[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st.w_curr[0] == doctest::Approx(2.94).epsilon(1e-15));
  CHECK(st.w_curr[1] == doctest::Approx(3.92).epsilon(1e-15));
}

TEST_CASE("nsgd_vr initialization collapse: m^1 = (1-theta) g^1") {
  ProblemSpec p = make_quadratic(2, {1.0, 1.0}, std::vector<double>{3.0, 4.0});
  NoiseSpec s = make_noise(2.0, 0.0, NoiseFamily::none);
  HyperParams hp = manual(0.25, 0.1, kInfiniteClip, 0.0, 1);
  OptimizerState st = init_state(p);
  step(AlgorithmId::nsgd_vr, st, p, s, hp, RngStream(1));
  CHECK(st.m[0] == doctest::Approx(0.75 * 3.0).epsilon(1e-15));
  CHECK(st.m[1] == doctest::Approx(0.75 * 4.0).epsilon(1e-15));
}

TEST_CASE("deterministic 1-d run exercises the m = 0 freeze") {
  ProblemSpec p = make_quadratic(1, {1.0}, std::vector<double>{1.0});
  NoiseSpec s = make_noise(2.0, 0.0, NoiseFamily::none);
  HyperParams hp = params_nsgd(0.0, 2.0, 1.0, 4);
  CHECK(hp.gamma == 0.5);
  CHECK(hp.theta == 0.0);
  Trajectory traj =
      run(AlgorithmId::nsgd, p, s, hp, RngStream(1), TraceLevel::summary);
  REQUIRE(traj.grad_norms.size() == 4);
  CHECK(traj.grad_norms[0] == 1.0);
  CHECK(traj.grad_norms[1] == 0.5);
  CHECK(traj.grad_norms[2] == 0.0);
  CHECK(traj.grad_norms[3] == 0.0);
  CHECK(traj.avg_grad_norm == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(traj.final_grad_norm == 0.0);
  CHECK(traj.w_final[0] == 0.0);
}

TEST_CASE("step-length law: every normalized step moves exactly gamma") {
  ProblemSpec p = make_log_smooth(6);
  NoiseSpec s = make_noise(1.5, 1.0, NoiseFamily::pareto_radial);
  HyperParams hp = params_nsgd(1.0, 1.5, 2.0, 100);
  OptimizerState st = init_state(p);
  RngStream stream(77);
  for (long t = 1; t <= 100; ++t) {
    std::vector<double> before = st.w_curr;
    step(AlgorithmId::nsgd, st, p, s, hp, stream);
    double move2 = 0.0;
    for (int i = 0; i < 6; ++i) {
      double dx = st.w_curr[i] - before[i];
      move2 += dx * dx;
    }
    if (norm2(st.m) != 0.0)
      CHECK(std::sqrt(move2) == doctest::Approx(hp.gamma).epsilon(1e-12));
  }
}

TEST_CASE("reduction identities on shared streams") {
  ProblemSpec p = make_log_smooth(5);
  NoiseSpec s = make_noise(1.5, 1.0, NoiseFamily::pareto_radial);
  RngStream stream(123);

  SUBCASE("nsgdc with h = inf equals nsgd bit for bit") {
    HyperParams hp = params_nsgd(1.0, 1.5, 2.0, 200);
    Trajectory a = run(AlgorithmId::nsgd, p, s, hp, stream);
    HyperParams hc = hp;
    hc.h = kInfiniteClip;
    Trajectory b = run(AlgorithmId::nsgdc, p, s, hc, stream);
    for (int i = 0; i < 5; ++i) CHECK(a.w_final[i] == b.w_final[i]);
    CHECK(a.avg_grad_norm == b.avg_grad_norm);
  }

  SUBCASE("a_nsgdc with zeta = 0 equals nsgdc bit for bit") {
    HyperParams hp = params_nsgdc(1.0, 1.5, 2.0, 200, p.grad_w0_norm);
    HyperParams ha = hp;
    ha.zeta = 0.0;
    Trajectory a = run(AlgorithmId::nsgdc, p, s, hp, stream);
    Trajectory b = run(AlgorithmId::a_nsgdc, p, s, ha, stream);
    for (int i = 0; i < 5; ++i) CHECK(a.w_final[i] == b.w_final[i]);
  }

  SUBCASE("theta = 0 nsgd equals theta = 0 nsgd_vr") {
    HyperParams hp = manual(0.0, 0.01, kInfiniteClip, 0.0, 200);
    Trajectory a = run(AlgorithmId::nsgd, p, s, hp, stream);
    Trajectory b = run(AlgorithmId::nsgd_vr, p, s, hp, stream);
    for (int i = 0; i < 5; ++i) CHECK(a.w_final[i] == b.w_final[i]);
  }

  SUBCASE("sigma = 0 runs are replicate-independent") {
    NoiseSpec s0 = make_noise(2.0, 0.0, NoiseFamily::none);
    HyperParams hp = params_nsgd(0.0, 2.0, 2.0, 64);
    Trajectory a = run(AlgorithmId::nsgd, p, s0, hp, RngStream(1));
    Trajectory b = run(AlgorithmId::nsgd, p, s0, hp, RngStream(999));
    for (int i = 0; i < 5; ++i) CHECK(a.w_final[i] == b.w_final[i]);
  }
}

TEST_CASE("trajectory records match the error and displacement definitions") {
  ProblemSpec p = make_log_smooth(4);
  NoiseSpec s = make_noise(1.5, 1.0, NoiseFamily::pareto_radial);
  HyperParams hp = params_nsgd(1.0, 1.5, 2.0, 50);
  Trajectory traj =
      run(AlgorithmId::nsgd, p, s, hp, RngStream(5), TraceLevel::summary);
  REQUIRE(traj.displacements.size() == 50);
  for (std::size_t t = 0; t < 50; ++t)
    CHECK(traj.displacements[t] <=
          hp.gamma * static_cast<double>(t + 1) * (1.0 + 1e-12));
  CHECK(traj.grad_norms[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("full trace exposes contrib, vr_cross and m") {
  ProblemSpec p = make_log_smooth(3);
  NoiseSpec s = make_noise(1.5, 1.0, NoiseFamily::pareto_radial);
  HyperParams hp = params_nsgdc_vr(1.0, 1.5, 2.0, 30, p.grad_w0_norm);
  Trajectory traj =
      run(AlgorithmId::nsgdc_vr, p, s, hp, RngStream(6), TraceLevel::full);
  REQUIRE(traj.steps.size() == 30);
  for (const StepTrace& st : traj.steps) {
    CHECK(st.contrib.size() == 3);
    CHECK(st.vr_cross.size() == 3);
    CHECK(norm2(st.contrib) <= hp.h * (1.0 + 1e-12));
  }
}

TEST_CASE("divergence raises a numerical failure with its iteration") {
  ProblemSpec p = make_quadratic(1, {4.0}, std::vector<double>{1.0});
  NoiseSpec s = make_noise(2.0, 0.0, NoiseFamily::none);
  HyperParams hp = manual(0.0, 1e200, kInfiniteClip, 0.0, 100);
  try {
    run(AlgorithmId::sgd_plain, p, s, hp, RngStream(1));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.iteration >= 1);
    CHECK(e.iteration <= 100);
  }
}

TEST_CASE("algorithm names round-trip") {
  for (AlgorithmId a :
       {AlgorithmId::sgd_plain, AlgorithmId::sgdc, AlgorithmId::nsgd,
        AlgorithmId::nsgd_vr, AlgorithmId::nsgdc, AlgorithmId::nsgdc_vr,
        AlgorithmId::a_nsgdc, AlgorithmId::a_nsgd})
    CHECK(algorithm_from_string(to_string(a)) == a);
  CHECK_THROWS_AS(algorithm_from_string("adam"), ConfigError);
}
