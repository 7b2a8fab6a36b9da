import json
import math

import pytest

import normtail


def test_schedule_golden_values():
    hp = normtail.schedule("nsgd", sigma=1.0, p=2.0, L=1.0, T=4096)
    assert hp.theta == pytest.approx(0.984375, rel=1e-12)
    assert hp.gamma == pytest.approx(0.001953125, rel=1e-12)
    assert math.isinf(hp.h)

    hp = normtail.schedule("nsgdc", sigma=1.0, p=2.0, L=1.0, T=4096)
    assert hp.h == pytest.approx(18.0, rel=1e-12)


def test_run_deterministic_quadratic():
    prob = normtail.make_quadratic(4, [1.0, 1.0, 1.0, 1.0])
    noise = normtail.make_noise(p=2.0, sigma=0.0, family="none")
    hp = normtail.schedule("nsgd", sigma=0.0, p=2.0, L=prob.lipschitz_L, T=256)
    a = normtail.run("nsgd", prob, noise, hp, seed=42)
    b = normtail.run("nsgd", prob, noise, hp, seed=42)
    assert a == b
    assert a["final_grad_norm"] < a["avg_grad_norm"]


def test_run_heavy_tailed_finite():
    prob = normtail.make_log_smooth(8)
    noise = normtail.make_noise(p=1.5, sigma=1.0, family="pareto_radial")
    hp = normtail.schedule("nsgdc", 1.0, 1.5, prob.lipschitz_L, 512,
                           prob.grad_w0_norm)
    out = normtail.run("nsgdc", prob, noise, hp, seed=1, trace="summary")
    assert len(out["grad_norms"]) == 512
    assert all(math.isfinite(g) for g in out["grad_norms"])


def test_sweep_csv_shape():
    cfg = {
        "problem": {"id": "quadratic", "dim": 4, "eigenvalues": [1, 1, 1, 1]},
        "noise": {"p": 2.0, "sigma": 0.0, "family": "none"},
        "algorithms": ["nsgd", "nsgdc"],
        "t_grid": [256, 1024],
        "replicates": 3,
        "seed": 7,
    }
    csv = normtail.sweep_csv(json.dumps(cfg))
    lines = csv.strip().split("\n")
    assert lines[0].startswith("algo,problem,dim,p,sigma,family,T,seed")
    assert len(lines) == 1 + 2 * 2 * 3

    def drop_wall_ms(text):
        return [line.rsplit(",", 1)[0] for line in text.strip().split("\n")]

    # Deterministic up to the wall-clock column, at any worker count.
    par = normtail.sweep_csv(json.dumps(cfg), parallel=2)
    assert drop_wall_ms(csv) == drop_wall_ms(par)


def test_fit_rate_exact_power_law():
    pts = [(T, 3.0 * T ** -0.5) for T in (100, 1000, 10000)]
    fit = normtail.fit_rate(pts)
    assert fit["slope"] == pytest.approx(-0.5, abs=1e-12)
    assert fit["r_squared"] == pytest.approx(1.0, abs=1e-12)


def test_bad_config_raises():
    with pytest.raises(ValueError):
        normtail.make_noise(p=2.5, sigma=1.0, family="pareto_radial")
