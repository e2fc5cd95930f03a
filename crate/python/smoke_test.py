"""Smoke test for the adalr Python extension.

Build and install first:  maturin develop -m crates/py/Cargo.toml
"""

import math

import adalr


def main():
    names = adalr.list_presets()
    assert "AMSG-C2" in names and len(names) == 18

    problem = adalr.Problem("quadratic:d=1,span=1,sigma=0,half=1,target=0")
    schedule = adalr.Schedule(alpha=0.1, beta=0.0, gamma=0.0, delta=0.0, epsilon=1e-300)
    opt = adalr.Optimizer(problem, schedule, estimator="amsgrad", x0=[1.0])
    first = opt.step()
    second = opt.step()
    assert abs(first["x_next"][0] - 0.9) < 1e-15
    assert abs(second["x_next"][0] - 0.81) < 1e-15
    assert second["h"] == [1.0]

    out = adalr.run(problem, schedule, estimator="amsgrad", steps=2, x0=[1.0])
    assert abs(out["f_xtilde"][-1] - 0.3655125) < 1e-15

    quad = adalr.Problem("quadratic:d=5,sigma=0.1,seed=3")
    estimator, preset = adalr.resolve_preset("amsg-d1")
    res = adalr.run(quad, preset, estimator=estimator, steps=20000, seed=1, record_every=100)
    sub = res["f_xtilde"][-1] - res["f_star"]
    assert 0.0 <= sub < 1e-2, sub
    assert all(g <= 0.0 for g in res["gap"])

    total, average = adalr.regret([1.0, 2.0, 3.0], 1.0)
    assert total == 3.0 and average == 1.0

    bound = adalr.theorem1_bound(1e-3, 1e-3, gradient_bound=1.0, diameter=2.0, min_h=1.0, dim=1)
    assert bound < 0.0 and math.isfinite(bound)

    try:
        adalr.resolve_preset("NOPE")
    except ValueError as e:
        assert "NOPE" in str(e)
    else:
        raise AssertionError("unknown preset accepted")

    print("smoke test passed:", problem, estimator, preset)


if __name__ == "__main__":
    main()
