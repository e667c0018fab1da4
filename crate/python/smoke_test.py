"""Smoke test for the herzlab_py extension.

Build first: pip install --no-build-isolation -e crates/python
"""

import math

import herzlab_py as hz


def close(a, b, rel):
    assert abs(a - b) <= rel * abs(b), (a, b)


def main():
    p = hz.Problem(3, 3, 0, 0, 3, 1)
    assert p.critical_exponents() == ("3", "3")
    assert p.classify()["case"] == "DoubleCritical"

    p = hz.Problem(3, 2, 0, 0, 3, 1)
    sigma, delta = p.sigma_delta()
    assert hz.Problem(3, "5/2", "-1/2", "-1/4", 3, float("inf")).classify()["case"]

    # a single annulus {1/2 <= |x| < 1} in R^3
    vol = 4 * math.pi / 3 * (1 - 1 / 8)
    v = hz.herz_norm(hz.RadialFunction.annulus(0), 3, 1, 2, 1)
    close(v["value"], math.sqrt(vol), 1e-10)

    v = hz.herz_norm(hz.RadialFunction.gaussian(1.0), 3, "-3/2", 2, 1)
    assert v["status"] == "Divergent"

    # characteristic function of the unit ball in L^{2,2} = L^2
    v = hz.lorentz_norm(hz.RadialFunction.ball(1.0), 3, 2, 2)
    close(v["value"], math.sqrt(4 * math.pi / 3), 1e-8)

    # Gaussians stay Gaussian under the heat flow
    w, t = 1.0, 0.25
    u = hz.heat_apply(hz.RadialFunction.gaussian(w), t, 3)
    w2 = w * w + 4 * t
    for r in (0.1, 0.5, 1.0, 2.0):
        close(u(r), (w * w / w2) ** 1.5 * math.exp(-r * r / w2), 1e-8)

    v = hz.interpolation_norm([0.0] * 4, 0, 3, 2, -1, 1, 2, 2, 0.5, 2)
    assert v["value"] == 0.0
    k = hz.k_functional([1.0], 0, 3, 2, -1, 1, 2, 2, 1.0)
    assert 0 < k["value"] <= 1.0 + 1e-12

    run = hz.picard_solve(p, hz.RadialFunction.gaussian(1.0, 1e-3), 0.1, time_nodes=8)
    assert run["converged"], run["outcome"]

    for kind in ("classify", "membership", "density"):
        report = hz.run_experiment(kind)
        assert report["pass"], kind
    reports = hz.run_suite("experiments = classify, density\n")
    assert [r["kind"] for r in reports] == ["classify", "density"]

    try:
        hz.run_experiment("density", {"bogus": 1})
    except ValueError as e:
        assert "bogus" in str(e)
    else:
        raise AssertionError("unknown key accepted")

    print("smoke test passed; sigma, delta =", sigma, delta)


if __name__ == "__main__":
    main()
