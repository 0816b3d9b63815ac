"""Quick check that the extension module imports and agrees with known values."""

import math

import ldpc_scaling_py as ls


def main():
    ens = ls.Ensemble.regular(3, 6)
    assert abs(ls.threshold(ens) - 0.4294398) < 1e-6, ls.threshold(ens)

    p, q = ls.density_evolution(ls.Ensemble.regular(2, 3), 0.3, 2)
    assert p[:2] == [1.0, 0.51] and q[:2] == [None, 0.3]

    res = ls.alpha(ens, 0.425, 42)
    assert abs(abs(res.alpha) - 35710.34) < 0.01, res

    status, value, _ = ls.alpha_limit(ls.Ensemble.regular(2, 3), 0.2)
    assert status == "converged" and abs(value - 1 / 3) < 1e-6

    ctx = ls.ScalingContext(ens, 0.4, 10, prec_bits=53)
    assert math.isclose(ctx.alpha(10).alpha, ls.alpha(ens, 0.4, 10).alpha, rel_tol=1e-6)

    pb, err = ls.simulate(ls.Ensemble.regular(2, 3), 51, 0.3, 20, trials=500, seed=3)
    assert len(pb) == 21 and 0.0 <= pb[-1] <= 0.3 and err[-1] > 0

    assert ls.exact(2, 3, 3, 0.5, 1) == 0.375

    try:
        ls.simulate(ls.Ensemble.regular(2, 3), 50, 0.3, 5)
    except ValueError as e:
        assert "infeasible" in str(e)
    else:
        raise AssertionError("n = 50 should be rejected")

    irregular = ls.Ensemble.from_json('{"lambda": {"2": 0.5, "3": 0.5}, "rho": {"6": 1.0}}')
    assert math.isfinite(ls.gamma(irregular, 0.3, 5))
    print("smoke test passed:", ens, res)


if __name__ == "__main__":
    main()
