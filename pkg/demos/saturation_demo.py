"""Saturated (clipped) measurements on the unit ball: injectivity, critical level and bounds."""

from __future__ import annotations

from framelip import (
    SatOperator,
    critical_lambda,
    estimate_kappa,
    make_mercedes_benz,
    make_simplex_funtf,
    make_standard_basis,
    sat_injectivity,
    sat_lipschitz_bounds,
    sat_lipschitz_bounds_nplus1,
)


def main():
    basis = make_standard_basis(2)
    for lam in (0.5, 1.0):
        rep = sat_injectivity(SatOperator(basis, lam))
        extra = "" if rep.injective else f", failing pattern '{rep.failing_pattern.encode()}'"
        print(f"basis of R^2 clipped at {lam}: injective {rep.injective}{extra}")

    for name, f in [("basis", basis), ("Mercedes-Benz", make_mercedes_benz())]:
        res = critical_lambda(f)
        print(f"critical level for the {name} frame: {res.value:.7f} after {res.iterations} bisection steps")

    for n in (2, 3, 4):
        op = SatOperator(make_simplex_funtf(n), 0.9)
        rep = sat_injectivity(op)
        lo, hi = sat_lipschitz_bounds_nplus1(rep)
        glo, _ = sat_lipschitz_bounds(rep)
        est = estimate_kappa(op, budget=20_000)
        print(f"simplex frame n={n} at level 0.9: bounds [{lo:.6f}, {hi:.6f}] (general form gives {glo:.6f}),"
              f" estimate {est.kappa_hat:.6f}")


if __name__ == "__main__":
    main()
