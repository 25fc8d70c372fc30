"""Phase retrieval from intensities |<x, phi_i>|: complement property and the two lower constants."""

from __future__ import annotations

import numpy as np

from framelip import (
    Frame,
    IntensityOperator,
    a_abs,
    complement_property,
    estimate_kappa,
    make_mercedes_benz,
    make_random,
    make_standard_basis,
    pr_lipschitz_bounds,
)


def show(name, f):
    cp = complement_property(f)
    if not cp.holds:
        print(f"{name}: complement property fails at subset {cp.failing_subset:b} (bit i = vector i+1)")
        return
    aa = a_abs(f)
    b = pr_lipschitz_bounds(f, cp=cp, aa=aa)
    est = estimate_kappa(IntensityOperator(f), budget=20_000)
    print(f"{name}: sigma^2 = {cp.sigma_sq:.6f}, A_abs = {aa.a_abs:.6f} (ratio {aa.a_abs / cp.sigma_sq:.3f})")
    print(f"  improved sandwich [{b.improved[0]:.6f}, {b.improved[1]:.6f}], estimate {est.kappa_hat:.6f}")


def main():
    show("standard basis of R^2", make_standard_basis(2))
    show("Mercedes-Benz", make_mercedes_benz())
    show("two copies of 1 in R", Frame(np.array([[1.0], [1.0]])))
    show("5 random vectors in R^3", make_random(3, 5, seed=11))


if __name__ == "__main__":
    main()
