"""Deciding injectivity of ReLU layers and comparing the exact and estimated lower Lipschitz constants."""

from __future__ import annotations

import numpy as np

from framelip import (
    ReluLayer,
    doubled_frame_kappa,
    estimate_kappa,
    make_doubled,
    make_random,
    make_standard_basis,
    relu_injectivity,
    relu_lipschitz_bounds,
)


def main():
    rep = relu_injectivity(ReluLayer(make_standard_basis(2)))
    print("ReLU on the standard basis of R^2 with zero bias")
    print(f"  injective: {rep.injective}; failing pattern '{rep.failing_pattern.encode()}' at {rep.failing_pattern.witness}")
    print("  (every point of the negative quadrant is sent to zero)")

    f = make_random(3, 4, seed=7)
    layer = ReluLayer(make_doubled(f))
    rep = relu_injectivity(layer)
    lo, hi = relu_lipschitz_bounds(rep)
    exact = doubled_frame_kappa(f).kappa
    est = estimate_kappa(layer, budget=20_000)
    print("\nReLU on a doubled random frame of 4 vectors in R^3")
    print(f"  {len(rep.patterns)} activation patterns, A_alpha = {rep.a_alpha:.6f}")
    print(f"  sandwich [{lo:.6f}, {hi:.6f}], exact constant {exact:.6f}, sampled estimate {est.kappa_hat:.6f}")

    rng = np.random.default_rng(1)
    layer = ReluLayer(make_random(2, 8, seed=3), bias=0.3 * rng.standard_normal(8))
    rep = relu_injectivity(layer)
    print("\nReLU on 8 random vectors in R^2 with a random bias")
    print(f"  {len(rep.patterns)} patterns, injective: {rep.injective}")
    if rep.injective:
        lo, hi = relu_lipschitz_bounds(rep)
        est = estimate_kappa(layer, budget=20_000)
        print(f"  sandwich [{lo:.6f}, {hi:.6f}], sampled estimate {est.kappa_hat:.6f}")


if __name__ == "__main__":
    main()
