"""Sweeping the ratio of the sampled lower Lipschitz constant to the closed-form lower bound."""

from __future__ import annotations

from framelip import sweep_open_problem


def main():
    for family in ("doubled", "random"):
        res = sweep_open_problem("relu-K", 8, seed=0, family=family, budget=3000)
        ratios = [row[-1] for row in res.rows]
        print(f"ReLU, {family} layers: kappa_hat / (sqrt(A_alpha)/2) in [{min(ratios):.4f}, {max(ratios):.4f}]"
              f" over {len(ratios)} layers ({res.skipped} non-injective draws skipped)")
    res = sweep_open_problem("sat-f", 4, seed=0, budget=3000)
    for row in res.rows:
        rec = dict(zip(res.header, row))
        print(f"saturation n={rec['n']} m={rec['m']} level {rec['lambda']:.3f}: A_lambda {rec['a_const']:.4f},"
              f" kappa_hat {rec['kappa_hat']:.4f}, ratio to bound {rec['ratio_to_bound']:.4f}")


if __name__ == "__main__":
    main()
