"""Frame bounds of the classical small frames and what happens when one vector is removed."""

from __future__ import annotations

import numpy as np

from framelip import frame_bounds, make_doubled, make_mercedes_benz, make_simplex_funtf, sub_frame_lower_bound


def main():
    mb = make_mercedes_benz()
    print("Mercedes-Benz frame (three unit vectors at 120 degrees):")
    print(np.round(mb.vectors, 6))
    print("  frame bounds", tuple(round(v, 12) for v in frame_bounds(mb)))
    for i in range(3):
        rest = [j for j in range(3) if j != i]
        print(f"  drop vector {i + 1}: lower bound {sub_frame_lower_bound(mb, rest):.12f}")

    for n in (2, 3, 4):
        f = make_simplex_funtf(n)
        A, B = frame_bounds(f)
        print(f"simplex frame in R^{n}: {f.m} unit vectors, A = {A:.6f}, B = {B:.6f}, (n+1)/n = {(n + 1) / n:.6f}")

    d = make_doubled(mb)
    print("doubling (adding the negatives) doubles both bounds:", tuple(round(v, 12) for v in frame_bounds(d)))


if __name__ == "__main__":
    main()
