"""Gated measurements (keep <x, phi_i> only when it reaches the threshold) outside the unit ball."""

from __future__ import annotations

import numpy as np

from framelip import GateOperator, gate_injectivity, make_mercedes_benz


def main():
    mb = make_mercedes_benz()
    # on the unit circle the second largest |<x, phi_i>| never drops below 1/2
    for mu in (0.3, 0.4, 0.6, 0.9):
        rep = gate_injectivity(GateOperator(mb, mu))
        line = f"Mercedes-Benz gated at {mu}: {rep.verdict}"
        if rep.failing_pattern is not None:
            w = np.asarray(rep.failing_witness)
            line += f", pattern '{rep.failing_pattern.encode()}' reached at |x| = {np.linalg.norm(w):.3f}"
        print(line)


if __name__ == "__main__":
    main()
