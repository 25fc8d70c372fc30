"""Gated measurements x -> (t_i if |t_i| >= mu else 0) outside the unit ball.

The domain {|x| >= 1} is not convex, so whether a pattern cell reaches it is
settled cell by cell.  A cell with a nontrivial recession cone always does.
For bounded cells, LP extreme points in a set of probe directions either give
a witness of norm >= 1 or a bounding box that keeps the cell inside the ball.
If neither works, the vertices are listed exactly when they are few enough.
Cells left undecided make the verdict ``"inconclusive"``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .config import AnalysisConfig, resolve
from .errors import DimensionMismatch, TooManyIndices
from .frames import Frame, measure, sub_frame_lower_bound
from .linalg import feasible_arrays
from .patterns import NEG, POS, _bits_to_int, _dfs, _satisfies

OFF = 0
_CHARS = {NEG: "-", OFF: "o", POS: "+"}


@dataclass(frozen=True, eq=False)
class GateOperator:
    frame: Frame
    threshold: float

    def __post_init__(self):
        mu = float(self.threshold)
        if not (mu > 0 and np.isfinite(mu)):
            raise ValueError(f"gating threshold must be positive, got {self.threshold!r}")
        object.__setattr__(self, "threshold", mu)

    kind = "gate"
    default_domain = "ball-complement"

    def apply(self, X) -> np.ndarray:
        t = measure(self.frame, X)
        return np.where(np.abs(t) >= self.threshold, t, 0.0)


def gate_apply(op: GateOperator, x, cfg: AnalysisConfig | None = None) -> np.ndarray:
    cfg = resolve(cfg)
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (op.frame.n,):
        raise DimensionMismatch(f"expected last axis of length {op.frame.n}")
    if np.any(np.linalg.norm(np.atleast_2d(x), axis=1) < 1.0 - cfg.ball_tol):
        warnings.warn("input inside the unit ball, outside the gating domain", stacklevel=2)
    return op.apply(x)


def gated_set(op: GateOperator, x) -> int:
    t = measure(op.frame, np.asarray(x, dtype=float))
    return int(_bits_to_int((np.abs(t) >= op.threshold)[None, :])[0])


@dataclass(frozen=True)
class GatePattern:
    state: tuple  # per index: +1 / -1 (passes with that sign) or 0 (gated off)
    witness: np.ndarray = field(compare=False)

    @property
    def on_mask(self) -> int:
        return sum(1 << i for i, s in enumerate(self.state) if s != OFF)

    def encode(self) -> str:
        return "".join(_CHARS[s] for s in self.state)


@dataclass
class GateReport:
    op: GateOperator
    verdict: str  # "injective" | "not-injective" | "inconclusive"
    failing_pattern: GatePattern | None
    failing_witness: np.ndarray | None
    patterns: list
    inconclusive_patterns: list
    notes: list = field(default_factory=list)
    config: AnalysisConfig | None = None

    @property
    def injective(self) -> bool | None:
        return {"injective": True, "not-injective": False}.get(self.verdict)


def gate_cell(op: GateOperator, state):
    V, mu = op.frame.vectors, op.threshold
    G, h, s = [], [], []
    for i, st in enumerate(state):
        if st == POS:
            G.append(V[i]), h.append(mu), s.append(False)
        elif st == NEG:
            G.append(-V[i]), h.append(mu), s.append(False)
        else:
            G += [V[i], -V[i]]
            h += [-mu, -mu]
            s += [True, True]
    return np.array(G), np.array(h), np.array(s, dtype=bool)


def _vertices(G, h, n, cap):
    k = G.shape[0]
    if math.comb(k, n) > cap:
        return None
    out = []
    for rows in itertools.combinations(range(k), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        out.append(np.linalg.solve(M, h[list(rows)]))
    return out


def _lp_extreme(G, h, c, box):
    """argmax c.x over {G x >= h, |x|_inf <= box}, or None if empty."""
    res = linprog(-c, A_ub=-G, b_ub=-h, bounds=[(-box, box)] * G.shape[1], method="highs")
    return res.x if res.status == 0 else None


def recession_direction(G) -> np.ndarray | None:
    """A unit d != 0 with G d >= 0 if the recession cone is nontrivial, else None."""
    n = G.shape[1]
    zero = np.zeros(G.shape[0])
    for j in range(n):
        for sgn in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = sgn
            d = _lp_extreme(G, zero, c, 1.0)
            if d is not None and sgn * d[j] > 1e-9:
                return d / np.linalg.norm(d)
    return None


def exterior_reach(G, h, strict, cfg: AnalysisConfig, rng=None):
    """Does the cell {G x >= h, + margin on strict rows} meet {|x| >= 1}?

    Returns ``(answer, witness)`` with answer True, False or None (undecided).
    """
    n = G.shape[1]
    eps, box = cfg.strict_margin, cfg.lp_box
    h_in = h + np.where(strict, eps, 0.0)
    base = feasible_arrays(G, h, strict, eps, box)
    if not base.feasible:
        return False, None
    d = recession_direction(G)
    if d is not None:
        x = base.witness + (1.0 + np.linalg.norm(base.witness)) * d
        return True, x

    # bounded cell: probe extreme points along coordinate and random directions
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    dirs = [s * e for e in np.eye(n) for s in (1.0, -1.0)]
    dirs += list(rng.standard_normal((4 * n, n)))
    lo, hi = np.full(n, np.inf), np.full(n, -np.inf)
    for c in dirs:
        x = _lp_extreme(G, h_in, np.asarray(c), box)
        if x is None:
            continue
        lo, hi = np.minimum(lo, x), np.maximum(hi, x)
        if np.linalg.norm(x) >= 1.0 and np.all(G @ x - h_in >= -1e-12):
            return True, x
    # the bounding box contains the cell; its far corner bounds the max norm
    if math.sqrt(float(np.sum(np.maximum(lo**2, hi**2)))) < 1.0 - cfg.ball_tol:
        return False, None
    verts = _vertices(G, h_in, n, cfg.vertex_enum_cap)
    if verts is not None:
        inside = [v for v in verts if np.all(G @ v - h_in >= -1e-9)]
        far = max(inside, key=np.linalg.norm) if inside else None
        if far is not None and np.linalg.norm(far) >= 1.0:
            return True, far
        if far is not None and np.linalg.norm(far) >= 1.0 - cfg.ball_tol:
            return None, None
        return False, None
    return None, None


def enum_gate_patterns(op: GateOperator, cfg: AnalysisConfig | None = None) -> list[GatePattern]:
    """Realizable gating states over R^n (before intersecting with the domain)."""
    cfg = resolve(cfg)
    f = op.frame
    if f.m > cfg.sat_pattern_cap:
        raise TooManyIndices(f"m={f.m} exceeds sat_pattern_cap={cfg.sat_pattern_cap}")
    V, mu, eps, box = f.vectors, op.threshold, cfg.strict_margin, cfg.lp_box
    closed, both = np.array([False]), np.array([True, True])

    def branches(i):
        phi = V[i : i + 1]
        yield NEG, (-phi, np.array([mu]), closed)
        yield OFF, (np.vstack([phi, -phi]), np.array([-mu, -mu]), both)
        yield POS, (phi, np.array([mu]), closed)

    def node_ok(sys_, hint):
        G, H, S = sys_
        if _satisfies(G, H, S, hint, eps):
            return hint
        res = feasible_arrays(G, H, S, eps, box)
        return res.witness if res.feasible else None

    def leaf(choices, sys_):
        G, H, S = sys_
        res = feasible_arrays(G, H, S, eps, box)
        return GatePattern(tuple(choices), res.witness) if res.feasible else None

    pats = _dfs(f.m, branches, node_ok, leaf)
    pats.sort(key=lambda p: p.encode())
    return pats


def gate_injectivity(op: GateOperator, cfg: AnalysisConfig | None = None) -> GateReport:
    """Three-valued injectivity check of the gated operator on |x| > 1."""
    cfg = resolve(cfg)
    f = op.frame
    pats = enum_gate_patterns(op, cfg)
    undecided = []
    failing, witness = None, None
    for p in pats:
        if sub_frame_lower_bound(f, p.on_mask) > 0.0:
            continue
        G, h, s = gate_cell(op, p.state)
        reach, w = exterior_reach(G, h, s, cfg)
        if reach:
            failing, witness = p, w
            break
        if reach is None:
            undecided.append(p)
    notes = ["off states realised with strict_margin; cells tested against |x| > 1"]
    if failing is not None:
        verdict = "not-injective"
    elif undecided:
        verdict = "inconclusive"
        notes.append(f"{len(undecided)} failing cell(s) could not be placed relative to the ball")
    else:
        verdict = "injective"
    return GateReport(op, verdict, failing, witness, pats, undecided, notes, cfg)
