"""Saturated (clipped) measurements on the unit ball."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import AnalysisConfig, resolve
from .errors import (
    DimensionMismatch,
    NoUpperBound,
    NotInjective,
    OutsideDomain,
    WrongElementCount,
)
from .frames import Frame, frame_bounds, measure, sub_frame_lower_bound
from .patterns import LIN, NEG, POS, PatternSet, SatPattern, _bits_to_int, enum_sat_patterns


@dataclass(frozen=True, eq=False)
class SatOperator:
    frame: Frame
    level: float

    def __post_init__(self):
        lam = float(self.level)
        if not (lam > 0 and np.isfinite(lam)):
            raise ValueError(f"saturation level must be positive, got {self.level!r}")
        object.__setattr__(self, "level", lam)

    kind = "sat"
    default_domain = "ball"

    def apply(self, X) -> np.ndarray:
        return np.clip(measure(self.frame, X), -self.level, self.level)


def sat_apply(op: SatOperator, x, cfg: AnalysisConfig | None = None) -> np.ndarray:
    """Entrywise sign(t) * min(|t|, level) of the frame coefficients.

    Inputs outside the unit ball are clipped as usual but trigger a warning.
    """
    cfg = resolve(cfg)
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (op.frame.n,):
        raise DimensionMismatch(f"expected last axis of length {op.frame.n}")
    if np.any(np.linalg.norm(np.atleast_2d(x), axis=1) > 1.0 + cfg.ball_tol):
        warnings.warn("input outside the closed unit ball", stacklevel=2)
    return op.apply(x)


def _masks(op, x):
    t = measure(op.frame, np.asarray(x, dtype=float))
    return t, op.level


def unsat_set(op: SatOperator, x) -> int:
    t, lam = _masks(op, x)
    return int(_bits_to_int((np.abs(t) <= lam)[None, :])[0])


def pos_set(op: SatOperator, x) -> int:
    t, lam = _masks(op, x)
    return int(_bits_to_int((t > lam)[None, :])[0])


def neg_set(op: SatOperator, x) -> int:
    t, lam = _masks(op, x)
    return int(_bits_to_int((t < -lam)[None, :])[0])


def sat_cell(op: SatOperator, state):
    """Cell of a saturation state as ``G x >= h`` rows (strict on saturated rows)."""
    V, lam = op.frame.vectors, op.level
    G, h, s = [], [], []
    for i, st in enumerate(state):
        if st == POS:
            G.append(V[i]), h.append(lam), s.append(True)
        elif st == NEG:
            G.append(-V[i]), h.append(lam), s.append(True)
        else:
            G += [V[i], -V[i]]
            h += [-lam, -lam]
            s += [False, False]
    return np.array(G), np.array(h), np.array(s, dtype=bool)


@dataclass
class SatInjectivityReport:
    op: SatOperator
    injective: bool
    a_lambda: float
    worst_pattern: SatPattern
    failing_pattern: SatPattern | None
    patterns: PatternSet
    bounds: dict = field(default_factory=dict)  # lin mask -> lower frame bound
    config: AnalysisConfig | None = None

    @property
    def method(self) -> str:
        return self.patterns.method


def sat_injectivity(op: SatOperator, cfg: AnalysisConfig | None = None) -> SatInjectivityReport:
    """Injective on the ball iff every realizable unsaturated sub-collection is a frame.

    Among failing patterns the one whose cell comes closest to the origin is
    reported (ties broken by encoding).
    """
    cfg = resolve(cfg)
    pats = enum_sat_patterns(op.frame, op.level, cfg)
    bounds = {}
    for p in pats:
        bounds.setdefault(p.lin_mask, sub_frame_lower_bound(op.frame, p.lin_mask))
    failing = [p for p in pats if bounds[p.lin_mask] <= 0.0]
    if failing:
        worst = min(failing, key=lambda p: (round(p.min_norm, 9), p.encode()))
        return SatInjectivityReport(op, False, 0.0, worst, worst, pats, bounds, cfg)
    worst = min(pats, key=lambda p: (bounds[p.lin_mask], p.encode()))
    return SatInjectivityReport(op, True, bounds[worst.lin_mask], worst, None, pats, bounds, cfg)


@dataclass(frozen=True)
class DeltaData:
    delta_set: int  # indices saturated with opposite signs at x and y
    a_delta: float  # lower bound of I((x+y)/2) minus the delta set


def delta_data(op: SatOperator, x, y) -> DeltaData:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (op.frame.n,) or y.shape != x.shape:
        raise DimensionMismatch("x and y must be vectors of length n")
    delta = (pos_set(op, x) & neg_set(op, y)) | (neg_set(op, x) & pos_set(op, y))
    keep = unsat_set(op, 0.5 * (x + y)) & ~delta
    return DeltaData(delta, sub_frame_lower_bound(op.frame, keep))


def sat_pointwise_lower(op: SatOperator, x, y, cfg: AnalysisConfig | None = None) -> float:
    """(A_delta / 4 + |delta set| * level^2) * |x - y|^2 for x, y in the unit ball."""
    cfg = resolve(cfg)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for v in (x, y):
        if v.shape == (op.frame.n,) and np.linalg.norm(v) > 1.0 + cfg.ball_tol:
            raise OutsideDomain("pointwise saturation bound is only valid on the unit ball")
    d = delta_data(op, x, y)
    k = bin(d.delta_set).count("1")
    return (0.25 * d.a_delta + k * op.level**2) * float(np.sum((x - y) ** 2))


def sat_lipschitz_bounds(report: SatInjectivityReport) -> tuple[float, float]:
    """(min(1/2 sqrt(A_lambda), level), sqrt(A_lambda)) for an injective operator."""
    if not report.injective:
        raise NotInjective("saturation operator is not injective on the unit ball")
    r = float(np.sqrt(report.a_lambda))
    return min(0.5 * r, report.op.level), r


def sat_lipschitz_bounds_nplus1(report: SatInjectivityReport, f: Frame | None = None) -> tuple[float, float]:
    """Level-free sandwich (1/2 sqrt(A_lambda), sqrt(A_lambda)) for frames of n+1 vectors."""
    f = report.op.frame if f is None else f
    if f.m != f.n + 1:
        raise WrongElementCount(f"needs m = n + 1 vectors, got m={f.m}, n={f.n}")
    if not report.injective:
        raise NotInjective("saturation operator is not injective on the unit ball")
    r = float(np.sqrt(report.a_lambda))
    return 0.5 * r, r


@dataclass
class CriticalLambda:
    value: float  # upper bracket end, where injectivity holds
    bracket: tuple
    history: list  # successive (lo, hi)
    validation: dict
    iterations: int


def critical_lambda(f: Frame, cfg: AnalysisConfig | None = None, tol: float | None = None) -> CriticalLambda:
    """Smallest level at which saturation is injective on the ball, by bisection.

    The initial bracket is (0, sqrt(B)); at sqrt(B) nothing on the ball
    saturates.  The bracket invariant (lo not injective, hi injective) is
    checked at every step.
    """
    cfg = resolve(cfg)
    tol = cfg.lambda_tol if tol is None else tol

    def injective(lam):
        return sat_injectivity(SatOperator(f, lam), cfg).injective

    lo, hi = 0.0, float(np.sqrt(frame_bounds(f).upper))
    if not injective(hi):
        raise NoUpperBound("not injective at sqrt(B); the vectors do not form a frame")
    history = [(lo, hi)]
    it = 0
    while hi - lo > tol and it < cfg.bisect_max_iter:
        mid = 0.5 * (lo + hi)
        if injective(mid):
            hi = mid
        else:
            lo = mid
        plo, phi = history[-1]
        if lo < plo or hi > phi:
            raise RuntimeError("bisection bracket is not monotone")
        history.append((lo, hi))
        it += 1

    probe = 10 * tol
    above = injective(hi + probe)
    below = injective(hi - probe) if hi - probe > 0 else False
    validation = {
        "injective_at_value": True,
        "injective_above": bool(above),
        "injective_below": bool(below),
        "consistent": bool(above and not below),
        "probe_offset": probe,
    }
    return CriticalLambda(hi, (lo, hi), history, validation, it)
