"""ReLU layers x -> (max(0, <x, phi_i> - alpha_i))_i: injectivity, A_alpha and Lipschitz bounds."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import AnalysisConfig, resolve
from .errors import DimensionMismatch, NotInjective
from .frames import Frame, bottom_eigvec, frame_bounds, measure, sub_frame_lower_bound
from .linalg import min_norm_arrays
from .patterns import PatternSet, ReluPattern, _bits_to_int, enum_relu_patterns


@dataclass(frozen=True, eq=False)
class ReluLayer:
    frame: Frame
    bias: np.ndarray = None

    def __post_init__(self):
        bias = np.zeros(self.frame.m) if self.bias is None else np.array(self.bias, dtype=float).ravel()
        if bias.shape != (self.frame.m,):
            raise DimensionMismatch(f"bias has length {bias.size}, frame has m={self.frame.m}")
        if not np.all(np.isfinite(bias)):
            raise ValueError("bias must be finite")
        bias.setflags(write=False)
        object.__setattr__(self, "bias", bias)

    kind = "relu"
    default_domain = "box"

    def apply(self, X) -> np.ndarray:
        return np.maximum(measure(self.frame, X) - self.bias, 0.0)


def relu_apply(layer: ReluLayer, x) -> np.ndarray:
    return layer.apply(x)


def active_set(layer: ReluLayer, x) -> int:
    """Mask of indices with <x, phi_i> >= alpha_i (ties count as active)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (layer.frame.n,):
        raise DimensionMismatch(f"expected a vector of length {layer.frame.n}")
    return int(_bits_to_int((measure(layer.frame, x) >= layer.bias)[None, :])[0])


def active_masks(layer: ReluLayer, X) -> np.ndarray:
    return _bits_to_int(measure(layer.frame, X) >= layer.bias)


def relu_cell(layer: ReluLayer, mask: int):
    """Open cell of an activation pattern as ``G x >= h`` rows, all strict."""
    V, a = layer.frame.vectors, layer.bias
    sign = np.array([1.0 if mask >> i & 1 else -1.0 for i in range(layer.frame.m)])
    return sign[:, None] * V, sign * a, np.ones(layer.frame.m, dtype=bool)


@dataclass
class ReluInjectivityReport:
    layer: ReluLayer
    injective: bool
    a_alpha: float
    worst_pattern: ReluPattern
    failing_pattern: ReluPattern | None
    patterns: PatternSet
    bounds: dict = field(default_factory=dict)  # active mask -> lower frame bound
    config: AnalysisConfig | None = None

    @property
    def method(self) -> str:
        return self.patterns.method


def _closest_to_origin(layer, candidates, cfg):
    best, best_key = None, None
    for p in candidates:
        G, h, s = relu_cell(layer, p.active)
        res = min_norm_arrays(G, h, s, cfg)
        dist = res.norm if res.feasible else np.inf
        key = (round(dist, 9), p.encode())
        if best_key is None or key < best_key:
            best, best_key = p, key
    return best


def relu_injectivity(layer: ReluLayer, cfg: AnalysisConfig | None = None) -> ReluInjectivityReport:
    """Injective iff every realizable activated sub-collection is a frame.

    ``a_alpha`` is the smallest lower frame bound over the realizable
    activation sets.  When several patterns fail, the reported one is the
    failing cell closest to the origin.
    """
    cfg = resolve(cfg)
    pats = enum_relu_patterns(layer.frame, layer.bias, cfg)
    bounds = {p.active: sub_frame_lower_bound(layer.frame, p.active) for p in pats}
    if not len(pats):
        raise RuntimeError("no activation pattern found")
    a_min = min(bounds.values())
    failing = [p for p in pats if bounds[p.active] <= 0.0]
    if failing:
        worst = _closest_to_origin(layer, failing, cfg)
        return ReluInjectivityReport(layer, False, 0.0, worst, worst, pats, bounds, cfg)
    worst = min(pats, key=lambda p: (bounds[p.active], p.encode()))
    return ReluInjectivityReport(layer, True, a_min, worst, None, pats, bounds, cfg)


def relu_pointwise_lower(layer: ReluLayer, x, y) -> float:
    """Midpoint bound 1/4 * A_alpha((x+y)/2) * |x - y|^2, never above |C(x) - C(y)|^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (layer.frame.n,) or y.shape != x.shape:
        raise DimensionMismatch("x and y must be vectors of length n")
    mid = 0.5 * (x + y)
    a_mid = sub_frame_lower_bound(layer.frame, active_set(layer, mid))
    return 0.25 * a_mid * float(np.sum((x - y) ** 2))


def relu_lipschitz_bounds(report: ReluInjectivityReport) -> tuple[float, float]:
    """(1/2 sqrt(A_alpha), sqrt(A_alpha)) for an injective layer."""
    if not report.injective:
        raise NotInjective("ReLU layer is not injective; no positive lower Lipschitz bound")
    r = float(np.sqrt(report.a_alpha))
    return 0.5 * r, r


@dataclass(frozen=True)
class DoubledKappa:
    kappa: float
    witness: tuple  # (u, -u)


def doubled_frame_kappa(f: Frame) -> DoubledKappa:
    """Exact lower Lipschitz bound sqrt(A/2) of the zero-bias layer on (phi_i) and (-phi_i).

    Attained at (u, -u) for u a unit bottom eigenvector of the frame operator.
    """
    A = frame_bounds(f).lower
    u = bottom_eigvec(f)
    return DoubledKappa(float(np.sqrt(A / 2.0)), (u, -u))
