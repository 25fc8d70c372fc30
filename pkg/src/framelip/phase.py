"""Real phase retrieval: complement property, sigma-strong complement constant, A_|.|."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import AnalysisConfig, resolve
from .errors import NotPhaseRetrievable, TooManyIndices
from .frames import Frame, full_mask, measure, sub_frame_lower_bound
from .patterns import enum_sign_chambers, sign_str


@dataclass(frozen=True, eq=False)
class IntensityOperator:
    """[x] -> (|<x, phi_i>|)_i on R^n modulo sign."""

    frame: Frame

    kind = "pr"
    default_domain = "quotient"

    def apply(self, X) -> np.ndarray:
        return np.abs(measure(self.frame, X))


def intensity_apply(f: Frame, x) -> np.ndarray:
    return np.abs(measure(f, x))


@dataclass
class ComplementReport:
    holds: bool
    failing_subset: int | None  # mask J with neither J nor its complement spanning
    sigma_sq: float
    worst_subset: int


def complement_property(f: Frame, cfg: AnalysisConfig | None = None) -> ComplementReport:
    """Exhaustive check over the 2^(m-1) splits {J, J^c}; J always contains index 0.

    ``sigma_sq`` is the minimum over splits of max(A_J, A_{J^c}).
    """
    cfg = resolve(cfg)
    if f.m > cfg.pattern_cap:
        raise TooManyIndices(f"m={f.m} exceeds pattern_cap={cfg.pattern_cap}")
    full = full_mask(f.m)
    best, best_J = np.inf, None
    for rest in range(1 << (f.m - 1)):
        J = 1 | (rest << 1)
        val = max(sub_frame_lower_bound(f, J), sub_frame_lower_bound(f, full ^ J))
        if val < best:
            best, best_J = val, J
    holds = best > 0.0
    return ComplementReport(holds, None if holds else best_J, float(best), best_J)


@dataclass
class AAbsReport:
    a_abs: float
    worst_product_pattern: tuple  # +1 where signs agree, -1 where they differ
    chamber_count: int
    product_count: int

    def encode(self) -> str:
        return sign_str(self.worst_product_pattern)


def realizable_agreements(f: Frame, cfg: AnalysisConfig | None = None) -> list[int]:
    """Masks I^+ = {i : signs of <x, phi_i> and <y, phi_i> agree} over all chamber pairs."""
    chambers = enum_sign_chambers(f, cfg)
    P = np.array([c.plus_mask for c in chambers], dtype=np.int64)
    full = np.int64(full_mask(f.m))
    agree = full & ~(P[:, None] ^ P[None, :])
    return sorted(set(agree.ravel().tolist())), len(chambers)


def a_abs(f: Frame, cfg: AnalysisConfig | None = None) -> AAbsReport:
    """min over realizable sign-agreement splits of max(A_{I+}, A_{I-})."""
    cfg = resolve(cfg)
    agree, n_chambers = realizable_agreements(f, cfg)
    full = full_mask(f.m)
    best, best_mask = np.inf, None
    for plus in agree:
        val = max(sub_frame_lower_bound(f, plus), sub_frame_lower_bound(f, full ^ plus))
        if val < best:
            best, best_mask = val, plus
    pattern = tuple(1 if best_mask >> i & 1 else -1 for i in range(f.m))
    return AAbsReport(float(best), pattern, n_chambers, len(agree))


@dataclass(frozen=True)
class PRBounds:
    sigma: float
    a_abs: float
    bandeira: tuple  # (sigma, sqrt(2) sigma)
    a_form: tuple  # (sqrt(A), sqrt(2A))
    improved: tuple  # (sqrt(A), sqrt(2) sigma)


def pr_lipschitz_bounds(f: Frame, cfg: AnalysisConfig | None = None, cp=None, aa=None) -> PRBounds:
    cfg = resolve(cfg)
    cp = complement_property(f, cfg) if cp is None else cp
    if not cp.holds:
        raise NotPhaseRetrievable("frame lacks the complement property")
    aa = a_abs(f, cfg) if aa is None else aa
    s = float(np.sqrt(cp.sigma_sq))
    ra = float(np.sqrt(aa.a_abs))
    return PRBounds(
        sigma=s,
        a_abs=aa.a_abs,
        bandeira=(s, np.sqrt(2.0) * s),
        a_form=(ra, np.sqrt(2.0) * ra),
        improved=(ra, np.sqrt(2.0) * s),
    )


def pr_empirical_kappa(f: Frame, cfg: AnalysisConfig | None = None):
    """Sampled lower Lipschitz ratio of the intensity map under the quotient metric."""
    from .lipschitz import estimate_kappa

    return estimate_kappa(IntensityOperator(f), cfg=cfg)
