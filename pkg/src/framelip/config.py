"""Tolerances, caps and sampling knobs shared by every analysis."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class AnalysisConfig:
    # numeric core
    sym_tol: float = 1e-9
    eig_tol: float = 1e-10
    jacobi_tol: float = 1e-12
    jacobi_max_sweeps: int = 100
    qp_tol: float = 1e-8
    qp_max_iter: int = 10_000
    lp_box: float = 1e3

    # frames and patterns
    frame_tol: float = 1e-10
    strict_margin: float = 1e-7
    pattern_cap: int = 22
    sat_pattern_cap: int = 14
    allow_sampling: bool = True
    sample_budget: int = 1_000_000
    sample_radius: float = 3.0

    # saturation / gating
    ball_tol: float = 1e-9
    lambda_tol: float = 1e-6
    bisect_max_iter: int = 40
    vertex_enum_cap: int = 5000

    # lipschitz lab
    seed: int = 0
    kappa_budget: int = 100_000
    box_radius: float = 3.0
    refine_cap: int = 2000
    refine_top: int = 4
    refine_min_step: float = 1e-8
    min_pair_dist: float = 1e-6
    cert_tol: float = 1e-6
    chunk_size: int = 100_000

    def replace(self, **changes) -> "AnalysisConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_CONFIG = AnalysisConfig()


def resolve(cfg: AnalysisConfig | None) -> AnalysisConfig:
    return DEFAULT_CONFIG if cfg is None else cfg


def worker_count() -> int:
    """Worker cap from ``FRAMELIP_THREADS``; results never depend on it."""
    raw = os.environ.get("FRAMELIP_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)
