"""Small dense linear algebra: symmetric eigensolver, LP feasibility, min-norm points.

Everything here works on tiny problems (dimension up to a few dozen), so the
routines favour robustness and exactness over speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .config import AnalysisConfig, resolve
from .errors import DimensionMismatch, IterationLimit, NoConvergence, NonSymmetric


class EigResult(NamedTuple):
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # orthonormal columns


def sym_eig(S, cfg: AnalysisConfig | None = None) -> EigResult:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns.
    """
    cfg = resolve(cfg)
    A = np.array(S, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    asym = float(np.max(np.abs(A - A.T)))
    if asym > cfg.sym_tol * scale:
        raise NonSymmetric(f"asymmetry {asym:.3e} exceeds sym_tol")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    Q = np.eye(n)

    fro = float(np.linalg.norm(A))
    threshold = cfg.jacobi_tol * fro if fro > 0 else 0.0
    converged = n == 1
    for _ in range(cfg.jacobi_max_sweeps):
        off = np.abs(A - np.diag(np.diag(A)))
        if float(off.max()) <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= threshold:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                vp, vq = Q[:, p].copy(), Q[:, q].copy()
                Q[:, p] = c * vp - s * vq
                Q[:, q] = s * vp + c * vq
    else:
        off = np.abs(A - np.diag(np.diag(A)))
        converged = float(off.max()) <= threshold
    if not converged:
        raise NoConvergence(f"Jacobi did not converge in {cfg.jacobi_max_sweeps} sweeps")

    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return EigResult(w[order], Q[:, order])


@dataclass(frozen=True)
class Halfspace:
    """The set ``{x : <normal, x> (>= | <=) offset}``.

    ``strict`` marks an open inequality; solvers realise it with a margin.
    """

    normal: tuple
    offset: float
    sense: str = ">="
    strict: bool = False

    def __post_init__(self):
        normal = tuple(float(v) for v in np.ravel(self.normal))
        if not normal or not any(normal):
            raise ValueError("halfspace normal must be nonzero")
        if self.sense not in (">=", "<="):
            raise ValueError(f"sense must be '>=' or '<=', got {self.sense!r}")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    def as_geq(self) -> tuple[np.ndarray, float]:
        g = np.asarray(self.normal)
        if self.sense == ">=":
            return g, self.offset
        return -g, -self.offset

    def slack(self, x) -> float:
        g, h = self.as_geq()
        return float(g @ np.asarray(x, dtype=float) - h)


def _system(constraints: Sequence[Halfspace], dim: int):
    if dim < 1:
        raise DimensionMismatch("dimension must be at least 1")
    G = np.zeros((len(constraints), dim))
    h = np.zeros(len(constraints))
    strict = np.zeros(len(constraints), dtype=bool)
    for k, c in enumerate(constraints):
        if len(c.normal) != dim:
            raise DimensionMismatch(f"constraint {k} has dimension {len(c.normal)}, expected {dim}")
        G[k], h[k] = c.as_geq()
        strict[k] = c.strict
    return G, h, strict


class LPResult(NamedTuple):
    feasible: bool
    witness: np.ndarray | None
    slack: float  # achieved common slack on the strict (or centred) rows
    inconclusive: bool = False


_HIGHS_OPTS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def _solve_slack_lp(G, h, t_rows, box, t_cap, shift=0.0):
    """max t  s.t.  G x - h >= t on t_rows, G x - h >= shift elsewhere, |x|_inf <= box."""
    k, n = G.shape
    if k == 0:
        return np.zeros(n), t_cap, True
    use_t = bool(np.any(t_rows))
    c = np.zeros(n + 1)
    c[-1] = -1.0 if use_t else 0.0
    A_ub = np.hstack([-G, t_rows.astype(float)[:, None]])
    b_ub = -(h + np.where(t_rows, 0.0, shift))
    bounds = [(-box, box)] * n + [((None, t_cap) if use_t else (0.0, 0.0))]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs", options=_HIGHS_OPTS)
    if res.status == 2:
        return None, -np.inf, True
    if res.status != 0:
        return None, -np.inf, False
    x = res.x[:n]
    t = float(res.x[-1]) if use_t else t_cap
    return x, t, True


def _tidy_center(G, h, t_rows, t, box):
    """Smallest max-norm point keeping half the centred slack; None if the LP fails."""
    k, n = G.shape
    c = np.zeros(n + 1)
    c[-1] = 1.0
    need = h + np.where(t_rows, 0.5 * t, 0.0)
    A_ub = np.vstack([
        np.hstack([-G, np.zeros((k, 1))]),
        np.hstack([np.eye(n), -np.ones((n, 1))]),
        np.hstack([-np.eye(n), -np.ones((n, 1))]),
    ])
    b_ub = np.concatenate([-need, np.zeros(2 * n)])
    bounds = [(-box, box)] * n + [(0.0, box)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs", options=_HIGHS_OPTS)
    return res.x[:n] if res.status == 0 else None


def feasible_arrays(G, h, strict, margin, box, center=False, t_cap=1.0) -> LPResult:
    """Array form of :func:`lp_feasible`; rows read ``G x >= h`` (+ margin where strict)."""
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    strict = np.asarray(strict, dtype=bool)
    t_rows = np.ones(len(h), dtype=bool) if center else strict
    need = margin if np.any(strict) else 0.0
    if center and not np.any(strict):
        need = 0.0
    for shift in (0.0, 1e-9):
        x, t, ok = _solve_slack_lp(G, h, t_rows, box, max(t_cap, need), shift)
        if not ok:
            return LPResult(False, None, -np.inf, inconclusive=True)
        if x is None or t < need - 1e-13:
            return LPResult(False, None, t)
        if center and len(h) and t > 2 * need:
            # the centred LP leaves x free once t hits its cap; pull the witness in
            x2 = _tidy_center(G, h, t_rows, t, box)
            if x2 is not None:
                s2 = G @ x2 - h
                if np.all(s2[~strict] >= 0.0) and np.all(s2[strict] >= margin):
                    x, t = x2, float(np.min(s2[t_rows]))
        slack = G @ x - h
        good = np.all(slack[~strict] >= 0.0) and np.all(slack[strict] >= margin)
        if good:
            return LPResult(True, x, t)
    return LPResult(True, x, t, inconclusive=True)


def lp_feasible(
    constraints: Sequence[Halfspace],
    dim: int,
    margin: float | None = None,
    cfg: AnalysisConfig | None = None,
    center: bool = False,
) -> LPResult:
    """Decide feasibility of a halfspace system; strict rows need slack >= ``margin``.

    With ``center=True`` the witness maximises the smallest slack over all rows
    (capped at 1), which gives a point well inside the cell.
    """
    cfg = resolve(cfg)
    margin = cfg.strict_margin if margin is None else margin
    G, h, strict = _system(constraints, dim)
    return feasible_arrays(G, h, strict, margin, cfg.lp_box, center=center)


class MinNormResult(NamedTuple):
    feasible: bool
    point: np.ndarray | None
    norm: float | None
    inconclusive: bool = False


def _active_set_min_norm(G, h, x0, max_iter):
    """Primal active-set method for min 1/2 |x|^2 s.t. G x >= h, from a feasible x0."""
    k, n = G.shape
    x = np.array(x0, dtype=float)
    scale = np.maximum(np.linalg.norm(G, axis=1), 1e-300)
    tol = 1e-12

    def independent(W, i):
        if len(W) >= n:
            return False
        M = G[W + [i]]
        return np.linalg.matrix_rank(M, tol=1e-10 * float(np.max(np.abs(M)))) == len(W) + 1

    W: list[int] = []
    for i in np.argsort(np.abs(G @ x - h) / scale):
        if abs(G[i] @ x - h[i]) <= tol * (1 + abs(h[i])) * 10 and independent(W, int(i)):
            W.append(int(i))
    for _ in range(max_iter):
        if W:
            GW = G[W]
            mu, *_ = np.linalg.lstsq(GW.T, x, rcond=None)
            p = np.zeros(n) if len(W) == n else -(x - GW.T @ mu)
        else:
            mu = np.zeros(0)
            p = -x
        if np.linalg.norm(p) <= 1e-11 * max(1.0, np.linalg.norm(x)):
            if len(mu) == 0 or mu.min() >= -1e-13:
                return x
            W.pop(int(np.argmin(mu)))
            continue
        Gp = G @ p
        step, block = 1.0, None
        for i in range(k):
            if i in W or Gp[i] >= -1e-15 * scale[i]:
                continue
            a = (h[i] - G[i] @ x) / Gp[i]
            if a < step:
                step, block = max(a, 0.0), i
        x = x + step * p
        if block is not None and independent(W, block):
            W.append(block)
    raise IterationLimit("active-set QP hit its iteration cap", best=x)


def _dykstra(G, h, max_iter, tol):
    """Cyclic Dykstra projection of the origin onto the intersection of halfspaces."""
    k, n = G.shape
    x = np.zeros(n)
    corr = np.zeros((k, n))
    norms2 = np.einsum("ij,ij->i", G, G)
    for _ in range(max_iter):
        x_old = x.copy()
        for i in range(k):
            y = x + corr[i]
            viol = h[i] - G[i] @ y
            x = y + (viol / norms2[i]) * G[i] if viol > 0 else y
            corr[i] = y - x
        if np.linalg.norm(x - x_old) <= tol * 1e-2 and np.max(h - G @ x) <= tol:
            return x
    raise IterationLimit("Dykstra projection hit its iteration cap", best=x)


def min_norm_arrays(G, h, strict, cfg: AnalysisConfig, method: str = "active-set") -> MinNormResult:
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    strict = np.asarray(strict, dtype=bool)
    n = G.shape[1]
    if G.shape[0] == 0:
        return MinNormResult(True, np.zeros(n), 0.0)
    h_closed = h + np.where(strict, cfg.strict_margin, 0.0)
    closed = np.zeros(len(h), dtype=bool)
    phase1 = feasible_arrays(G, h_closed, closed, 0.0, cfg.lp_box)
    if not phase1.feasible:
        return MinNormResult(False, None, None, phase1.inconclusive)
    if method == "dykstra":
        x = _dykstra(G, h_closed, cfg.qp_max_iter, cfg.qp_tol)
    elif method == "active-set":
        x = _active_set_min_norm(G, h_closed, phase1.witness, cfg.qp_max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")
    viol = float(np.max(h_closed - G @ x, initial=0.0))
    return MinNormResult(True, x, float(np.linalg.norm(x)), viol > cfg.qp_tol)


def min_norm_in_polytope(
    constraints: Sequence[Halfspace],
    dim: int,
    cfg: AnalysisConfig | None = None,
    method: str = "active-set",
) -> MinNormResult:
    """Point of smallest Euclidean norm in a closed polytope (strict rows tightened by the margin).

    Feasibility is settled by an LP phase 1; the minimiser then comes from
    a primal active-set method started at the phase-1 witness
    (``method="active-set"``) or cyclic Dykstra projections of the origin
    (``method="dykstra"``).
    """
    cfg = resolve(cfg)
    G, h, strict = _system(constraints, dim)
    return min_norm_arrays(G, h, strict, cfg, method=method)
