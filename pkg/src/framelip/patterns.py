"""Enumeration of realizable activation, saturation and sign patterns.

Each enumerator walks the candidate patterns depth-first, one index at a time,
and prunes a branch as soon as its partial cell is empty; every pattern that
survives gets its own feasibility witness.  Boundary patterns (cells with no
interior) are merged into their neighbours through ``strict_margin``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import AnalysisConfig, resolve, worker_count
from .errors import DimensionMismatch, TooManyIndices, ZeroVectorInFrame
from .frames import Frame, mask_str, measure
from .linalg import feasible_arrays, min_norm_arrays

NEG, LIN, POS = -1, 0, 1
_STATE_CHARS = {NEG: "-", LIN: "l", POS: "+"}


def state_str(state) -> str:
    return "".join(_STATE_CHARS[int(s)] for s in state)


def sign_str(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


@dataclass(frozen=True)
class ReluPattern:
    active: int  # bitmask
    witness: np.ndarray = field(compare=False)
    m: int = field(default=0, compare=False)

    def encode(self) -> str:
        return mask_str(self.active, self.m)


@dataclass(frozen=True)
class SatPattern:
    state: tuple  # per index: -1 (neg), 0 (lin), +1 (pos)
    witness: np.ndarray = field(compare=False)
    min_norm: float = field(default=0.0, compare=False)

    @property
    def lin_mask(self) -> int:
        return sum(1 << i for i, s in enumerate(self.state) if s == LIN)

    def encode(self) -> str:
        return state_str(self.state)


@dataclass(frozen=True)
class SignChamber:
    signs: tuple  # per index: +1 / -1
    witness: np.ndarray = field(compare=False)

    @property
    def plus_mask(self) -> int:
        return sum(1 << i for i, s in enumerate(self.signs) if s > 0)

    def encode(self) -> str:
        return sign_str(self.signs)


@dataclass
class PatternSet:
    """Enumerated patterns plus how they were obtained (``"exact"`` or ``"sampling"``)."""

    patterns: list
    method: str = "exact"
    notes: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self):
        return len(self.patterns)

    def __getitem__(self, k):
        return self.patterns[k]

    def encodings(self) -> list[str]:
        return [p.encode() for p in self.patterns]


MARGIN_NOTE = "boundary patterns merged into closed neighbours via strict_margin"
SAMPLING_NOTE = "lower-confidence: sampling"


def _dfs(m, branches, node_ok, leaf):
    """Depth-first walk over per-index choices.

    ``branches(i)`` yields (choice, rows) for index i; ``node_ok(rows, hint)``
    returns a point of the partial cell or None; ``leaf(choices, rows)`` builds
    the final pattern (or None).
    """
    out = []
    stack = [(0, (), None, None)]  # depth, choices, (G, h, strict), hint point
    while stack:
        depth, choices, sys_, hint = stack.pop()
        if depth == m:
            p = leaf(choices, sys_)
            if p is not None:
                out.append(p)
            continue
        for choice, (g, h, s) in reversed(list(branches(depth))):
            if sys_ is None:
                G, H, S = g, h, s
            else:
                G = np.vstack([sys_[0], g])
                H = np.concatenate([sys_[1], h])
                S = np.concatenate([sys_[2], s])
            pt = node_ok((G, H, S), hint)
            if pt is not None:
                stack.append((depth + 1, choices + (choice,), (G, H, S), pt))
    return out


def _satisfies(G, H, S, x, margin):
    if x is None:
        return False
    slack = G @ x - H
    return bool(np.all(slack[~S] >= 0.0) and np.all(slack[S] >= margin))


# ---------------------------------------------------------------- ReLU

def enum_relu_patterns(f: Frame, bias, cfg: AnalysisConfig | None = None) -> PatternSet:
    """All activation sets I(x) = {i : <x, phi_i> >= alpha_i} over open cells of R^n."""
    cfg = resolve(cfg)
    alpha = np.asarray(bias, dtype=float).ravel()
    if alpha.shape != (f.m,):
        raise DimensionMismatch(f"bias must have length {f.m}")
    if f.m > cfg.pattern_cap:
        if not cfg.allow_sampling:
            raise TooManyIndices(f"m={f.m} exceeds pattern_cap={cfg.pattern_cap}")
        return _relu_by_sampling(f, alpha, cfg)

    V, eps, box = f.vectors, cfg.strict_margin, cfg.lp_box
    yes = np.array([True])

    def branches(i):
        yield 1, (V[i : i + 1], alpha[i : i + 1], yes)
        yield 0, (-V[i : i + 1], -alpha[i : i + 1], yes)

    def node_ok(sys_, hint):
        G, H, S = sys_
        if _satisfies(G, H, S, hint, eps):
            return hint
        res = feasible_arrays(G, H, S, eps, box)
        return res.witness if res.feasible else None

    def leaf(choices, sys_):
        G, H, S = sys_
        res = feasible_arrays(G, H, S, eps, box, center=True)
        if not res.feasible:
            return None
        mask = sum(1 << i for i, c in enumerate(choices) if c)
        return ReluPattern(mask, res.witness, f.m)

    pats = _dfs(f.m, branches, node_ok, leaf)
    pats.sort(key=lambda p: p.encode())
    return PatternSet(pats, "exact", [MARGIN_NOTE])


def relu_sample_points(f: Frame, bias, scale: float | None = None):
    """Sampler ``gen(rng, k)`` of Gaussian points scaled past the bias hyperplanes."""
    alpha = np.asarray(bias, dtype=float).ravel()
    if scale is None:
        norms = np.linalg.norm(f.vectors, axis=1)
        scale = 3.0 * max(1.0, float(np.max(np.abs(alpha) / norms)))

    def gen(rng, k):
        return scale * rng.standard_normal((k, f.n))

    return gen


def _chunked(n_samples: int, seed: int, chunk: int, job: Callable):
    """Run ``job(rng, k)`` over seeded chunks; output order fixed by chunk index."""
    counts = [chunk] * (n_samples // chunk)
    if n_samples % chunk:
        counts.append(n_samples % chunk)
    seqs = np.random.SeedSequence(int(seed) & (2**64 - 1)).spawn(len(counts))
    tasks = list(zip(seqs, counts))

    def run(t):
        return job(np.random.default_rng(t[0]), t[1])

    workers = min(worker_count(), len(tasks)) or 1
    if workers == 1:
        return [run(t) for t in tasks]
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(run, tasks))


def _bits_to_int(B: np.ndarray) -> np.ndarray:
    w = (np.int64(1) << np.arange(B.shape[1], dtype=np.int64))
    return B.astype(np.int64) @ w


def sample_relu_masks(f: Frame, bias, n_samples: int, seed: int = 0, scale=None, chunk=100_000):
    """Activation masks hit by random probing; maps mask -> one sample point."""
    alpha = np.asarray(bias, dtype=float).ravel()
    gen = relu_sample_points(f, alpha, scale)

    def job(rng, k):
        X = gen(rng, k)
        masks = _bits_to_int(measure(f, X) >= alpha)
        u, idx = np.unique(masks, return_index=True)
        return dict(zip(u.tolist(), X[idx]))

    found = {}
    for part in _chunked(n_samples, seed, chunk, job):
        for k, x in part.items():
            found.setdefault(k, x)
    return found


def _relu_by_sampling(f, alpha, cfg):
    found = sample_relu_masks(f, alpha, cfg.sample_budget, cfg.seed, chunk=cfg.chunk_size)
    pats = [ReluPattern(k, x, f.m) for k, x in found.items()]
    pats.sort(key=lambda p: p.encode())
    return PatternSet(pats, "sampling", [SAMPLING_NOTE])


# ---------------------------------------------------------------- saturation

def _interior_in_ball(G, H, S, p, cfg):
    """Move the min-norm point p a little into the cell, staying inside the unit ball."""
    eps = cfg.strict_margin
    c = feasible_arrays(G, H, S, eps, 1.0, center=True)
    pn = float(np.linalg.norm(p))
    if not c.feasible or c.witness is None or pn >= 1.0:
        return p
    target = 1.0 - 0.5 * (1.0 - pn)
    theta = 1.0
    for _ in range(60):
        w = p + theta * (c.witness - p)
        if np.linalg.norm(w) <= target and _satisfies(G, H, S, w, eps):
            return w
        theta *= 0.5
    return p


def enum_sat_patterns(f: Frame, level: float, cfg: AnalysisConfig | None = None) -> PatternSet:
    """All saturation states realised by some x in the closed unit ball.

    ``pos``: <x, phi_i> >= level + margin; ``neg``: <= -level - margin;
    ``lin``: |<x, phi_i>| <= level.
    """
    cfg = resolve(cfg)
    lam = float(level)
    if not lam > 0:
        raise ValueError("saturation level must be positive")
    if f.m > cfg.sat_pattern_cap:
        if not cfg.allow_sampling:
            raise TooManyIndices(f"m={f.m} exceeds sat_pattern_cap={cfg.sat_pattern_cap}")
        return _sat_by_sampling(f, lam, cfg)

    V, eps = f.vectors, cfg.strict_margin
    radius = 1.0 + cfg.ball_tol
    yes, no = np.array([True]), np.array([False, False])

    def branches(i):
        phi = V[i : i + 1]
        yield NEG, (-phi, np.array([lam]), yes)
        yield LIN, (np.vstack([phi, -phi]), np.array([-lam, -lam]), no)
        yield POS, (phi, np.array([lam]), yes)

    def node_ok(sys_, hint):
        G, H, S = sys_
        if hint is not None and np.linalg.norm(hint) <= radius and _satisfies(G, H, S, hint, eps):
            return hint
        res = min_norm_arrays(G, H, S, cfg)
        if not res.feasible or res.norm > radius:
            return None
        return res.point

    def leaf(choices, sys_):
        G, H, S = sys_
        res = min_norm_arrays(G, H, S, cfg)
        if not res.feasible or res.norm > radius:
            return None
        w = _interior_in_ball(G, H, S, res.point, cfg)
        return SatPattern(tuple(choices), w, float(res.norm))

    pats = _dfs(f.m, branches, node_ok, leaf)
    pats.sort(key=lambda p: p.encode())
    return PatternSet(pats, "exact", [MARGIN_NOTE])


def ball_sampler(n: int):
    def gen(rng, k):
        g = rng.standard_normal((k, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return g * rng.random((k, 1)) ** (1.0 / n)

    return gen


def sat_states(coeffs: np.ndarray, level: float) -> np.ndarray:
    return np.where(coeffs > level, POS, np.where(coeffs < -level, NEG, LIN))


def sample_sat_states(f: Frame, level: float, n_samples: int, seed: int = 0, chunk=100_000):
    """Saturation states hit by uniform sampling of the unit ball; state string -> point."""
    gen = ball_sampler(f.n)
    w = 3 ** np.arange(f.m, dtype=np.int64)

    def job(rng, k):
        X = gen(rng, k)
        codes = (sat_states(measure(f, X), level) + 1).astype(np.int64) @ w
        u, idx = np.unique(codes, return_index=True)
        return {int(c): X[i] for c, i in zip(u, idx)}

    found = {}
    for part in _chunked(n_samples, seed, chunk, job):
        for k, x in part.items():
            found.setdefault(k, x)
    out = {}
    for code, x in found.items():
        digits = [(code // 3**i) % 3 - 1 for i in range(f.m)]
        out[state_str(digits)] = x
    return out


def _sat_by_sampling(f, lam, cfg):
    found = sample_sat_states(f, lam, cfg.sample_budget, cfg.seed, chunk=cfg.chunk_size)
    pats = []
    for code, x in found.items():
        state = tuple({"-": NEG, "l": LIN, "+": POS}[c] for c in code)
        pats.append(SatPattern(state, x, float(np.linalg.norm(x))))
    pats.sort(key=lambda p: p.encode())
    return PatternSet(pats, "sampling", [SAMPLING_NOTE])


# ---------------------------------------------------------------- sign chambers

def enum_sign_chambers(f: Frame, cfg: AnalysisConfig | None = None) -> PatternSet:
    """Sign vectors s with some x satisfying s_i <x, phi_i> >= margin for every i."""
    cfg = resolve(cfg)
    if np.any(np.all(f.vectors == 0.0, axis=1)):
        raise ZeroVectorInFrame("sign chambers need nonzero frame vectors")
    if f.m > cfg.pattern_cap:
        if not cfg.allow_sampling:
            raise TooManyIndices(f"m={f.m} exceeds pattern_cap={cfg.pattern_cap}")
        return _chambers_by_sampling(f, cfg)

    V, eps, box = f.vectors, cfg.strict_margin, cfg.lp_box
    yes, zero = np.array([True]), np.zeros(1)

    def branches(i):
        yield 1, (V[i : i + 1], zero, yes)
        if i > 0:  # first sign fixed to +; negation supplies the rest
            yield -1, (-V[i : i + 1], zero, yes)

    def node_ok(sys_, hint):
        G, H, S = sys_
        if _satisfies(G, H, S, hint, eps):
            return hint
        res = feasible_arrays(G, H, S, eps, box)
        return res.witness if res.feasible else None

    def leaf(choices, sys_):
        G, H, S = sys_
        res = feasible_arrays(G, H, S, eps, box, center=True)
        return SignChamber(tuple(choices), res.witness) if res.feasible else None

    half = _dfs(f.m, branches, node_ok, leaf)
    pats = half + [SignChamber(tuple(-s for s in c.signs), -c.witness) for c in half]
    pats.sort(key=lambda p: p.encode())
    return PatternSet(pats, "exact", [MARGIN_NOTE])


def sample_chambers(f: Frame, n_samples: int, seed: int = 0, chunk=100_000):
    """Plus-masks of sign vectors hit by Gaussian sampling; mask -> point."""

    def job(rng, k):
        X = rng.standard_normal((k, f.n))
        masks = _bits_to_int(measure(f, X) > 0)
        u, idx = np.unique(masks, return_index=True)
        return dict(zip(u.tolist(), X[idx]))

    found = {}
    for part in _chunked(n_samples, seed, chunk, job):
        for k, x in part.items():
            found.setdefault(k, x)
    return found


def _chambers_by_sampling(f, cfg):
    found = sample_chambers(f, cfg.sample_budget, cfg.seed, chunk=cfg.chunk_size)
    for k in list(found):
        found.setdefault(((1 << f.m) - 1) ^ k, -found[k])
    pats = [
        SignChamber(tuple(1 if k >> i & 1 else -1 for i in range(f.m)), x) for k, x in found.items()
    ]
    pats.sort(key=lambda p: p.encode())
    return PatternSet(pats, "sampling", [SAMPLING_NOTE])
