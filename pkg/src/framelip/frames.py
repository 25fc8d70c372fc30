"""Finite frames in R^n: bounds, sub-collections, constructors and file I/O."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .config import AnalysisConfig, resolve
from .errors import ConstructionFailed, DimensionMismatch, FrameError
from .linalg import sym_eig

MAX_ELEMENTS = 64


# index sets are plain int bitmasks: bit i set <=> index i in the set

def to_mask(J) -> int:
    if isinstance(J, (int, np.integer)):
        return int(J)
    mask = 0
    for i in J:
        mask |= 1 << int(i)
    return mask


def mask_indices(mask: int, m: int) -> list[int]:
    return [i for i in range(m) if mask >> i & 1]


def mask_str(mask: int, m: int) -> str:
    """Encode as a bit string, index 0 first (``"0110"``)."""
    return "".join("1" if mask >> i & 1 else "0" for i in range(m))


def full_mask(m: int) -> int:
    return (1 << m) - 1


class FrameBounds(tuple):
    __slots__ = ()

    def __new__(cls, lower: float, upper: float):
        return super().__new__(cls, (lower, upper))

    @property
    def lower(self) -> float:
        return self[0]

    @property
    def upper(self) -> float:
        return self[1]

    def __repr__(self):
        return f"FrameBounds(lower={self[0]!r}, upper={self[1]!r})"


@dataclass(frozen=True, eq=False)
class Frame:
    """m measurement vectors in R^n, stored as the rows of an m x n array.

    Construction accepts rank-deficient collections; :attr:`is_frame` records
    whether the vectors span (lower bound above ``frame_tol``).
    """

    vectors: np.ndarray
    label: str | None = None
    cfg: AnalysisConfig | None = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        V = np.array(self.vectors, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
        if V.ndim != 2 or V.shape[0] < 1 or V.shape[1] < 1:
            raise FrameError(f"vectors must form an m x n array, got shape {V.shape}")
        if not np.all(np.isfinite(V)):
            raise FrameError("frame vectors must be finite")
        m, n = V.shape
        if m < n:
            raise FrameError(f"need m >= n, got m={m}, n={n}")
        if m > MAX_ELEMENTS:
            raise FrameError(f"at most {MAX_ELEMENTS} elements supported, got {m}")
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def config(self) -> AnalysisConfig:
        return resolve(self.cfg)

    @property
    def is_frame(self) -> bool:
        return frame_bounds(self).lower > 0.0

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"Frame(m={self.m}, n={self.n}, label={self.label!r})"


def _sub_eig(f: Frame, mask: int):
    key = ("eig", mask)
    hit = f._cache.get(key)
    if hit is None:
        rows = f.vectors[mask_indices(mask, f.m)]
        hit = sym_eig(rows.T @ rows, f.config)
        f._cache[key] = hit
    return hit


def frame_bounds(f: Frame) -> FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of the frame operator."""
    w = _sub_eig(f, full_mask(f.m)).eigenvalues
    lower = float(w[0]) if w[0] > f.config.frame_tol else 0.0
    return FrameBounds(lower, float(max(w[-1], 0.0)))


def sub_frame_lower_bound(f: Frame, J) -> float:
    """Lower frame bound of the sub-collection indexed by ``J`` (mask or indices).

    Returns 0 when the sub-collection does not span R^n.
    """
    mask = to_mask(J)
    if mask >> f.m:
        raise DimensionMismatch(f"index set {mask:#x} exceeds m={f.m}")
    if bin(mask).count("1") < f.n:
        return 0.0
    key = ("lb", mask)
    hit = f._cache.get(key)
    if hit is None:
        w0 = float(_sub_eig(f, mask).eigenvalues[0])
        hit = w0 if w0 > f.config.frame_tol else 0.0
        f._cache[key] = hit
    return hit


def bottom_eigvec(f: Frame, J=None) -> np.ndarray:
    """Unit eigenvector for the smallest eigenvalue of the (sub-)frame operator."""
    mask = full_mask(f.m) if J is None else to_mask(J)
    if mask == 0:
        v = np.zeros(f.n)
        v[0] = 1.0
        return v
    return _sub_eig(f, mask).eigenvectors[:, 0].copy()


def measure(f: Frame, x) -> np.ndarray:
    """Analysis operator: the frame coefficients <x, phi_i>.

    ``x`` may be a single vector or a stack of vectors (last axis n).
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (f.n,):
        raise DimensionMismatch(f"expected last axis of length {f.n}, got shape {x.shape}")
    return x @ f.vectors.T


# constructors

def make_standard_basis(n: int) -> Frame:
    if n < 1:
        raise FrameError("n must be >= 1")
    return Frame(np.eye(n), label=f"basis-{n}")


def make_mercedes_benz() -> Frame:
    """Three unit vectors at 120 degrees in R^2, the first one (0, 1)."""
    ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    V = np.column_stack([np.cos(ang), np.sin(ang)])
    V[0] = (0.0, 1.0)
    return Frame(V, label="mercedes-benz")


def make_doubled(f: Frame) -> Frame:
    """The 2m-element frame (phi_i) followed by (-phi_i)."""
    label = f"doubled({f.label})" if f.label else "doubled"
    return Frame(np.vstack([f.vectors, -f.vectors]), label=label, cfg=f.cfg)


def make_random(n: int, m: int, seed: int = 0, max_tries: int = 100) -> Frame:
    """i.i.d. standard normal vectors; rank-deficient draws are rejected."""
    if n < 1 or m < n:
        raise FrameError(f"need m >= n >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed) & (2**64 - 1)))
    for _ in range(max_tries):
        f = Frame(rng.standard_normal((m, n)), label=f"random-{n}x{m}-seed{seed}")
        if f.is_frame:
            return f
    raise ConstructionFailed("could not draw a spanning random frame")


def make_simplex_funtf(n: int) -> Frame:
    """n+1 unit vectors forming a tight frame with bound (n+1)/n.

    The vertices of a regular simplex centred at the origin, written in an
    orthonormal basis of the hyperplane orthogonal to (1, ..., 1).  For n = 2
    this is rotated to coincide with :func:`make_mercedes_benz`.
    """
    if n < 1:
        raise FrameError("n must be >= 1")
    if n == 2:
        f = make_mercedes_benz()
    else:
        k = n + 1
        # Helmert basis of the sum-zero hyperplane in R^{n+1}
        H = np.zeros((n, k))
        for j in range(1, k):
            H[j - 1, :j] = 1.0
            H[j - 1, j] = -j
            H[j - 1] /= np.sqrt(j * (j + 1))
        P = np.eye(k) - 1.0 / k
        V = P @ H.T
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        f = Frame(V, label=f"simplex-funtf-{n}")
    S = f.vectors.T @ f.vectors
    resid = np.max(np.abs(S - (n + 1) / n * np.eye(n)))
    norms = np.abs(np.linalg.norm(f.vectors, axis=1) - 1.0).max()
    if resid > 1e-9 or norms > 1e-9:
        raise ConstructionFailed(f"FUNTF verification residual {max(resid, norms):.3e}")
    if n == 2:
        f = Frame(f.vectors, label="simplex-funtf-2")
    return f


# file formats

def _g17(x: float) -> str:
    return format(float(x), ".17g")


def frame_to_json(f: Frame) -> str:
    rows = ",\n    ".join("[" + ", ".join(_g17(v) for v in row) + "]" for row in f.vectors)
    label = "" if f.label is None else f',\n  "label": {json.dumps(f.label)}'
    return f'{{\n  "n": {f.n},\n  "m": {f.m},\n  "vectors": [\n    {rows}\n  ]{label}\n}}\n'


def frame_to_csv(f: Frame) -> str:
    return "".join(",".join(_g17(v) for v in row) + "\n" for row in f.vectors)


def frame_from_json(text: str) -> Frame:
    data = json.loads(text)
    try:
        n, m, vectors = data["n"], data["m"], data["vectors"]
    except (KeyError, TypeError) as exc:
        raise FrameError(f"frame JSON missing field: {exc}") from None
    V = np.array(vectors, dtype=float)
    if V.ndim != 2 or V.shape != (m, n):
        raise FrameError(f"declared shape ({m}, {n}) does not match vectors {V.shape}")
    return Frame(V, label=data.get("label"))


def frame_from_csv(text: str) -> Frame:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    try:
        V = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise FrameError(f"bad CSV frame: {exc}") from None
    return Frame(V)


def load_frame(path) -> Frame:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return frame_from_csv(text)
    return frame_from_json(text)


def save_frame(f: Frame, path) -> None:
    path = Path(path)
    text = frame_to_csv(f) if path.suffix.lower() == ".csv" else frame_to_json(f)
    path.write_text(text)


def as_frame(obj: Frame | Iterable) -> Frame:
    return obj if isinstance(obj, Frame) else Frame(np.asarray(obj, dtype=float))
