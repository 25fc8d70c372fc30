"""Empirical lower Lipschitz constants by sampling plus local refinement.

Every number reported here is a ratio actually observed on a pair of inputs,
so ``kappa_hat`` is always an upper bound on the true optimal lower
Lipschitz constant of the operator over its domain.  Pairs known to be
extremal for the closed-form bounds are injected next to the random ones,
which covers minimisers of measure zero.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import AnalysisConfig, resolve
from .errors import DegenerateDomain, DimensionMismatch, ZeroDistance
from .frames import Frame, bottom_eigvec, frame_bounds, full_mask, make_doubled, make_random, measure
from .patterns import _chunked

DOMAINS = ("box", "ball", "ball-complement", "quotient")


# ---------------------------------------------------------------- operators


class _Linear:
    """Plain analysis operator, used as a sanity reference."""

    kind = "linear"
    default_domain = "box"

    def __init__(self, frame: Frame):
        self.frame = frame

    def apply(self, X):
        return measure(self.frame, X)


def _as_operator(op):
    return _Linear(op) if isinstance(op, Frame) else op


# ---------------------------------------------------------------- domains


@dataclass(frozen=True)
class Domain:
    name: str
    n: int
    radius: float = 3.0

    def __post_init__(self):
        if self.name not in DOMAINS:
            raise ValueError(f"unknown domain {self.name!r}; expected one of {DOMAINS}")
        if self.n < 1:
            raise DegenerateDomain("domain dimension must be at least 1")

    def sample(self, rng, k):
        n, R = self.n, self.radius
        if self.name == "box":
            return np.clip(0.5 * R * rng.standard_normal((k, n)), -R, R)
        g = rng.standard_normal((k, n))
        if self.name == "quotient":
            return self.canonical(R * g / np.sqrt(n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        if self.name == "ball":
            return g * rng.random((k, 1)) ** (1.0 / n)
        return g * (1.0 + (R - 1.0) * rng.random((k, 1)))

    def canonical(self, X):
        """Sign representative with positive first nonzero coordinate."""
        if self.name != "quotient":
            return X
        X = np.array(X, dtype=float)
        nz = X != 0
        first = np.where(nz.any(axis=1), nz.argmax(axis=1), 0)
        s = np.sign(X[np.arange(len(X)), first])
        s[s == 0] = 1.0
        return X * s[:, None]

    def project(self, X):
        X = np.array(X, dtype=float)
        if self.name == "box":
            return np.clip(X, -self.radius, self.radius)
        if self.name in ("ball", "ball-complement"):
            r = np.linalg.norm(X, axis=-1, keepdims=True)
            if self.name == "ball":
                return np.where(r > 1.0, X / np.maximum(r, 1e-300), X)
            e = np.zeros(self.n)
            e[0] = 1.0
            X = np.where(r == 0.0, e, X)
            r = np.where(r == 0.0, 1.0, r)
            return np.where(r < 1.0, X / r, X)
        return X

    def contains(self, X, tol=1e-12) -> np.ndarray:
        X = np.atleast_2d(X)
        if self.name == "box":
            return np.all(np.abs(X) <= self.radius + tol, axis=1)
        r = np.linalg.norm(X, axis=1)
        if self.name == "ball":
            return r <= 1.0 + tol
        if self.name == "ball-complement":
            return r >= 1.0 - tol
        return np.ones(len(X), dtype=bool)

    def distance(self, X, Y):
        d = np.linalg.norm(X - Y, axis=-1)
        if self.name == "quotient":
            d = np.minimum(d, np.linalg.norm(X + Y, axis=-1))
        return d


def make_domain(op, domain: str | None = None, cfg: AnalysisConfig | None = None) -> Domain:
    cfg = resolve(cfg)
    op = _as_operator(op)
    return Domain(domain or op.default_domain, op.frame.n, cfg.box_radius)


def _ratios(op, dom: Domain, X, Y):
    d = dom.distance(X, Y)
    num = np.linalg.norm(op.apply(X) - op.apply(Y), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / d, d


def ratio(op, x, y, domain: str | None = None) -> float:
    """|Phi(x) - Phi(y)| / d(x, y), with the sign-quotient metric for intensity maps."""
    op = _as_operator(op)
    dom = Domain(domain or op.default_domain, op.frame.n)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (op.frame.n,) or y.shape != x.shape:
        raise DimensionMismatch(f"x and y must be vectors of length {op.frame.n}")
    d = float(dom.distance(x, y))
    if d == 0.0:
        raise ZeroDistance("ratio undefined for a pair at distance zero")
    return float(np.linalg.norm(op.apply(x) - op.apply(y))) / d


# ---------------------------------------------------------------- analysis + seeding


def _room(G, h, x):
    """Euclidean distance from x to the boundary of {G y >= h} (negative if outside)."""
    if len(h) == 0:
        return np.inf
    return float(np.min((G @ x - h) / np.linalg.norm(G, axis=1)))


def _in_cell_pair(G, h, w, v, dom: Domain, extra_room=np.inf):
    r = min(_room(G, h, w), extra_room)
    if not np.isfinite(r):
        r = 1.0
    if r <= 1e-9:
        return None
    x, y = w - 0.5 * r * v, w + 0.5 * r * v
    if dom.contains(np.vstack([x, y])).all():
        return x, y
    return None


def _relu_seed(layer, dom, cfg, rng):
    from .relu import relu_cell, relu_injectivity, relu_lipschitz_bounds

    f = layer.frame
    rep = relu_injectivity(layer, cfg)
    pairs = []
    u = bottom_eigvec(f)
    pairs.append((u, -u))
    zero_bias = not np.any(layer.bias)
    wit = {}
    for p in rep.patterns:
        w = np.array(p.witness, dtype=float)
        if zero_bias and np.linalg.norm(w) > 0:
            w = w / np.linalg.norm(w)
        if not dom.contains(w)[0]:
            continue
        wit[p.active] = w
        G, h, _ = relu_cell(layer, p.active)
        v = bottom_eigvec(f, p.active) if p.active else u
        pr = _in_cell_pair(G, h, w, v, dom)
        if pr is not None:
            pairs.append(pr)
    ws = list(wit.values())
    for a, b in itertools.islice(itertools.combinations(range(len(ws)), 2), 400):
        pairs.append((ws[a], ws[b]))
    notes = list(rep.patterns.notes)
    worst = wit.get(rep.worst_pattern.active)
    if worst is not None:
        scale = max(_room(*relu_cell(layer, rep.worst_pattern.active)[:2], worst), 1e-3)
        for g in rng.standard_normal((64, f.n)):
            g *= 2.0 * scale / np.linalg.norm(g)
            pairs.append(tuple(dom.project(np.vstack([worst + g, worst - g]))))
    else:
        notes.append("worst activation cell not reached inside the sampling box")
    if rep.injective:
        lo, hi = relu_lipschitz_bounds(rep)
    else:
        lo, hi = 0.0, None
        notes.append("layer is not injective; no positive lower bound")
    return lo, hi, pairs, notes


def _sat_seed(op, dom, cfg, rng):
    from .saturation import sat_cell, sat_injectivity, sat_lipschitz_bounds

    f = op.frame
    rep = sat_injectivity(op, cfg)
    pairs, ws = [], []
    for p in rep.patterns:
        w = np.array(p.witness, dtype=float)
        if not dom.contains(w)[0]:
            continue
        ws.append(w)
        pairs.append((w, -w))
        if p.lin_mask:
            G, h, _ = sat_cell(op, p.state)
            v = bottom_eigvec(f, p.lin_mask)
            pr = _in_cell_pair(G, h, w, v, dom, extra_room=1.0 - np.linalg.norm(w))
            if pr is not None:
                pairs.append(pr)
    for a, b in itertools.islice(itertools.combinations(range(len(ws)), 2), 400):
        pairs.append((ws[a], ws[b]))
    notes = list(rep.patterns.notes)
    if rep.injective:
        lo, hi = sat_lipschitz_bounds(rep)
        if f.m == f.n + 1:
            lo = max(lo, 0.5 * hi)
    else:
        lo, hi = 0.0, None
        notes.append("saturation operator is not injective on the ball")
    return lo, hi, pairs, notes


def _pr_seed(op, dom, cfg, rng):
    from .phase import a_abs, complement_property, pr_lipschitz_bounds

    f = op.frame
    cp = complement_property(f, cfg)
    full = full_mask(f.m)
    splits = [cp.worst_subset]
    if f.m <= 10:
        splits += [1 | (r << 1) for r in range(1 << (f.m - 1))]
    pairs = []
    for J in dict.fromkeys(splits):
        u = bottom_eigvec(f, J)
        v = bottom_eigvec(f, full ^ J)
        pairs.append((u + v, u - v))
    notes = []
    if cp.holds:
        b = pr_lipschitz_bounds(f, cfg, cp=cp, aa=a_abs(f, cfg))
        lo, hi = b.improved
    else:
        lo, hi = 0.0, None
        notes.append("complement property fails; intensity map is not injective")
    return lo, hi, pairs, notes


def _linear_seed(op, dom, cfg, rng):
    fb = frame_bounds(op.frame)
    u = bottom_eigvec(op.frame)
    return float(np.sqrt(fb.lower)), float(np.sqrt(fb.upper)), [(u, np.zeros_like(u))], []


def _seed(op, dom, cfg, rng):
    kind = op.kind
    if kind == "relu":
        return _relu_seed(op, dom, cfg, rng)
    if kind == "sat":
        return _sat_seed(op, dom, cfg, rng)
    if kind == "pr":
        return _pr_seed(op, dom, cfg, rng)
    if kind == "linear":
        return _linear_seed(op, dom, cfg, rng)
    return None, None, [], ["no closed-form Lipschitz bounds for this operator"]


# ---------------------------------------------------------------- search


@dataclass
class LipschitzReport:
    kappa_hat: float
    witness_pair: tuple
    theoretical_lower: float | None
    theoretical_upper: float | None
    samples_used: int
    refinement_steps: int
    injected_pairs: int = 0
    domain: str = "box"
    refine_trace: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    config: AnalysisConfig | None = None

    def consistent(self, upper_tol: float = 1e-6) -> bool:
        """Sampled value inside the closed-form sandwich (up to tolerances)."""
        tol = (self.config or resolve(None)).cert_tol
        ok = True
        if self.theoretical_lower is not None:
            ok &= self.kappa_hat >= self.theoretical_lower - tol
        if self.theoretical_upper is not None:
            ok &= self.kappa_hat <= self.theoretical_upper + upper_tol
        return bool(ok)


def _sample_job(op, dom, cfg, keep, want_rows):
    def job(rng, k):
        X = dom.sample(rng, k)
        half = k // 2
        # local pairs: small log-uniform offsets around X
        scale = 10.0 ** rng.uniform(-4.0, 0.0, size=(half, 1))
        Yl = dom.canonical(dom.project(X[:half] + scale * rng.standard_normal((half, dom.n))))
        Yf = dom.sample(rng, k - half)
        Y = np.vstack([Yl, Yf])
        r, d = _ratios(op, dom, X, Y)
        ok = d >= cfg.min_pair_dist
        r = np.where(ok, r, np.inf)
        top = np.argsort(r, kind="stable")[:keep]
        best = [(float(r[i]), X[i], Y[i]) for i in top if np.isfinite(r[i])]
        rows = (r[ok], d[ok]) if want_rows else None
        return best, rows

    return job


# relative gap below which two ratios are treated as the same value
_TIE = 1e-12


def _refine(op, dom, x, y, cfg):
    n = dom.n
    z = np.concatenate([x, y])
    cur = float(_ratios(op, dom, z[None, :n], z[None, n:])[0][0])
    step = 0.1 * max(1.0, float(np.max(np.abs(z))))
    E = np.vstack([np.eye(2 * n), -np.eye(2 * n)])
    trace = [cur]
    iters = 0
    while step >= cfg.refine_min_step and iters < cfg.refine_cap:
        iters += 1
        Z = z + step * E
        X = dom.project(Z[:, :n])
        Y = dom.project(Z[:, n:])
        r, d = _ratios(op, dom, X, Y)
        r = np.where(d >= cfg.min_pair_dist, r, np.inf)
        k = int(np.argmin(r))
        if r[k] < cur * (1 - _TIE):
            cur = float(r[k])
            z = np.concatenate([X[k], Y[k]])
        else:
            step *= 0.5
        trace.append(cur)
    return z[:n], z[n:], cur, iters, trace


def estimate_kappa(
    op,
    domain: str | None = None,
    cfg: AnalysisConfig | None = None,
    budget: int | None = None,
    seed: int | None = None,
    bounds: tuple | None = None,
    csv_path=None,
) -> LipschitzReport:
    """Smallest observed Lipschitz ratio of ``op`` over its domain.

    Parameters
    ----------
    op : ReluLayer, SatOperator, IntensityOperator, GateOperator or Frame
        A bare ``Frame`` stands for its (linear) analysis operator.
    domain : {"box", "ball", "ball-complement", "quotient"}, optional
        Defaults to the operator's natural domain.
    budget : int, optional
        Random pairs to draw (default ``cfg.kappa_budget``, at least 1000).
    bounds : (lower, upper), optional
        Closed-form sandwich to report; computed from the operator otherwise.
    csv_path : path, optional
        Write every sampled ``ratio,dist`` row there.

    Notes
    -----
    Sampling runs in seeded chunks (one substream per chunk), so the result
    is the same for any worker count.  The best ``cfg.refine_top`` pairs are
    then polished by coordinate descent with step halving.
    """
    cfg = resolve(cfg)
    op = _as_operator(op)
    dom = make_domain(op, domain, cfg)
    budget = cfg.kappa_budget if budget is None else int(budget)
    if budget < 1000:
        raise ValueError("budget must be at least 1000 pairs")
    seed = cfg.seed if seed is None else int(seed)
    seed_seq = np.random.SeedSequence(seed)
    inj_seq, smp_seq = seed_seq.spawn(2)
    rng = np.random.default_rng(inj_seq)

    lo, hi, injected, notes = _seed(op, dom, cfg, rng)
    if bounds is not None:
        lo, hi = bounds

    keep = max(cfg.refine_top, 1)
    job = _sample_job(op, dom, cfg, keep, csv_path is not None)
    smp_seed = int(smp_seq.generate_state(1, np.uint64)[0])
    parts = _chunked(budget, smp_seed, cfg.chunk_size, job)

    pool = []
    for x, y in injected:
        x = dom.canonical(np.asarray(x, dtype=float)[None])[0]
        y = dom.canonical(np.asarray(y, dtype=float)[None])[0]
        r, d = _ratios(op, dom, x[None], y[None])
        if d[0] > 0 and dom.contains(np.vstack([x, y])).all():
            pool.append((float(r[0]), x, y))
    n_injected = len(pool)
    for best, _ in parts:
        pool.extend(best)
    if not pool:
        raise RuntimeError("no valid pair found; increase the budget")
    # ratios within _TIE of the minimum count as equal; earlier (injected) pairs win
    r_min = min(t[0] for t in pool)
    pool.sort(key=lambda t: max(t[0], r_min * (1 + _TIE)))

    best = pool[0]
    total_steps, trace = 0, [best[0]]
    for r0, x, y in pool[:keep]:
        xr, yr, r, steps, tr = _refine(op, dom, x, y, cfg)
        total_steps += steps
        if r < best[0] * (1 - _TIE):
            best = (r, xr, yr)
        trace.append(best[0])

    r_final, x_star, y_star = best
    # recompute from the stored pair so the report is self-consistent
    r_final = float(_ratios(op, dom, x_star[None], y_star[None])[0][0])

    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["ratio", "dist"])
            for _, rows in parts:
                for a, b in zip(*rows):
                    w.writerow([format(float(a), ".17g"), format(float(b), ".17g")])

    return LipschitzReport(
        kappa_hat=r_final,
        witness_pair=(x_star, y_star),
        theoretical_lower=lo,
        theoretical_upper=hi,
        samples_used=budget,
        refinement_steps=total_steps,
        injected_pairs=n_injected,
        domain=dom.name,
        refine_trace=trace,
        notes=notes,
        config=cfg,
    )


# ---------------------------------------------------------------- open-problem sweeps


@dataclass
class SweepResult:
    kind: str
    family: str
    header: list
    rows: list
    skipped: int


SWEEP_HEADER = ["trial", "seed", "n", "m", "a_const", "lambda", "kappa_hat", "bound", "ratio_to_bound"]


def sweep_open_problem(
    kind: str,
    trials: int,
    seed: int = 0,
    family: str = "doubled",
    cfg: AnalysisConfig | None = None,
    budget: int = 5000,
    max_draws: int | None = None,
) -> SweepResult:
    """Collect (constant, kappa_hat) rows for the two open sandwich constants.

    ``kind="relu-K"`` draws zero-bias ReLU layers (``family="doubled"``: a
    random frame and its negatives; ``"random"``: 2n to 3n random vectors)
    and reports kappa_hat / (sqrt(A_alpha) / 2).  ``kind="sat-f"`` draws
    random frames with a random level in [0.3, 1] and reports kappa_hat
    against min(sqrt(A_lambda) / 2, level).  Non-injective draws are skipped
    and counted.
    """
    from .relu import ReluLayer, relu_injectivity
    from .saturation import SatOperator, sat_injectivity

    cfg = resolve(cfg)
    if kind not in ("relu-K", "sat-f"):
        raise ValueError(f"unknown sweep kind {kind!r}")
    if family not in ("doubled", "random"):
        raise ValueError(f"unknown family {family!r}")
    rng = np.random.default_rng(seed)
    max_draws = 50 * max(trials, 1) if max_draws is None else max_draws
    rows, skipped, draws = [], 0, 0
    while len(rows) < trials and draws < max_draws:
        draws += 1
        s = int(rng.integers(2**31))
        n = int(rng.integers(2, 4))
        if kind == "relu-K":
            if family == "doubled":
                f = make_doubled(make_random(n, int(rng.integers(n, 2 * n + 1)), seed=s))
            else:
                f = make_random(n, int(rng.integers(2 * n, 3 * n + 1)), seed=s)
            op = ReluLayer(f)
            rep = relu_injectivity(op, cfg)
            if not rep.injective:
                skipped += 1
                continue
            a, lam = rep.a_alpha, None
            bound = 0.5 * np.sqrt(a)
        else:
            f = make_random(n, int(rng.integers(n + 1, 2 * n + 2)), seed=s)
            lam = float(rng.uniform(0.3, 1.0))
            op = SatOperator(f, lam)
            rep = sat_injectivity(op, cfg)
            if not rep.injective:
                skipped += 1
                continue
            a = rep.a_lambda
            bound = min(0.5 * np.sqrt(a), lam)
        est = estimate_kappa(op, cfg=cfg, budget=budget, seed=s)
        rows.append([len(rows), s, f.n, f.m, a, lam, est.kappa_hat, bound, est.kappa_hat / bound])
    return SweepResult(kind, family, list(SWEEP_HEADER), rows, skipped)


def write_sweep_csv(result: SweepResult, path) -> None:
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, (float, np.floating)):
            return format(float(v), ".17g")
        return str(v)

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(result.header)
        for row in result.rows:
            w.writerow([fmt(v) for v in row])
