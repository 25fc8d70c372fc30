"""Command-line front end.

Each analysis command prints a short summary to stdout and, with
``--json OUT``, writes the full schema-1 report.  Exit codes: 0 success or
injective, 3 not injective, 4 inconclusive, 2 usage or input errors,
1 anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import AnalysisConfig
from .errors import FrameError, FramelipError, IterationLimit, NoConvergence, NotInjective
from .frames import (
    Frame,
    frame_bounds,
    load_frame,
    make_doubled,
    make_mercedes_benz,
    make_random,
    make_simplex_funtf,
    make_standard_basis,
    mask_indices,
    save_frame,
)
from .report import build_report, write_report

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_NOT_INJECTIVE, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------- helpers


def _config(args) -> AnalysisConfig:
    cfg = AnalysisConfig()
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
            cfg = cfg.replace(**data)
        except (OSError, ValueError, TypeError) as exc:
            raise UsageError(f"bad --config file: {exc}") from None
    return cfg


def _frame(path) -> Frame:
    try:
        return load_frame(path)
    except OSError as exc:
        raise UsageError(f"cannot read frame file: {exc}") from None
    except (ValueError, FrameError) as exc:
        raise UsageError(f"cannot parse frame file {path}: {exc}") from None


def _bias(spec: str, m: int) -> np.ndarray:
    if spec == "zeros":
        return np.zeros(m)
    try:
        text = Path(spec).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read bias file: {exc}") from None
    try:
        if Path(spec).suffix.lower() == ".json":
            data = json.loads(text)
            vals = data["bias"] if isinstance(data, dict) else data
        else:
            vals = [float(t) for t in text.replace(",", " ").split()]
        b = np.array(vals, dtype=float).ravel()
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot parse bias file {spec}: {exc}") from None
    if b.shape != (m,):
        raise UsageError(f"bias has {b.size} entries, frame has m={m}")
    return b


def _emit(args, command, result, refs, cfg, warnings=(), input_path=None, arguments=None):
    report = build_report(
        command, result, refs, cfg=cfg, input_path=input_path, warnings=list(warnings), args=arguments
    )
    if getattr(args, "json", None):
        write_report(report, args.json)
    return report


def _pattern_info(p, m, enc=None):
    if p is None:
        return None
    return {"encoding": enc or p.encode(), "witness": np.asarray(p.witness)}


def _check_positive(name, v):
    if not (np.isfinite(v) and v > 0):
        raise UsageError(f"{name} must be positive, got {v}")


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    kind = args.kind
    n = args.n
    if kind == "mb":
        f = make_mercedes_benz()
    elif kind == "basis":
        f = make_standard_basis(n or 2)
    elif kind == "doubled":
        base = make_standard_basis(n or 2) if args.m is None else make_random(n or 2, args.m, seed=args.seed)
        f = make_doubled(base)
    elif kind == "random":
        if n is None or args.m is None:
            raise UsageError("--kind random needs --n and --m")
        f = make_random(n, args.m, seed=args.seed)
    else:
        f = make_simplex_funtf(n or 2)
    save_frame(f, args.out)
    fb = frame_bounds(f)
    print(f"wrote {kind} frame: m={f.m} vectors in R^{f.n}, frame bounds ({fb.lower:.6g}, {fb.upper:.6g})")
    _emit(
        args,
        "gen",
        {"kind": kind, "n": f.n, "m": f.m, "frame_bounds": list(fb), "tight": bool(fb.upper - fb.lower <= 1e-9)},
        ["frame_bounds"],
        AnalysisConfig(),
        input_path=args.out,
        arguments={"kind": kind, "n": args.n, "m": args.m, "seed": args.seed},
    )
    return EXIT_OK


def cmd_analyze_relu(args) -> int:
    from .relu import ReluLayer, relu_injectivity, relu_lipschitz_bounds

    cfg = _config(args)
    f = _frame(args.frame)
    layer = ReluLayer(f, _bias(args.bias, f.m))
    rep = relu_injectivity(layer, cfg)
    result = {
        "injective": rep.injective,
        "a_alpha": rep.a_alpha,
        "bounds": list(relu_lipschitz_bounds(rep)) if rep.injective else None,
        "frame_bounds": list(frame_bounds(f)),
        "worst_pattern": _pattern_info(rep.worst_pattern, f.m),
        "failing_pattern": _pattern_info(rep.failing_pattern, f.m),
        "failing_active_indices": None
        if rep.failing_pattern is None
        else [i + 1 for i in mask_indices(rep.failing_pattern.active, f.m)],
        "pattern_count": len(rep.patterns),
        "patterns": rep.patterns.encodings(),
        "method": rep.method,
    }
    verdict = "injective" if rep.injective else "not injective"
    print(f"relu layer on m={f.m}, n={f.n}: {verdict}, A_alpha = {rep.a_alpha:.10g}")
    if rep.injective:
        print(f"  lower Lipschitz bound in [{result['bounds'][0]:.10g}, {result['bounds'][1]:.10g}]")
    else:
        print(f"  failing activation pattern '{rep.failing_pattern.encode()}'")
    _emit(
        args, "analyze-relu", result, ["frame_bounds", "relu_injective", "a_alpha", "relu_bounds"], cfg,
        warnings=rep.patterns.notes, input_path=args.frame, arguments={"bias": args.bias},
    )
    return EXIT_OK if rep.injective else EXIT_NOT_INJECTIVE


def cmd_analyze_sat(args) -> int:
    from .saturation import SatOperator, sat_injectivity, sat_lipschitz_bounds, sat_lipschitz_bounds_nplus1

    cfg = _config(args)
    f = _frame(args.frame)
    _check_positive("--lambda", args.lam)
    rep = sat_injectivity(SatOperator(f, args.lam), cfg)
    result = {
        "injective": rep.injective,
        "lambda": args.lam,
        "a_lambda": rep.a_lambda,
        "bounds": list(sat_lipschitz_bounds(rep)) if rep.injective else None,
        "nplus1_bounds": list(sat_lipschitz_bounds_nplus1(rep)) if rep.injective and f.m == f.n + 1 else None,
        "worst_pattern": _pattern_info(rep.worst_pattern, f.m),
        "failing_pattern": _pattern_info(rep.failing_pattern, f.m),
        "pattern_count": len(rep.patterns),
        "patterns": rep.patterns.encodings(),
        "method": rep.method,
    }
    refs = ["sat_injective", "a_lambda", "sat_bounds"] + (["sat_nplus1_bounds"] if result["nplus1_bounds"] else [])
    verdict = "injective" if rep.injective else "not injective"
    print(f"saturation at level {args.lam:g} on m={f.m}, n={f.n}: {verdict}, A_lambda = {rep.a_lambda:.10g}")
    if not rep.injective:
        print(f"  failing saturation pattern '{rep.failing_pattern.encode()}'")
    _emit(
        args, "analyze-sat", result, refs, cfg,
        warnings=rep.patterns.notes, input_path=args.frame, arguments={"lambda": args.lam},
    )
    return EXIT_OK if rep.injective else EXIT_NOT_INJECTIVE


def cmd_analyze_pr(args) -> int:
    from .phase import a_abs, complement_property, pr_lipschitz_bounds

    cfg = _config(args)
    f = _frame(args.frame)
    cp = complement_property(f, cfg)
    result = {
        "holds": cp.holds,
        "failing_subset": None if cp.holds else [i + 1 for i in mask_indices(cp.failing_subset, f.m)],
        "sigma_sq": cp.sigma_sq,
        "worst_subset": [i + 1 for i in mask_indices(cp.worst_subset, f.m)],
    }
    refs = ["complement_property", "sigma_sq"]
    if cp.holds:
        aa = a_abs(f, cfg)
        b = pr_lipschitz_bounds(f, cfg, cp=cp, aa=aa)
        result.update(
            a_abs=aa.a_abs,
            a_abs_over_sigma_sq=aa.a_abs / cp.sigma_sq,
            worst_product_pattern=aa.encode(),
            chamber_count=aa.chamber_count,
            bounds_sigma=list(b.bandeira),
            bounds_a_abs=list(b.a_form),
            bounds_improved=list(b.improved),
        )
        refs += ["a_abs", "pr_bounds"]
        print(f"phase retrieval on m={f.m}, n={f.n}: complement property holds")
        print(f"  sigma^2 = {cp.sigma_sq:.10g}, A_abs = {aa.a_abs:.10g}")
    else:
        print(f"phase retrieval on m={f.m}, n={f.n}: complement property fails at J = {result['failing_subset']}")
    _emit(args, "analyze-pr", result, refs, cfg, input_path=args.frame)
    return EXIT_OK if cp.holds else EXIT_NOT_INJECTIVE


def cmd_analyze_gate(args) -> int:
    from .gating import GateOperator, gate_injectivity

    cfg = _config(args)
    f = _frame(args.frame)
    _check_positive("--mu", args.mu)
    rep = gate_injectivity(GateOperator(f, args.mu), cfg)
    result = {
        "verdict": rep.verdict,
        "injective": rep.injective,
        "mu": args.mu,
        "failing_pattern": None
        if rep.failing_pattern is None
        else {"encoding": rep.failing_pattern.encode(), "witness": rep.failing_witness},
        "inconclusive_patterns": [p.encode() for p in rep.inconclusive_patterns],
        "pattern_count": len(rep.patterns),
    }
    print(f"gating at threshold {args.mu:g} on m={f.m}, n={f.n}: {rep.verdict}")
    _emit(
        args, "analyze-gate", result, ["gate_verdict"], cfg,
        warnings=rep.notes, input_path=args.frame, arguments={"mu": args.mu},
    )
    return {"injective": EXIT_OK, "not-injective": EXIT_NOT_INJECTIVE}.get(rep.verdict, EXIT_INCONCLUSIVE)


def cmd_critical_lambda(args) -> int:
    from .saturation import critical_lambda

    cfg = _config(args)
    f = _frame(args.frame)
    tol = cfg.lambda_tol if args.tol is None else args.tol
    _check_positive("--tol", tol)
    res = critical_lambda(f, cfg, tol=tol)
    result = {
        "lambda_c": res.value,
        "bracket": list(res.bracket),
        "iterations": res.iterations,
        "history": [list(h) for h in res.history],
        "validation": res.validation,
    }
    print(f"critical saturation level lambda_c = {res.value:.7f} (bracket width {res.bracket[1] - res.bracket[0]:.2e})")
    warn = [] if res.validation["consistent"] else ["injectivity around lambda_c is not monotone at probe offset"]
    _emit(args, "critical-lambda", result, ["lambda_c"], cfg, warnings=warn, input_path=args.frame,
          arguments={"tol": tol})
    return EXIT_OK


def cmd_estimate_kappa(args) -> int:
    from .gating import GateOperator
    from .lipschitz import estimate_kappa
    from .phase import IntensityOperator
    from .relu import ReluLayer
    from .saturation import SatOperator

    cfg = _config(args)
    f = _frame(args.frame)
    arguments = {"op": args.op, "budget": args.budget, "seed": args.seed}
    if args.op == "relu":
        op = ReluLayer(f, _bias(args.bias, f.m))
        arguments["bias"] = args.bias
    elif args.op == "sat":
        if args.lam is None:
            raise UsageError("--op sat needs --lambda")
        _check_positive("--lambda", args.lam)
        op = SatOperator(f, args.lam)
        arguments["lambda"] = args.lam
    elif args.op == "pr":
        op = IntensityOperator(f)
    else:
        if args.mu is None:
            raise UsageError("--op gate needs --mu")
        _check_positive("--mu", args.mu)
        op = GateOperator(f, args.mu)
        arguments["mu"] = args.mu
    if args.budget is not None and args.budget < 1000:
        raise UsageError("--budget must be at least 1000")
    rep = estimate_kappa(op, cfg=cfg, budget=args.budget, seed=args.seed, csv_path=args.csv)
    result = {
        "kappa_hat": rep.kappa_hat,
        "witness_pair": [rep.witness_pair[0], rep.witness_pair[1]],
        "theoretical_lower": rep.theoretical_lower,
        "theoretical_upper": rep.theoretical_upper,
        "consistent": rep.consistent(),
        "domain": rep.domain,
        "samples_used": rep.samples_used,
        "injected_pairs": rep.injected_pairs,
        "refinement_steps": rep.refinement_steps,
    }
    print(f"kappa_hat = {rep.kappa_hat:.5f} over {rep.samples_used} sampled pairs ({rep.domain} domain)")
    if rep.theoretical_lower is not None:
        hi = "n/a" if rep.theoretical_upper is None else f"{rep.theoretical_upper:.5f}"
        print(f"  closed-form sandwich [{rep.theoretical_lower:.5f}, {hi}]")
    refs = {"relu": ["relu_bounds"], "sat": ["sat_bounds"], "pr": ["pr_bounds"], "gate": []}[args.op]
    _emit(args, "estimate-kappa", result, ["kappa_hat"] + refs, cfg, warnings=rep.notes,
          input_path=args.frame, arguments=arguments)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .lipschitz import sweep_open_problem, write_sweep_csv

    cfg = _config(args)
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    res = sweep_open_problem(args.problem, args.trials, seed=args.seed, family=args.family, cfg=cfg,
                             budget=args.budget)
    if args.csv:
        write_sweep_csv(res, args.csv)
    ratios = [r[-1] for r in res.rows]
    print(f"{args.problem} sweep ({args.family}): {len(res.rows)} rows, {res.skipped} non-injective draws skipped")
    if ratios:
        print(f"  kappa_hat / bound in [{min(ratios):.6f}, {max(ratios):.6f}]")
    result = {
        "problem": args.problem,
        "family": args.family,
        "rows": len(res.rows),
        "skipped": res.skipped,
        "ratio_min": min(ratios) if ratios else None,
        "ratio_max": max(ratios) if ratios else None,
        "header": res.header,
        "table": res.rows,
    }
    _emit(args, "sweep", result, ["sweep"], cfg,
          arguments={"problem": args.problem, "trials": args.trials, "seed": args.seed,
                     "family": args.family, "budget": args.budget})
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="framelip", description="Injectivity and Lipschitz analysis of non-linear frame measurements.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, frame=True):
        if frame:
            sp.add_argument("frame", help="frame file (.json or .csv)")
        sp.add_argument("--json", metavar="OUT", help="write the JSON report here")
        sp.add_argument("--config", metavar="PATH", help="JSON object of AnalysisConfig overrides")

    g = sub.add_parser("gen", help="write a frame file")
    g.add_argument("--kind", required=True, choices=["mb", "basis", "doubled", "random", "simplex-funtf"])
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, metavar="PATH")
    g.add_argument("--json", metavar="OUT")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("analyze-relu", help="ReLU layer injectivity and bounds")
    common(s)
    s.add_argument("--bias", default="zeros", metavar="PATH|zeros")
    s.set_defaults(func=cmd_analyze_relu)

    s = sub.add_parser("analyze-sat", help="saturation injectivity and bounds on the unit ball")
    common(s)
    s.add_argument("--lambda", dest="lam", type=float, required=True, metavar="L")
    s.set_defaults(func=cmd_analyze_sat)

    s = sub.add_parser("analyze-pr", help="phase retrieval: complement property, sigma^2, A_abs")
    common(s)
    s.set_defaults(func=cmd_analyze_pr)

    s = sub.add_parser("analyze-gate", help="gated measurements outside the unit ball")
    common(s)
    s.add_argument("--mu", type=float, required=True, metavar="M")
    s.set_defaults(func=cmd_analyze_gate)

    s = sub.add_parser("critical-lambda", help="smallest saturation level giving injectivity")
    common(s)
    s.add_argument("--tol", type=float, metavar="T")
    s.set_defaults(func=cmd_critical_lambda)

    s = sub.add_parser("estimate-kappa", help="empirical lower Lipschitz constant")
    common(s)
    s.add_argument("--op", required=True, choices=["relu", "sat", "pr", "gate"])
    s.add_argument("--lambda", dest="lam", type=float, metavar="L")
    s.add_argument("--bias", default="zeros", metavar="PATH|zeros")
    s.add_argument("--mu", type=float, metavar="M")
    s.add_argument("--budget", type=int, metavar="N")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", metavar="OUT", help="write every sampled ratio,dist row")
    s.set_defaults(func=cmd_estimate_kappa)

    s = sub.add_parser("sweep", help="empirical sweeps for the open sandwich constants")
    common(s, frame=False)
    s.add_argument("--problem", required=True, choices=["relu-K", "sat-f"])
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--family", choices=["doubled", "random"], default="doubled")
    s.add_argument("--budget", type=int, default=5000)
    s.add_argument("--csv", metavar="OUT")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"framelip: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotInjective as exc:
        print(f"framelip: {exc}", file=sys.stderr)
        return EXIT_NOT_INJECTIVE
    except (NoConvergence, IterationLimit) as exc:
        print(f"framelip: numerical failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (FramelipError, ValueError) as exc:
        print(f"framelip: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - last resort
        print(f"framelip: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
