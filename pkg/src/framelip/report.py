"""JSON reports: schema-versioned, 17-digit floats, stable key order."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .config import AnalysisConfig, resolve

SCHEMA = 1

# Tags naming the result that justifies each reported number.
REFS = {
    "frame_bounds": "frame-bounds:extreme-eigenvalues",
    "relu_injective": "relu:injective-iff-active-frames",
    "a_alpha": "relu:a-alpha-min-over-patterns",
    "relu_bounds": "relu:lipschitz-sandwich-half-sqrt-a",
    "doubled_kappa": "relu:doubled-frame-exact-sqrt-a-over-2",
    "sat_injective": "sat:injective-iff-unsaturated-frames",
    "a_lambda": "sat:a-lambda-min-over-patterns",
    "sat_bounds": "sat:lipschitz-sandwich-min-half-sqrt-a-lambda",
    "sat_nplus1_bounds": "sat:n-plus-one-level-free-sandwich",
    "lambda_c": "sat:critical-level-stability",
    "complement_property": "pr:complement-property",
    "sigma_sq": "pr:sigma-strong-complement",
    "a_abs": "pr:a-abs-between-sigma-sq-and-twice",
    "pr_bounds": "pr:improved-sandwich",
    "gate_verdict": "gate:injective-iff-gated-frames",
    "kappa_hat": "empirical:witnessed-ratio",
    "sweep": "empirical:open-constant-sweep",
}


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    return s if ("." in s or "e" in s) else s + ".0"


def dumps(obj, indent: int = 2) -> str:
    """Serialise to JSON with every float written to 17 significant digits.

    Non-finite floats become ``null``.  NumPy scalars and arrays are
    converted on the fly; dict insertion order is kept.
    """

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, np.ndarray):
            o = o.tolist()
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            flat = all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in o)
            if flat:
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return enc(obj, 0) + "\n"


def digest_file(path) -> str | None:
    if path is None:
        return None
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def build_report(
    command: str,
    result: dict,
    refs: list[str],
    cfg: AnalysisConfig | None = None,
    input_path=None,
    warnings: list[str] | None = None,
    args: dict | None = None,
) -> dict:
    """Assemble the schema-1 report; ``refs`` are keys of :data:`REFS`."""
    cfg = resolve(cfg)
    out = {
        "schema": SCHEMA,
        "command": command,
        "input_digest": digest_file(input_path),
        "arguments": args or {},
        "config": cfg.as_dict(),
        "result": result,
        "refs": {k: REFS[k] for k in refs},
        "warnings": list(dict.fromkeys(warnings or [])),
    }
    return out


def write_report(report: dict, path) -> None:
    Path(path).write_text(dumps(report))
