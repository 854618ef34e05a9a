"""Command-line front end.

Every command prints one JSON document (``star`` writes grid CSV instead).
Exit status: 0 on success, 2 on invalid input, 3 when a numerical gate fails.
Errors are printed as ``{"error": {"type": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
import json
import math
import os
from pathlib import Path
import sys
import warnings

import numpy as np

from .errors import (
    IncompatibleAlgebraError,
    NumericalGateError,
    TruncationError,
    ValidationError,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_GATE = 3

COMMANDS = (
    "normal-form",
    "heat-trace",
    "star",
    "compose",
    "index-bott",
    "cocycle-constants",
    "verify-suite",
)


# --- JSON with 17 significant digits -------------------------------------------


def _encode(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return json.dumps(str(x))
        text = format(x, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj) + "\n"


# --- configuration ----------------------------------------------------------------


@dataclass
class RunConfig:
    """Validated parameters of one CLI invocation."""

    command: str
    params: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "json"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise ValidationError("format must be json or csv")
        if self.format == "csv" and self.command != "star":
            raise ValidationError("csv output is only available for star")
        for key in ("nmax", "cutoff", "matrix_cutoff", "grid_points", "order"):
            v = self.params.get(key)
            if v is not None and (not isinstance(v, int) or v <= 0):
                raise ValidationError(f"{key} must be a positive integer")
        tol = self.params.get("tol")
        if tol is not None and not 0 < tol < 1:
            raise ValidationError("tolerances must lie in (0, 1)")
        for key in ("theta_file", "theta_prime_file", "f", "g", "config"):
            v = self.params.get(key)
            if v is not None and not Path(v).is_file():
                raise ValidationError(f"file not found: {v}")
        return self


# --- commands ---------------------------------------------------------------------


def _skew_or_zero(path, like_dim=None):
    from .skew import SkewMatrix, load_matrix

    if path is None:
        if like_dim is None:
            raise ValidationError("a theta file is required")
        return SkewMatrix.zeros(like_dim)
    return load_matrix(path)


def cmd_normal_form(p: dict) -> tuple:
    from .skew import standard_form

    theta = _skew_or_zero(p["theta_file"])
    nf = standard_form(theta)
    out = nf.to_json()
    out["residual"] = nf.residual(theta.entries)
    return out, EXIT_OK


def cmd_heat_trace(p: dict) -> tuple:
    from .fock import FockRep, heat_trace_closed, heat_trace_numeric

    theta = _skew_or_zero(p["theta_file"])
    t = p["t"]
    if not t > 0:
        raise ValidationError("t must be positive")
    rep = FockRep(theta, p["nmax"], p.get("grid_points") or 48)
    num = heat_trace_numeric(rep, t)
    out = {"closed": heat_trace_closed(theta, t), "numeric": num.value, "tail_bound": num.tail_bound}
    code = EXIT_OK
    tol = p.get("tol")
    if tol is not None:
        out["tail_warning"] = num.tail_bound > tol
        if abs(out["closed"] - out["numeric"]) > max(tol, num.tail_bound):
            code = EXIT_GATE
    return out, code


def cmd_star(p: dict) -> tuple:
    from .moyal import AliasingWarning, read_grid_csv, star, write_grid_csv

    f, g = read_grid_csv(p["f"]), read_grid_csv(p["g"])
    theta = _skew_or_zero(p.get("theta_file"), f.d)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AliasingWarning)
        h = star(f, g, theta)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return write_grid_csv(h), EXIT_OK


def cmd_compose(p: dict) -> tuple:
    from .symbols import compose, quantize, verify_composition
    from .weyl import SYMBOL, WeylAlgebra, bidegree, weyl_mul
    from .weyl_io import element_to_json, parse_element

    theta = _skew_or_zero(p.get("theta_file"), p.get("d") or 1)
    theta_prime = _skew_or_zero(p.get("theta_prime_file"), theta.dim)
    alg = WeylAlgebra(theta, theta_prime, kind=SYMBOL, exact=p.get("exact", False))
    a = parse_element(p["a"], alg)
    b = parse_element(p["b"], alg)
    deg = bidegree(a).deg_xi
    order = p.get("order")
    N = order if order is not None else (0 if deg == float("-inf") else int(deg))
    c = compose(a, b, N).total()
    ok, residual = verify_composition(a, b)
    # the residual of the requested truncation, which is 0 once N >= deg_xi(a)
    diff = quantize(c) - weyl_mul(quantize(a), quantize(b))
    out = {
        "c": str(c),
        "order": N,
        "terms": element_to_json(c)["terms"],
        "residual": diff.max_abs_coeff(),
        "verified": bool(ok),
        "exact": alg.exact,
    }
    return out, EXIT_OK if ok else EXIT_GATE


def cmd_index_bott(p: dict) -> tuple:
    from .index import bott_index

    r = bott_index(
        p["theta"], p["theta_prime"], p["cutoff"], p.get("method") or "both", p.get("matrix_cutoff")
    )
    return r.to_json(), EXIT_OK


def cmd_cocycle_constants(p: dict) -> tuple:
    from .index import cocycle_constants

    k_text = p.get("k") or ""
    try:
        k = [int(v) for v in k_text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"--k must be a comma-separated list of integers: {exc}") from exc
    return cocycle_constants(p["m"], k).to_json(), EXIT_OK


def _load_suite_config(path) -> dict:
    text = Path(path).read_text().strip()
    if not text:
        raise ValidationError("empty config")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or not cfg:
        raise ValidationError("empty config")
    unknown = set(cfg) - {"seed", "criteria"}
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def cmd_verify_suite(p: dict) -> tuple:
    from .verify import CRITERIA, run_suite

    seed = p.get("seed", 0)
    which = None
    if p.get("config"):
        cfg = _load_suite_config(p["config"])
        seed = cfg.get("seed", seed)
        which = cfg.get("criteria")
    if not isinstance(seed, int) or seed < 0:
        raise ValidationError("seed must be a non-negative integer")
    if which is not None:
        if not isinstance(which, list) or not which or any(w not in CRITERIA for w in which):
            raise ValidationError(f"criteria must be a non-empty list drawn from {sorted(CRITERIA)}")
    results = run_suite(seed, which)
    for r in results:
        print(r.line(), file=sys.stderr)
    out = {
        "seed": seed,
        "passed": all(r.passed for r in results),
        "criteria": [r.to_json(p.get("timings", False)) for r in results],
    }
    return out, EXIT_OK if out["passed"] else EXIT_GATE


HANDLERS = {
    "normal-form": cmd_normal_form,
    "heat-trace": cmd_heat_trace,
    "star": cmd_star,
    "compose": cmd_compose,
    "index-bott": cmd_index_bott,
    "cocycle-constants": cmd_cocycle_constants,
    "verify-suite": cmd_verify_suite,
}


def run(config: RunConfig, stdout=None) -> int:
    """Execute a validated config, write its artifact and return the exit status."""
    stdout = stdout or sys.stdout
    try:
        config.validate()
        result, code = HANDLERS[config.command](config.params)
    except (ValidationError, IncompatibleAlgebraError) as exc:
        stdout.write(dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_INVALID
    except (NumericalGateError, TruncationError) as exc:
        stdout.write(dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_GATE
    text = result if isinstance(result, str) else dumps(result)
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        stdout.write(text)
    return code


# --- argument parsing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ncgeo", description="Computations on quantum Euclidean spaces.")
    parser.add_argument("--output", help="write the result here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("normal-form", help="canonical form T theta T^t of a skew matrix")
    p.add_argument("--theta", dest="theta_file", required=True)

    p = sub.add_parser("heat-trace", help="closed-form and truncated heat traces")
    p.add_argument("--theta", dest="theta_file", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("star", help="Moyal product of two grid functions (CSV in, CSV out)")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--theta", dest="theta_file")

    p = sub.add_parser("compose", help="composition expansion of two polynomial symbols")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--theta", dest="theta_file")
    p.add_argument("--theta-prime", dest="theta_prime_file")
    p.add_argument("--d", type=int, help="dimension when no theta file is given")
    p.add_argument("--order", type=int)
    p.add_argument("--exact", action="store_true")

    p = sub.add_parser("index-bott", help="index pairing of the d=2 Bott projector")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--theta-prime", type=float, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--matrix-cutoff", type=int)
    p.add_argument("--method", choices=("matrix", "series", "both"), default="both")

    p = sub.add_parser("cocycle-constants", help="alpha(k) and sigma_{n,j}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", default="")

    p = sub.add_parser("verify-suite", help="run every acceptance criterion")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    p.add_argument("--timings", action="store_true", help="include wall times (breaks byte-identity)")
    return parser


def config_from_args(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    if command is None:
        raise ValidationError("no command given")
    output = ns.pop("output")
    fmt = ns.pop("format") or ("csv" if command == "star" else "json")
    return RunConfig(command, {k: v for k, v in ns.items()}, output, fmt)


def main(argv=None) -> int:
    if "NCGEO_THREADS" in os.environ:
        # cap BLAS pools as well as our own sharding
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, os.environ["NCGEO_THREADS"])
    try:
        config = config_from_args(sys.argv[1:] if argv is None else argv)
    except ValidationError as exc:
        sys.stdout.write(dumps({"error": {"type": "ValidationError", "message": str(exc)}}))
        return EXIT_INVALID
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
