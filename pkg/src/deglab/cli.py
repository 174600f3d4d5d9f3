"""Command-line front end.

Commands: ``integrate``, ``decompose``, ``analyze``, ``verify``, ``sweep`` and
``generate``.  Results go to stdout (JSON or CSV) or to ``--output``;
diagnostics go to stderr.

Exit codes: 0 success, 2 malformed input or usage, 3 integration budget
exhausted, 4 inconclusive structure verdict, 5 precondition violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from typing import Optional

from . import __version__
from .corpus import CORPUS_DELTAS, default_corpus, default_threads, run_parallel
from .generators import gen_linear, gen_log_boundary, gen_multibump, gen_random
from .integral import (
    IntegralRequest,
    integral_exact,
    integral_montecarlo,
    integral_quadrature,
    threshold_integral,
)
from .io import MalformedInput, format_float, read_function, write_function
from .levels import NonFiniteLevelSet, decompose, satisfied_set
from .plfn import PhaseFunction, PLFunction, degree
from .structure import PreconditionError, structure_verdict, theorem_check

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_BUDGET = 3
EXIT_INCONCLUSIVE = 4
EXIT_PRECONDITION = 5

DEFAULTS = {
    "input": None,
    "output": None,
    "delta": None,
    "deltas": None,
    "square": 1,
    "engine": "exact",
    "tol": 1e-6,
    "max_intervals": 200_000,
    "samples": 1_000_000,
    "seed": 0,
    "grid": None,
    "threads": None,
    "corpus": None,
    "n_random": 1000,
    "family": None,
    "M": None,
    "K": None,
    "beta_log": None,
    "side": "left",
    "segments": 64,
    "bumps": 1,
    "bump_K": 20.0,
    "phase": False,
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _jsonable(obj):
    """Replace non-finite floats with the ``inf``/``-inf``/``nan`` string sentinels."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return format_float(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, path: Optional[str]) -> None:
    _emit(json.dumps(_jsonable(obj), indent=1, allow_nan=False) + "\n", path)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_float(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _float_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise CliError(EXIT_MALFORMED, f"bad number list {text!r}") from exc


# ---------------------------------------------------------------------------
# configuration


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_MALFORMED, f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError(EXIT_MALFORMED, "config must be a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    cfg.pop("command", None)
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise CliError(EXIT_MALFORMED, f"unknown config fields: {sorted(unknown)}")
    return cfg


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options: command-line flag, then config file, then default."""
    cfg = _load_config(getattr(args, "config", None))
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, cfg.get(key, default))
    if args.threads is None:
        args.threads = default_threads()
    return args


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise CliError(EXIT_MALFORMED, f"--{n.replace('_', '-')} is required")


def _load(args, phase=None):
    _require(args, "input")
    return read_function(args.input, phase)


def _as_phase(f):
    if isinstance(f, PhaseFunction):
        return f
    try:
        return PhaseFunction(f)
    except ValueError as exc:
        raise CliError(EXIT_MALFORMED, str(exc)) from exc


# ---------------------------------------------------------------------------
# generators


def _build_generator(family: str, params: dict, delta: float) -> PLFunction:
    try:
        if family == "linear":
            return gen_linear(int(params["M"]), delta)
        if family == "log_boundary":
            return gen_log_boundary(
                float(params["K"]),
                float(params["beta_log"]),
                delta,
                side=params.get("side", "left"),
                segments=int(params.get("segments", 64)),
                M=None if params.get("M") is None else int(params["M"]),
            )
        if family == "multibump":
            return gen_multibump(int(params["bumps"]), int(params["M"]), delta, float(params.get("bump_K", 20.0)))
        if family == "random":
            return gen_random(int(params["seed"]), int(params["segments"]), int(params["M"]), delta)
    except KeyError as exc:
        raise CliError(EXIT_MALFORMED, f"{family} needs --{exc.args[0].replace('_', '-')}") from exc
    except ValueError as exc:
        raise CliError(EXIT_MALFORMED, str(exc)) from exc
    raise CliError(EXIT_MALFORMED, f"unknown family {family!r}")


_GEN_KEYS = {
    "linear": ("M",),
    "log_boundary": ("K", "beta_log", "side", "segments", "M"),
    "multibump": ("bumps", "M", "bump_K"),
    "random": ("seed", "segments", "M"),
}


def _gen_params(args) -> dict:
    return {k: getattr(args, k) for k in _GEN_KEYS.get(args.family, ()) if getattr(args, k) is not None}


# ---------------------------------------------------------------------------
# commands


def cmd_integrate(args) -> int:
    _require(args, "delta")
    f = _load(args)
    square = int(args.square)
    if square == 2:
        f = _as_phase(f)
    req = IntegralRequest(f, float(args.delta), square)
    if args.engine == "exact":
        res = integral_exact(req)
    elif args.engine == "quadrature":
        res = integral_quadrature(req, tol=float(args.tol), max_intervals=int(args.max_intervals))
    elif args.engine == "montecarlo":
        res = integral_montecarlo(req, samples=int(args.samples), seed=int(args.seed))
    else:
        raise CliError(EXIT_MALFORMED, f"unknown engine {args.engine!r}")
    _emit_json(res.to_json(), args.output)
    if not res.converged:
        print("quadrature budget exhausted before reaching the tolerance", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_decompose(args) -> int:
    _require(args, "delta")
    f = _load(args, phase=False)
    d = decompose(f, float(args.delta))
    rep = satisfied_set(d, grid=args.grid)
    out = d.to_json()
    out.update(rep.to_json())
    _emit_json(out, args.output)
    return EXIT_OK


def cmd_analyze(args) -> int:
    _require(args, "delta")
    f = _load(args, phase=False)
    report = structure_verdict(f, float(args.delta), grid=args.grid)
    _emit_json(report.to_json(), args.output)
    print(f"verdict: {report.verdict}", file=sys.stderr)
    if report.verdict == "Inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _verify_row(item):
    fid, phi, delta = item
    tc = theorem_check(phi, delta)
    return [fid, delta, tc.lhs, tc.rhs, tc.ratio, "true" if tc.holds else "false", 0 if tc.holds else 1]


def cmd_verify(args) -> int:
    deltas = _float_list(args.deltas) if args.deltas is not None else None
    if args.corpus:
        deltas = deltas or list(CORPUS_DELTAS)
        for dl in deltas:
            if not dl < 0.01:
                raise PreconditionError("the degree bound is stated for delta < 0.01")
        entries = default_corpus(deltas, n_random=int(args.n_random))
        items = [(e.function_id, PhaseFunction(e.build()), e.delta) for e in entries]
        rows = run_parallel(_verify_row, items, int(args.threads))
        rows.sort(key=lambda r: (r[0], r[1]))
        header = ["function_id", "delta", "lhs", "rhs", "ratio", "holds", "violation"]
        _emit(_csv_text(header, rows), args.output)
        bad = sum(r[-1] for r in rows)
        ratios = [r[4] for r in rows]
        print(f"{len(rows)} rows, {bad} violations, min rhs/lhs {min(ratios):.6g}", file=sys.stderr)
        return EXIT_OK
    if args.delta is None and deltas:
        args.delta = deltas[0]
    _require(args, "delta")
    phi = _as_phase(_load(args))
    tc = theorem_check(phi, float(args.delta))
    _emit_json(tc.to_json(), args.output)
    return EXIT_OK


def _sweep_row(item):
    fid, f, delta, square = item
    if square == 2:
        f = _as_phase(f)
    I = threshold_integral(f, delta)
    deg = degree(f)
    dI = delta * I
    ratio = math.inf if dI == 0 else abs(deg) / dI
    return [fid, delta, deg, I, dI, ratio]


def cmd_sweep(args) -> int:
    _require(args, "deltas")
    deltas = _float_list(args.deltas)
    square = int(args.square)
    items = []
    if args.input:
        f = _load(args)
        fid = args.input
        for dl in deltas:
            items.append((fid, f, dl, square))
    elif args.family:
        params = _gen_params(args)
        grids = {k: (_float_list(v) if isinstance(v, str) and "," in v else [v]) for k, v in params.items()}
        keys = sorted(grids)
        for combo in itertools.product(*(grids[k] for k in keys)):
            p = dict(zip(keys, combo))
            varying = [k for k in keys if len(grids[k]) > 1]
            fid = args.family + ("[" + ",".join(f"{k}={p[k]:g}" for k in varying) + "]" if varying else "")
            for dl in deltas:
                items.append((fid, _build_generator(args.family, p, dl), dl, square))
    else:
        raise CliError(EXIT_MALFORMED, "sweep needs --input or --family")
    rows = run_parallel(_sweep_row, items, int(args.threads))
    header = ["function_id", "delta", "degree", "integral", "delta_times_integral", "ratio"]
    _emit(_csv_text(header, rows), args.output)
    return EXIT_OK


def cmd_generate(args) -> int:
    _require(args, "family", "delta")
    f = _build_generator(args.family, _gen_params(args), float(args.delta))
    if args.phase:
        f = PhaseFunction(f)
    if args.output:
        write_function(f, args.output)
    else:
        from .io import dumps_function

        sys.stdout.write(dumps_function(f))
    return EXIT_OK


COMMANDS = {
    "integrate": cmd_integrate,
    "decompose": cmd_decompose,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "generate": cmd_generate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deglab", description="Degree bounds for PL circle maps: integrals, level sets, structure checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, delta=True):
        sp.add_argument("--config", help="JSON file of option defaults (flags take precedence)")
        sp.add_argument("-o", "--output", help="write the result here instead of stdout")
        sp.add_argument("--threads", type=int, help="worker threads (default: $DEGLAB_THREADS or 1)")
        if delta:
            sp.add_argument("--delta", type=float, help="band width")

    sp = sub.add_parser("integrate", help="threshold integral of a function file")
    common(sp)
    sp.add_argument("-i", "--input")
    sp.add_argument("--square", type=int, choices=(1, 2), help="side of the integration square (2 lifts a phase)")
    sp.add_argument("--engine", choices=("exact", "quadrature", "montecarlo"))
    sp.add_argument("--tol", type=float, help="quadrature absolute tolerance")
    sp.add_argument("--max-intervals", dest="max_intervals", type=int, help="quadrature subinterval budget")
    sp.add_argument("--samples", type=int, help="Monte Carlo sample count")
    sp.add_argument("--seed", type=int, help="Monte Carlo seed")

    sp = sub.add_parser("decompose", help="band sets and satisfied indices")
    common(sp)
    sp.add_argument("-i", "--input")
    sp.add_argument("--grid", type=int, help="also run the uniform-grid search with this many cells")

    sp = sub.add_parser("analyze", help="structure verdict report")
    common(sp)
    sp.add_argument("-i", "--input")
    sp.add_argument("--grid", type=int, help="also run the uniform-grid search with this many cells")

    sp = sub.add_parser("verify", help="degree bound for a phase function or the corpus")
    common(sp)
    sp.add_argument("-i", "--input")
    sp.add_argument("--deltas", help="comma-separated band widths (corpus mode)")
    sp.add_argument("--corpus", choices=("default",), help="run over the built-in corpus and emit CSV")
    sp.add_argument("--n-random", dest="n_random", type=int, help="random functions per delta in the corpus")

    sp = sub.add_parser("sweep", help="integral and degree ratio over a delta grid")
    common(sp, delta=False)
    sp.add_argument("-i", "--input")
    sp.add_argument("--deltas", help="comma-separated band widths")
    sp.add_argument("--square", type=int, choices=(1, 2))
    _generator_flags(sp, grid=True)

    sp = sub.add_parser("generate", help="write a generated function file")
    common(sp)
    _generator_flags(sp, grid=False)
    sp.add_argument("--phase", action="store_const", const=True, help="mark the output as a phase function")
    return p


def _generator_flags(sp, grid: bool):
    num = str if grid else float
    integer = str if grid else int
    sp.add_argument("--family", choices=("linear", "log_boundary", "multibump", "random"))
    sp.add_argument("--M", dest="M", type=integer, help="number of bands climbed")
    sp.add_argument("--K", dest="K", type=num, help="log steepness (bands per e-fold)" + (", comma list" if grid else ""))
    sp.add_argument("--beta-log", dest="beta_log", type=num, help="natural log of the offset beta")
    sp.add_argument("--side", choices=("left", "right"))
    sp.add_argument("--segments", type=integer)
    sp.add_argument("--bumps", type=integer)
    sp.add_argument("--bump-K", dest="bump_K", type=num)
    sp.add_argument("--seed", type=integer)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _resolve(args)
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (MalformedInput, NonFiniteLevelSet) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
