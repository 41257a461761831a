"""Command-line front end.

Subcommands: gen (corpus generators), eval (operator fields and seminorms),
constants (weight constants), verify (inequality suites against frozen
calibration), sweep (parameter sweeps to CSV).

Exit codes: 0 pass, 1 usage or verification failure, 2 degenerate input,
3 stale calibration, 4 oracle mismatch.  All output is byte-reproducible
from the arguments and input files.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from .grid import (
    GridCube,
    GridError,
    GridFunction,
    read_grid,
    write_grid,
)
from .operators import (
    DegenerateInputError,
    maximal,
    maximal_naive,
    sharp_maximal,
    sharp_maximal_naive,
)
from .oscillation import blo_seminorm, bmo_seminorm, fujii_wilson
from .report import csv_text, json_text
from .verify import (
    CalibrationRun,
    RatioFields,
    StaleCalibrationError,
    build_weight,
    char_lower_bound,
    check_against_frozen,
    freeze_text,
    load_frozen,
    pnorm_ratio,
)

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_DEGENERATE = 2
EXIT_STALE = 3
EXIT_ORACLE = 4

_DATA_DIR = Path(__file__).parent / "data"

VERIFY_SUITES = (
    "pmean",
    "tails",
    "goodlambda",
    "localratio",
    "nonlocal",
    "weights",
    "char",
    "xbound",
    "all",
)

_SUITE_PARTS = {
    "pmean": ("core",),
    "tails": ("core",),
    "goodlambda": ("core",),
    "localratio": ("local",),
    "nonlocal": ("nonlocal",),
    "weights": ("weights",),
    "xbound": ("x",),
    "all": CalibrationRun.PARTS,
}

_SUITE_CONSTANTS = {
    "pmean": ("pnorm_cstar", "pnorm_span"),
    "tails": ("tail_kappa",),
    "goodlambda": (),
    "localratio": ("cp_cstar",),
    "nonlocal": ("nonlocal_c",),
    "weights": ("llogl_lo", "llogl_hi", "llogl_spike", "a1_cr_bound"),
    "xbound": ("x_lower", "x_upper"),
}

_SUITE_STRUCTURAL = {
    "pmean": ("p_monotone",),
    "tails": ("tails_monotone", "tail_rates_negative"),
    "goodlambda": ("good_lambda_ok",),
    "localratio": (),
    "nonlocal": (),
    "weights": ("rh_ok", "cr_floor_ok", "gamma_ok"),
    "xbound": (),
}


class UsageError(Exception):
    pass


class OracleMismatchError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad arguments; route through the
    # documented usage exit code instead
    def error(self, message):
        raise UsageError(message)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _floats(text: str, flag: str) -> list[float]:
    items = [tok for tok in text.split(",") if tok.strip()]
    if not items:
        raise UsageError(f"{flag} axis is empty")
    try:
        return [float(tok) for tok in items]
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    ext = ".csv" if args.format == "csv" else ".grid"
    kind = args.generator
    if kind == "half-space":
        ex = corpus_mod.half_space_example(
            args.n, args.dim, axis=args.axis, boundary_cell=args.boundary_cell
        )
        write_grid(ex.func, outdir / f"half_space{ext}")
        write_grid(ex.analytic_maximal, outdir / f"half_space_maximal{ext}")
        manifest = ex.manifest
        tag = "half_space"
    elif kind == "power-weight":
        f = corpus_mod.power_weight(args.n, args.dim, args.a)
        manifest = {"generator": "power-weight", "n": args.n, "dim": args.dim, "a": args.a}
        tag = "power_weight"
        write_grid(f, outdir / f"{tag}{ext}")
    elif kind == "two-valued":
        f = corpus_mod.two_valued_weight(args.n, args.dim, args.ratio, axis=args.axis)
        manifest = {
            "generator": "two-valued",
            "n": args.n,
            "dim": args.dim,
            "ratio": args.ratio,
            "axis": args.axis,
        }
        tag = "two_valued"
        write_grid(f, outdir / f"{tag}{ext}")
    elif kind == "dyadic-bmo":
        f = corpus_mod.random_dyadic_bmo(args.n, args.dim, args.depth, seed=args.seed)
        manifest = {
            "generator": "dyadic-bmo",
            "n": args.n,
            "dim": args.dim,
            "depth": args.depth,
            "seed": args.seed,
        }
        tag = "dyadic_bmo"
        write_grid(f, outdir / f"{tag}{ext}")
    elif kind == "spike":
        f = corpus_mod.spike(args.n, args.dim)
        manifest = {"generator": "spike", "n": args.n, "dim": args.dim}
        tag = "spike"
        write_grid(f, outdir / f"{tag}{ext}")
    elif kind == "a1-power":
        f = corpus_mod.a1_family(args.n, args.dim, args.delta, seed=args.seed)
        manifest = {
            "generator": "a1-power",
            "n": args.n,
            "dim": args.dim,
            "delta": args.delta,
            "seed": args.seed,
        }
        tag = "a1_power"
        write_grid(f, outdir / f"{tag}{ext}")
    elif kind == "log-demo":
        f = corpus_mod.log_abs_demo(args.n, args.dim)
        manifest = {"generator": "log-demo", "n": args.n, "dim": args.dim}
        tag = "log_demo"
        write_grid(f, outdir / f"{tag}{ext}")
    else:
        raise UsageError(f"unknown generator {kind!r}")
    (outdir / f"{tag}_manifest.json").write_text(json_text(manifest) + "\n")
    sys.stdout.write(json_text({"written": tag, "out": str(outdir)}) + "\n")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _oracle_compare(fast: np.ndarray, naive: np.ndarray) -> float:
    scale = np.maximum(np.abs(naive), 1.0)
    return float(np.max(np.abs(fast - naive) / scale))


def _cmd_eval(args) -> int:
    f = read_grid(args.input)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    mf = maximal(f, args.mode)
    sf = sharp_maximal(f, args.mode)
    write_grid(mf.field, outdir / "maximal.csv")
    write_grid(sf.field, outdir / "sharp.csv")
    report = {
        "mode": args.mode,
        "family": args.family,
        "bmo": bmo_seminorm(f, args.family).to_json(mode=args.mode),
        "blo": blo_seminorm(f, args.family).to_json(mode=args.mode),
    }
    if args.oracle:
        err_m = _oracle_compare(mf.values, maximal_naive(f, args.mode).values)
        err_s = _oracle_compare(sf.values, sharp_maximal_naive(f, args.mode).values)
        report["oracle"] = {"maximal_err": err_m, "sharp_err": err_s}
        if max(err_m, err_s) > 1e-9:
            (outdir / "report.json").write_text(json_text(report) + "\n")
            raise OracleMismatchError(
                f"fast/naive disagreement: maximal {err_m:g}, sharp {err_s:g}"
            )
    (outdir / "report.json").write_text(json_text(report) + "\n")
    sys.stdout.write(json_text(report) + "\n")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def _cmd_constants(args) -> int:
    w = read_grid(args.input).as_weight(floor=args.floor)
    wc = fujii_wilson(w, args.mode, args.family)
    _emit(json_text(wc.to_json()) + "\n", args.out)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _calibration_path(args) -> Path:
    if args.calibration:
        return Path(args.calibration)
    return _DATA_DIR / f"calibration_{args.suite}.json"


def _verify_char(args) -> int:
    run = CalibrationRun(args.suite)
    if args.weight:
        weights = [("file", read_grid(args.weight).as_weight(floor=args.floor))]
    else:
        xspec = run.spec["x"]
        weights = [
            (desc["kind"], build_weight(desc, xspec["n"], xspec["dim"]))
            for desc in xspec["weights"]
        ]
    rows = []
    ok = True
    for name, w in weights:
        res = char_lower_bound(w)
        rows.append({"weight": name, **res})
        ok = ok and res["ok"]
    _emit(json_text({"suite": "char", "rows": rows, "pass": ok}) + "\n", args.out)
    return EXIT_PASS if ok else EXIT_USAGE


def _cmd_verify(args) -> int:
    if args.name == "char":
        return _verify_char(args)
    parts = _SUITE_PARTS[args.name]
    run = CalibrationRun(args.suite)
    result = run.run(parts)
    path = _calibration_path(args)
    if args.freeze:
        if args.name != "all":
            raise UsageError("--freeze requires the 'all' suite")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(freeze_text(result))
        sys.stdout.write(json_text({"frozen": str(path), "constants": result["constants"]}) + "\n")
        return EXIT_PASS
    if not path.exists():
        raise StaleCalibrationError(f"no frozen calibration at {path}")
    frozen = load_frozen(path.read_text())
    if args.name != "all":
        result = dict(result)
        result["constants"] = {
            k: v for k, v in result["constants"].items() if k in _SUITE_CONSTANTS[args.name]
        }
    rows = check_against_frozen(result, frozen)
    if args.name == "all":
        struct_keys = sorted({k for keys in _SUITE_STRUCTURAL.values() for k in keys})
    else:
        struct_keys = list(_SUITE_STRUCTURAL[args.name])
    structural = {k: result["structural"][k] for k in struct_keys}
    ok = all(r["ok"] for r in rows) and all(structural.values())
    report = {
        "suite": args.name,
        "corpus": args.suite,
        "corpus_hash": result["corpus_hash"],
        "constants": rows,
        "structural": structural,
        "pass": ok,
    }
    _emit(json_text(report) + "\n", args.out)
    return EXIT_PASS if ok else EXIT_USAGE


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _cmd_sweep(args) -> int:
    p_axis = _floats(args.p, "--p")
    a_axis = _floats(args.a, "--a")
    n, dim = args.n, args.dim
    if args.seed is not None:
        f = corpus_mod.random_dyadic_bmo(
            n, dim, min(args.depth, int(np.log2(n))), seed=args.seed
        )
    else:
        f = corpus_mod.half_space_example(n, dim).func
    fields = RatioFields.compute(f, args.mode)
    cube = GridCube((0,) * dim, n)
    rows = []
    for a in sorted(a_axis):
        if a == 0.0:
            w = GridFunction(dim, n, np.ones((n,) * dim))
        else:
            w = corpus_mod.power_weight(n, dim, a)
        fw = fujii_wilson(w, args.mode, args.family).a_infty
        for p in sorted(p_axis):
            rec = pnorm_ratio(
                f, w, cube, p, args.mode, a_infty=fw, fields=fields, family=args.family
            )
            rows.append([a, p, fw, rec.lhs, rec.normalized])
    text = csv_text(["a", "p", "a_infty", "lhs", "normalized"], rows)
    _emit(text, args.out)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def _add_common(p, mode_default="restricted", family_default="all"):
    p.add_argument("--mode", choices=["restricted", "zero", "dyadic"], default=mode_default)
    p.add_argument("--family", choices=["all", "dyadic"], default=family_default)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--dim", type=int, choices=[1, 2], default=1)
    p.add_argument("--out", default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="oslx", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate corpus inputs")
    g.add_argument("generator", choices=[
        "half-space", "power-weight", "two-valued", "dyadic-bmo",
        "spike", "a1-power", "log-demo",
    ])
    _add_common(g)
    g.set_defaults(out=".")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--a", type=float, default=1.0, help="power-weight exponent")
    g.add_argument("--ratio", type=float, default=8.0)
    g.add_argument("--depth", type=int, default=4)
    g.add_argument("--delta", type=float, default=0.5)
    g.add_argument("--axis", type=int, default=0)
    g.add_argument("--boundary-cell", type=int, default=None)
    g.add_argument("--format", choices=["csv", "bin"], default="csv")
    g.set_defaults(func=_cmd_gen)

    e = sub.add_parser("eval", help="maximal fields and seminorms of one input")
    e.add_argument("--input", required=True)
    _add_common(e)
    e.set_defaults(out=".")
    e.add_argument("--oracle", action="store_true", help="cross-check against naive enumeration")
    e.set_defaults(func=_cmd_eval)

    c = sub.add_parser("constants", help="weight constants of one weight file")
    c.add_argument("--input", required=True)
    _add_common(c)
    c.add_argument("--floor", action="store_true", help="clamp nonpositive entries at the floor")
    c.set_defaults(func=_cmd_constants)

    v = sub.add_parser("verify", help="run a verification suite against frozen calibration")
    v.add_argument("name", choices=VERIFY_SUITES)
    v.add_argument("--suite", choices=["default", "quick"], default="default")
    v.add_argument("--calibration", default=None)
    v.add_argument("--freeze", action="store_true", help="recompute and write the frozen constants")
    v.add_argument("--weight", default=None, help="weight file for the char suite")
    v.add_argument("--floor", action="store_true")
    v.add_argument("--out", default=None)
    v.set_defaults(func=_cmd_verify)

    s = sub.add_parser("sweep", help="cartesian p / weight-exponent sweep to CSV")
    _add_common(s)
    s.add_argument("--seed", type=int, default=None, help="dyadic-bmo seed; omit for the half-space input")
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--p", default="1,2,4,8", help="comma-separated p axis")
    s.add_argument("--a", default="0", help="comma-separated power-weight exponents (0 = unweighted)")
    s.set_defaults(func=_cmd_sweep)
    return parser


def _thread_cap() -> int:
    """Worker cap from OSLX_THREADS; computation is serial today, so any
    positive cap is honored trivially."""
    raw = os.environ.get("OSLX_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"OSLX_THREADS must be a positive integer, got {raw!r}")
    if cap < 1:
        raise UsageError(f"OSLX_THREADS must be a positive integer, got {raw!r}")
    return cap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        _thread_cap()
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except DegenerateInputError as exc:
        sys.stderr.write(f"degenerate input: {exc}\n")
        return EXIT_DEGENERATE
    except StaleCalibrationError as exc:
        sys.stderr.write(f"stale calibration: {exc}\n")
        return EXIT_STALE
    except OracleMismatchError as exc:
        sys.stderr.write(f"oracle mismatch: {exc}\n")
        return EXIT_ORACLE
    except (GridError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
