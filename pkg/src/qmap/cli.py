"""Command-line front end: ``qmap {classify,scan,volume,verify,surface}``.

Exit codes: 0 success, 1 verification disagreement, 2 usage error.
Seeds fall back to the QMAP_SEED environment variable, then to 0.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys

import numpy as np

from qmap import classify as cl
from qmap import docmap, oracle
from qmap import pauli as pl

EXIT_OK, EXIT_DISAGREE, EXIT_USAGE = 0, 1, 2

CLASS_CODES = ("N", "P", "S", "CP")

# "-0.5" is a number to argparse, "-0.5,-0.5" is not; glue such values to their flag.
_NEG_VALUE = re.compile(r"^-[0-9.]")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _glue_negative_values(argv: list[str]) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEG_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _floats(text: str, count: int | None = None, name: str = "value") -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"{name}: cannot parse {text!r} as comma-separated numbers") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"{name}: expected {count} numbers, got {len(vals)}")
    return vals


def _complex(text: str, name: str) -> complex:
    vals = _floats(text, name=name)
    if len(vals) == 1:
        return complex(vals[0], 0.0)
    if len(vals) == 2:
        return complex(vals[0], vals[1])
    raise UsageError(f"{name}: expected re or re,im")


def _seed(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("QMAP_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"QMAP_SEED={env!r} is not an integer") from None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _open_out(path: str):
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _class_codes(res: dict) -> np.ndarray:
    """Most specific class per cell: CP, S, P or N."""
    code = np.where(
        res["completely_positive"], 3, np.where(res["schwarz"], 2, np.where(res["positive"], 1, 0))
    )
    return np.asarray(CLASS_CODES, dtype=object)[code]


# -- classify ----------------------------------------------------------------------------


def _map_from_args(args):
    """Return (MapParams or None, PauliEigenvalues or None)."""
    general = [args.a11, args.a12, args.a21, args.a22]
    chosen = sum(
        [
            args.a is not None or args.b is not None,
            any(v is not None for v in general),
            args.channel is not None,
            args.pauli is not None,
            args.pauli_eigs is not None,
        ]
    )
    if chosen != 1:
        raise UsageError("give exactly one of --a/--b, --a11..--a22, --channel, --pauli, --pauli-eigs")
    lam = _complex(args.lam, "--lambda") if args.lam is not None else 0j
    mu = _complex(args.mu, "--mu") if args.mu is not None else 0j
    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            raise UsageError("--a and --b go together")
        return docmap.MapParams.unital(args.a, args.b, lam, mu), None
    if any(v is not None for v in general):
        if any(v is None for v in general):
            raise UsageError("--a11, --a12, --a21, --a22 are all required")
        return docmap.MapParams(*general, lam, mu), None
    if args.channel is not None:
        params = _floats(args.param, name="--param") if args.param else []
        try:
            return docmap.named_channel(args.channel, *params), None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.pauli is not None:
        pp = pl.PauliParams(tuple(_floats(args.pauli, 4, "--pauli")))
        if pp.is_trace_preserving:
            return pl.to_map_params(pp), pl.to_eigenvalues(pp)
        return pl.to_map_params(pp), None
    return None, pl.PauliEigenvalues(tuple(_floats(args.pauli_eigs, 3, "--pauli-eigs")))


def cmd_classify(args) -> int:
    p, eigs = _map_from_args(args)
    if eigs is not None:
        out = pl.classify_pauli(eigs).to_json()
        out["pauli_eigenvalues"] = list(eigs.lam)
    else:
        try:
            out = cl.classify(p).to_json()
        except (cl.InvalidParams, ValueError) as exc:
            raise UsageError(str(exc)) from None
    if p is not None:
        out["params"] = p.to_json()
    _emit(out)
    return EXIT_OK


# -- scan ----------------------------------------------------------------------------------


def cmd_scan(args) -> int:
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    if args.pauli:
        if args.fix_a is None or not 0.0 <= args.fix_a <= 1.0:
            raise UsageError("--pauli needs --fix-a in [0, 1]")
        a = args.fix_a
        # bounding box of the positive diamond |2 p0 - a| + |2 p1 - (1 - a)| <= 1
        x = np.linspace((a - 1.0) / 2.0, (a + 1.0) / 2.0, args.grid)
        y = np.linspace(-a / 2.0, 1.0 - a / 2.0, args.grid)
        xx, yy = np.meshgrid(x, y, indexing="ij")
        lam, mu = np.abs(2.0 * xx - a), np.abs(2.0 * yy - (1.0 - a))
        res = cl.classify_batch(a, 1.0 - a, 1.0 - a, a, lam, mu)
        header = ("p0", "p1", "class")
    else:
        if args.a is None or args.b is None:
            raise UsageError("scan needs --a and --b (or --pauli --fix-a)")
        if not (0.0 <= args.a <= 1.0 and 0.0 <= args.b <= 1.0):
            raise UsageError("--a and --b must lie in [0, 1]")
        x = np.linspace(0.0, args.lam_max, args.grid)
        y = np.linspace(0.0, args.mu_max, args.grid)
        xx, yy = np.meshgrid(x, y, indexing="ij")
        res = cl.classify_batch(args.a, 1.0 - args.a, 1.0 - args.b, args.b, xx, yy)
        header = ("lam", "mu", "class")
    codes = _class_codes(res)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for u, v, c in zip(xx.ravel(), yy.ravel(), codes.ravel()):
            w.writerow((repr(float(u)), repr(float(v)), c))
    return EXIT_OK


# -- volume --------------------------------------------------------------------------------


def cmd_volume(args) -> int:
    if args.samples < 10_000:
        raise UsageError("--samples must be at least 10000")
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    seed = _seed(args.seed)
    if seed < 0:
        raise UsageError("seed must be non-negative")
    sys.stdout.write(pl.estimate_volumes(args.samples, seed, args.workers).dumps() + "\n")
    return EXIT_OK


# -- verify --------------------------------------------------------------------------------


def cmd_verify(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    try:
        report = oracle.agreement_sweep(args.n, _seed(args.seed), args.sweep, args.budget)
    except oracle.BudgetExhausted as exc:
        raise UsageError(str(exc)) from None
    _emit(report.to_json())
    return EXIT_DISAGREE if report.disagreements else EXIT_OK


# -- surface -------------------------------------------------------------------------------


def cmd_surface(args) -> int:
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    mesh = pl.surface_mesh(args.grid)
    vertices_path = args.vertices or _vertices_path(args.out)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(("l1", "l2", "l3_plus", "l3_minus"))
        for row in mesh:
            w.writerow(tuple(repr(float(v)) for v in row))
    with _open_out(vertices_path) as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(("l1", "l2", "l3"))
        for v in pl.TETRAHEDRON_VERTICES:
            w.writerow(tuple(repr(float(t)) for t in v))
    return EXIT_OK


def _vertices_path(out: str) -> str:
    root, ext = os.path.splitext(out)
    return f"{root}_vertices{ext or '.csv'}"


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmap", description="Classify and verify qubit maps with diagonal symmetry.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="closed-form verdicts for one map (JSON)")
    c.add_argument("--a", type=float)
    c.add_argument("--b", type=float)
    for name in ("a11", "a12", "a21", "a22"):
        c.add_argument(f"--{name}", type=float)
    c.add_argument("--lambda", dest="lam", help="re[,im]")
    c.add_argument("--mu", help="re[,im]")
    c.add_argument("--channel", help=f"one of: {', '.join(docmap.CHANNEL_NAMES)}")
    c.add_argument("--param", help="comma-separated channel parameters")
    c.add_argument("--pauli", help="p0,p1,p2,p3")
    c.add_argument("--pauli-eigs", help="l1,l2,l3")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("scan", help="region codes on a grid (CSV)")
    s.add_argument("--a", type=float)
    s.add_argument("--b", type=float)
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--lam-max", type=float, default=1.0)
    s.add_argument("--mu-max", type=float, default=1.0)
    s.add_argument("--pauli", action="store_true", help="scan the (p0, p1) plane instead")
    s.add_argument("--fix-a", type=float, help="p0 + p3 for --pauli")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scan)

    v = sub.add_parser("volume", help="Monte Carlo volumes of Pauli regions (JSON)")
    v.add_argument("--samples", type=int, default=10_000_000)
    v.add_argument("--seed", type=int)
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_volume)

    r = sub.add_parser("verify", help="oracle vs closed-form agreement sweep (JSON)")
    r.add_argument("--sweep", choices=("unital", "nonunital", "pauli"), default="unital")
    r.add_argument("--n", type=int, default=1000)
    r.add_argument("--seed", type=int)
    r.add_argument("--budget", type=int, default=10_000)
    r.set_defaults(func=cmd_verify)

    f = sub.add_parser("surface", help="Schwarz boundary surface for Pauli maps (CSV)")
    f.add_argument("--grid", type=int, default=101)
    f.add_argument("--out", required=True)
    f.add_argument("--vertices", help="tetrahedron vertex file (default: <out>_vertices.csv)")
    f.set_defaults(func=cmd_surface)
    return parser


def main(argv: list[str] | None = None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8", line_buffering=True)
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_negative_values(argv))
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"qmap: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
