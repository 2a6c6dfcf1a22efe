"""Command-line front end: ``cayley <command> [options]``.

Exit codes: 0 ok, 1 verify failure, 2 invalid input, 3 quadrature tolerance
not met, 4 work budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .core import DEFAULT_BUDGET, CayleySpec, check_modulus
from .density import DEFAULT_TOLERANCE, conv_mass, conv_mass_mc
from .errors import BudgetExceeded, ToleranceNotMet, ValidationError
from .ihara import ihara_polynomial, pole_pair, ramanujan_fraction, zeta_inverse
from .spectra import interval_map, spectrum
from .stats import SweepRecord, eigen_histogram, fit_slope, prob_exact, prob_fast
from . import verify as verify_mod

SCHEMA_VERSION = 1
DEFAULT_CACHE_DIR = "./.cayley-cache"
EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_TOLERANCE, EXIT_BUDGET = 0, 1, 2, 3, 4


# --- rendering ----------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def render(columns: Sequence[str], rows: list[dict], fmt: str, meta: Optional[dict] = None) -> str:
    if fmt == "json":
        doc = {"records": [{c: r.get(c) for c in columns} for r in rows], "meta": meta or {}}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _meta(args, started: float) -> dict:
    meta = {"version": __version__, "schema_version": SCHEMA_VERSION}
    if args.timing:
        meta["wall_time"] = time.perf_counter() - started
    return meta


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# --- cache --------------------------------------------------------------------

def cache_key(command: str, **params) -> str:
    """Canonical key string; floats go through repr so distinct values never collide."""
    canon = {k: (repr(float(v)) if isinstance(v, float) else v) for k, v in params.items()}
    canon["command"] = command
    canon["schema_version"] = SCHEMA_VERSION
    return json.dumps(canon, sort_keys=True, separators=(",", ":"))


class Cache:
    def __init__(self, directory: Optional[str], enabled: bool = True):
        self.enabled = enabled and directory is not None
        self.root = Path(directory) if directory else None

    def _path(self, key: str) -> Path:
        return self.root / (hashlib.sha256(key.encode()).hexdigest() + ".json")

    def get(self, key: str) -> Optional[dict]:
        if not self.enabled:
            return None
        path = self._path(key)
        try:
            entry = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        if entry.get("schema_version") != SCHEMA_VERSION or entry.get("key") != key:
            return None
        return entry["row"]

    def put(self, key: str, row: dict) -> None:
        if not self.enabled:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        entry = {"schema_version": SCHEMA_VERSION, "key": key, "row": row}
        tmp = self._path(key).with_suffix(".tmp")
        tmp.write_text(json.dumps(entry, sort_keys=True))
        os.replace(tmp, self._path(key))


def resolve_cache_dir(flag: Optional[str]) -> str:
    return flag or os.environ.get("CAYLEY_CACHE_DIR") or DEFAULT_CACHE_DIR


# --- argument helpers ---------------------------------------------------------

def _threads(value: str) -> int:
    if value == "auto":
        return os.cpu_count() or 1
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be positive")
    return n


def _positive_int(value: str) -> int:
    n = int(value)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _positive_float(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run options")
    g.add_argument("--threads", type=_threads, default="auto", help="worker threads (default: auto)")
    g.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET,
                   help="cap on tuple-slot evaluations")
    g.add_argument("--tolerance", type=_positive_float, default=DEFAULT_TOLERANCE)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("csv", "json", "tsv"), default=None)
    g.add_argument("--cache-dir", default=None,
                   help=f"cache directory (env CAYLEY_CACHE_DIR, default {DEFAULT_CACHE_DIR})")
    g.add_argument("--no-cache", action="store_true")
    g.add_argument("--output", "-o", default=None, help="write to file instead of stdout")
    g.add_argument("--timing", action="store_true", help="add wall time to JSON meta")
    return p


def _parity(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--even", dest="odd", action="store_false", help="S = T u -T (default)")
    g.add_argument("--odd", dest="odd", action="store_true", help="S = T u -T u {0}")
    p.set_defaults(odd=False)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="cayley", description="Spectral statistics of circulant graphs.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues of one circulant graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gen", type=int, nargs="+", required=True)
    _parity(p)

    p = sub.add_parser("density", parents=[common], help="mass of the k-fold arcsine law on [c, d]")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--method", choices=("quadrature", "mc"), default="quadrature")
    p.add_argument("--samples", type=_positive_int, default=1_000_000)

    p = sub.add_parser("prob", parents=[common], help="probability that an eigenvalue lies in [a, b]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--path", choices=("exact", "fast", "both"), default="exact")
    _parity(p)

    p = sub.add_parser("sweep", parents=[common], help="exact probability over a grid of n, with slope")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n-list", type=int, nargs="+")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--step", type=int, default=2)
    _parity(p)

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("suite", nargs="?", default="all", choices=(*verify_mod.SUITES, "all"))

    p = sub.add_parser("histogram", parents=[common], help="eigenvalue histogram with limit overlay")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--bins", type=int, default=20)
    _parity(p)

    p = sub.add_parser("ihara", parents=[common], help="Ihara polynomial, zeta inverse, poles")
    p.add_argument("what", choices=("polynomial", "zeta", "poles", "ramanujan"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gen", type=int, nargs="+")
    p.add_argument("--k", type=int, help="tuple size for 'ramanujan'")
    _parity(p)
    return ap


# --- commands -----------------------------------------------------------------

def cmd_spectrum(args) -> int:
    spec = CayleySpec.build(args.n, args.gen, args.odd)
    values = spectrum(spec).values
    rows = [{"m": m, "eigenvalue": float(v)} for m, v in enumerate(values)]
    _emit(args, render(("m", "eigenvalue"), rows, args.format or "csv", _meta(args, args.started)))
    return EXIT_OK


def cmd_density(args) -> int:
    if args.method == "mc":
        est = conv_mass_mc(args.k, args.c, args.d, args.samples, args.seed, args.threads)
    else:
        est = conv_mass(args.k, args.c, args.d, args.tolerance)
    row = {"k": args.k, "c": args.c, "d": args.d, "value": est.value,
           "uncertainty": est.uncertainty, "method": est.method,
           "tolerance": args.tolerance if args.method == "quadrature" else None,
           "samples": est.samples, "seed": args.seed if args.method == "mc" else None,
           "panels": est.panels}
    cols = ("k", "c", "d", "value", "uncertainty", "method", "tolerance", "samples", "seed", "panels")
    _emit(args, render(cols, [row], args.format or "csv", _meta(args, args.started)))
    return EXIT_OK


def _cosine_interval(a: float, b: float, k: int, odd: bool):
    r = 2 * k + int(odd)
    return interval_map((a, b), r).I_clamped


def _with_J(rec: SweepRecord, a: float, b: float) -> dict:
    row = rec.row()
    row["a"], row["b"] = a, b
    return row


BOTH_COLUMNS = SweepRecord.CSV_COLUMNS + ("fast_count", "fast_probability", "deviation",
                                          "deviation_budget")


def cmd_prob(args) -> int:
    c, d = _cosine_interval(args.a, args.b, args.k, args.odd)
    kw = dict(odd=args.odd, budget=args.budget, tolerance=args.tolerance, seed=args.seed)
    cols = SweepRecord.CSV_COLUMNS
    if args.path == "fast":
        row = _with_J(prob_fast(args.n, args.k, (c, d), **kw), args.a, args.b)
    else:
        exact = prob_exact(args.n, args.k, (c, d), threads=args.threads, **kw)
        row = _with_J(exact, args.a, args.b)
        if args.path == "both":
            fast = prob_fast(args.n, args.k, (c, d), **kw)
            row.update(fast_count=fast.fast_count, fast_probability=fast.probability,
                       deviation=abs(fast.probability - exact.probability),
                       deviation_budget=fast.fast_budget / exact.count_total)
            cols = BOTH_COLUMNS
    _emit(args, render(cols, [row], args.format or "csv", _meta(args, args.started)))
    return EXIT_OK


def _sweep_grid(args) -> list[int]:
    if args.n_list:
        grid = list(args.n_list)
    elif args.n_min is not None and args.n_max is not None:
        if args.step < 1:
            raise ValidationError("step must be positive")
        grid = list(range(args.n_min, args.n_max + 1, args.step))
    else:
        raise ValidationError("sweep needs --n-list or both --n-min and --n-max")
    for n in grid:
        check_modulus(n)
    return grid


def cmd_sweep(args) -> int:
    grid = _sweep_grid(args)
    c, d = _cosine_interval(args.a, args.b, args.k, args.odd)
    cache = Cache(resolve_cache_dir(args.cache_dir), not args.no_cache)
    rows = []
    for n in grid:
        key = cache_key("sweep", n=n, k=args.k, odd=args.odd, interval=[args.a, args.b],
                        method="exact/quadrature", tolerance=args.tolerance, seed=args.seed)
        row = cache.get(key)
        if row is None:
            try:
                rec = prob_exact(n, args.k, (c, d), odd=args.odd, threads=args.threads,
                                 budget=args.budget, tolerance=args.tolerance, seed=args.seed)
            except BudgetExceeded as exc:
                raise BudgetExceeded(f"sweep stopped at n={n}: {exc}") from exc
            row = _with_J(rec, args.a, args.b)
            cache.put(key, row)
        rows.append(row)
    slope, status = fit_slope([r["n"] for r in rows], [r["abs_error"] for r in rows])
    rows.append({"n": "slope", "k": args.k, "abs_error": slope,
                 "method": "least-squares" if status == "ok" else status})
    _emit(args, render(SweepRecord.CSV_COLUMNS, rows, args.format or "csv", _meta(args, args.started)))
    return EXIT_OK


def cmd_verify(args) -> int:
    failed = 0
    lines = []
    for check in verify_mod.run(args.suite):
        lines.append(check.line())
        failed += check.passed is False
    lines.append(f"{'FAILED' if failed else 'OK'}: {failed} failing check(s)")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_histogram(args) -> int:
    h = eigen_histogram(args.n, args.k, args.odd, args.bins, args.budget, args.tolerance)
    freq = h.frequencies
    rows = [{"bin_lo": float(h.edges[i]), "bin_hi": float(h.edges[i + 1]),
             "empirical_frequency": float(freq[i]), "predicted_mass": float(h.predicted[i])}
            for i in range(len(h.counts))]
    cols = ("bin_lo", "bin_hi", "empirical_frequency", "predicted_mass")
    _emit(args, render(cols, rows, args.format or "tsv", _meta(args, args.started)))
    return EXIT_OK


def cmd_ihara(args) -> int:
    fmt = args.format or "csv"
    meta = _meta(args, args.started)
    if args.what == "ramanujan":
        if args.k is None:
            raise ValidationError("ihara ramanujan needs --k")
        rf = ramanujan_fraction(args.n, args.k, args.odd, args.budget, args.tolerance)
        row = {"n": rf.n, "k": rf.k, "r": rf.r, "inside": rf.inside, "total": rf.total,
               "fraction": rf.fraction, "predicted": rf.predicted}
        _emit(args, render(tuple(row), [row], fmt, meta))
        return EXIT_OK
    if not args.gen:
        raise ValidationError(f"ihara {args.what} needs --gen")
    spec = CayleySpec.build(args.n, args.gen, args.odd)
    if args.what == "poles":
        rows = []
        for m, lam in enumerate(spectrum(spec).values):
            pp = pole_pair(float(lam), spec.r)
            rows.append({"m": m, "alpha": float(lam),
                         "re_plus": pp.u_plus.real, "im_plus": pp.u_plus.imag,
                         "re_minus": pp.u_minus.real, "im_minus": pp.u_minus.imag,
                         "on_circle": pp.on_circle})
        cols = ("m", "alpha", "re_plus", "im_plus", "re_minus", "im_minus", "on_circle")
        _emit(args, render(cols, rows, fmt, meta))
        return EXIT_OK
    poly = ihara_polynomial(spec) if args.what == "polynomial" else zeta_inverse(spec)
    rows = [{"power": i, "coefficient": float(c)} for i, c in enumerate(poly.coefficients)]
    _emit(args, render(("power", "coefficient"), rows, fmt, meta))
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "density": cmd_density,
    "prob": cmd_prob,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "histogram": cmd_histogram,
    "ihara": cmd_ihara,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    args.started = time.perf_counter()
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ToleranceNotMet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
