"""Command-line interface.

Exit codes: 0 success (or verification pass), 1 verification fail,
2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from functools import partial
from pathlib import Path
from typing import Any, Callable, Sequence

from .borel import BorelSet
from .errors import JumpMeasureError
from .levy import SimConfig, simulate_block
from .measure import CSV_HEADER, ProductSet, csv_row, integrate, measure
from .parallel import index_blocks, ordered_map
from .path import RegulatedPath, layered_decomposition
from .thin import exhaust_global, exhaust_restricted
from . import selftest
from .verify import BUILTIN_G, verify_compound_mean, verify_poisson_law

BLOCK = 500


class InputError(Exception):
    pass


def _read_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def load_paths(path: str) -> list[RegulatedPath]:
    """Paths from a JSON object, a JSON list or JSON lines."""
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
        objs = obj if isinstance(obj, list) else [obj]
    except json.JSONDecodeError:
        try:
            objs = [json.loads(line) for line in text.splitlines() if line.strip()]
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON lines: {exc}") from exc
    return [RegulatedPath.from_json(o) for o in objs]


def load_set(path: str) -> tuple[BorelSet, str]:
    obj = _read_json(path)
    set_id = str(obj.get("id", Path(path).stem)) if isinstance(obj, dict) else Path(path).stem
    return BorelSet.from_json(obj), set_id


class _Output:
    def __init__(self, target: str):
        self.target = target
        self.buffer = io.StringIO()

    def write(self, text: str) -> None:
        self.buffer.write(text)

    def flush(self) -> None:
        data = self.buffer.getvalue()
        if self.target == "-":
            sys.stdout.write(data)
            sys.stdout.flush()
        else:
            Path(self.target).write_text(data)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, allow_nan=False)


def _csv_text(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    return buf.getvalue()


def _chunks(items: list, size: int) -> list[tuple[int, list]]:
    return [(lo, items[lo:hi]) for lo, hi in index_blocks(len(items), size)]


# per-chunk workers; module level so they pickle

def _simulate_lines(args) -> str:
    cfg, lo, hi = args
    return "".join(_dumps(p.to_json()) + "\n" for p in simulate_block(cfg, lo, hi))


def _decompose_lines(args) -> str:
    (offset, paths), a, length = args
    out = []
    for i, path in enumerate(paths, offset):
        record = {
            "path_id": i,
            "cells": layered_decomposition(path).to_json(),
            "global": exhaust_global(path).to_json(),
            "restricted": None if a is None else exhaust_restricted(path, a, length).to_json(),
        }
        out.append(_dumps(record) + "\n")
    return "".join(out)


def _measure_rows(args) -> list[list]:
    (offset, paths), sets = args
    return [
        csv_row(i, b.t_max, b.id, measure(path, b), None)
        for i, path in enumerate(paths, offset)
        for b in sets
    ]


def _size_only(g: Callable[[float], float], s: float, x: float) -> float:
    return g(x)


def _integrate_rows(args) -> list[list]:
    (offset, paths), a, set_id, g, ts = args
    f = partial(_size_only, g)
    rows = []
    for i, path in enumerate(paths, offset):
        for t in ts:
            res = integrate(path, f, t, a)
            rows.append(csv_row(i, t, set_id, res.value, res.certificate))
    return rows


# subcommands

def cmd_simulate(args) -> int:
    cfg = SimConfig.from_json(_read_json(args.config))
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.n_paths is not None:
        cfg = cfg.replace(n_paths=args.n_paths)
    jobs = [(cfg, lo, hi) for lo, hi in index_blocks(cfg.n_paths, BLOCK)]
    out = _Output(args.out)
    for text in ordered_map(_simulate_lines, jobs, args.threads):
        out.write(text)
    out.flush()
    return 0


def cmd_decompose(args) -> int:
    paths = load_paths(args.path)
    a = load_set(args.set)[0] if args.set else None
    jobs = [(chunk, a, args.length) for chunk in _chunks(paths, BLOCK)]
    out = _Output(args.out)
    for text in ordered_map(_decompose_lines, jobs, args.threads):
        out.write(text)
    out.flush()
    return 0


def cmd_measure(args) -> int:
    paths = load_paths(args.paths)
    obj = _read_json(args.set)
    objs = obj if isinstance(obj, list) else [obj]
    sets = [ProductSet.from_json(o) for o in objs]
    jobs = [(chunk, sets) for chunk in _chunks(paths, BLOCK)]
    rows = [r for part in ordered_map(_measure_rows, jobs, args.threads) for r in part]
    out = _Output(args.out)
    out.write(_csv_text(rows))
    out.flush()
    return 0


def cmd_integrate(args) -> int:
    paths = load_paths(args.paths)
    a, set_id = load_set(args.set)
    g = BUILTIN_G[args.f]
    jobs = [(chunk, a, set_id, g, args.t) for chunk in _chunks(paths, BLOCK)]
    rows = [r for part in ordered_map(_integrate_rows, jobs, args.threads) for r in part]
    out = _Output(args.out)
    out.write(_csv_text(rows))
    out.flush()
    return 0


def cmd_verify(args) -> int:
    cfg = SimConfig.from_json(_read_json(args.config))
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.n_paths is not None:
        cfg = cfg.replace(n_paths=args.n_paths)
    a, _ = load_set(args.set)
    if args.which == "poisson":
        report = verify_poisson_law(cfg, a, args.t, workers=args.threads, threshold=args.threshold)
    else:
        report = verify_compound_mean(cfg, a, BUILTIN_G[args.g], args.t,
                                      workers=args.threads, threshold=args.threshold)
    out = _Output(args.out)
    out.write(json.dumps(report.to_json(), indent=2) + "\n")
    out.flush()
    return 0 if report.passed else 1


def cmd_selftest(args) -> int:
    results = selftest.run(seed=0 if args.seed is None else args.seed, cases=args.cases)
    out = _Output(args.out)
    for r in results:
        out.write(r.line() + "\n")
    out.flush()
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="override the RNG seed of the config (or of selftest)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file, '-' for stdout")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker processes; output does not depend on it")

    parser = argparse.ArgumentParser(prog="jumpmeasure", parents=[common],
                                     description="Jump sets, jump measures and Poisson checks for regulated paths.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate paths to JSON lines")
    p.add_argument("--config", required=True)
    p.add_argument("--n-paths", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decompose", parents=[common], help="layered cells and exhausting sequences")
    p.add_argument("--path", required=True, help="path JSON, JSON list or JSON lines")
    p.add_argument("--set", help="jump-size set JSON for the restricted sequence")
    p.add_argument("--length", type=int, help="restricted sequence length (default: number of jumps)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("measure", parents=[common], help="jump-measure counts as CSV")
    p.add_argument("--paths", required=True)
    p.add_argument("--set", required=True, help="product set JSON (or a list of them)")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("integrate", parents=[common], help="jump-measure integrals as CSV")
    p.add_argument("--paths", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--t", type=float, action="append", required=True, help="upper time limit (repeatable)")
    p.add_argument("--f", choices=sorted(BUILTIN_G), default="x", help="integrand of the jump size")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("verify", parents=[common], help="Monte-Carlo check of the Poisson laws")
    p.add_argument("which", choices=["poisson", "compound"])
    p.add_argument("--config", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--g", choices=sorted(BUILTIN_G), default="x")
    p.add_argument("--n-paths", type=int)
    p.add_argument("--threshold", type=float, default=4.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selftest", parents=[common], help="randomised oracle-equivalence checks")
    p.add_argument("--cases", type=int, default=500)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("seed", None), ("out", "-"), ("threads", 1)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (InputError, JumpMeasureError) as exc:
        print(f"jumpmeasure: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
