"""Command-line front end: ``qhal build|sweep|rank|score``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from . import bell
from .corpus import load_documents, normalize_query_word
from .hal import CacheFormatError
from .observables import op_A, op_Ax, op_B, op_Bminus, op_Bplus, op_Bx
from .qspace import DEGENERATE_EPS

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INTERNAL = 4

CACHE_ENV = "QHAL_CACHE_DIR"


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    docs: tuple[str, ...] = ()
    query: tuple[str, str] | None = None
    l_min: int = bell.DEFAULT_L_MIN
    l_max: int = bell.DEFAULT_L_MAX
    cache_dir: str | None = None
    format: str = "csv"
    workers: int = 1
    tie_tol: float = bell.DELTA_TIE
    plateau_tol: float = bell.DELTA_PLATEAU
    degenerate_eps: float = DEGENERATE_EPS

    def validate(self, need_query: bool = True) -> None:
        if not self.docs:
            raise UsageError("no documents given (--docs)")
        if need_query:
            if self.query is None or len(self.query) != 2:
                raise UsageError("--query needs exactly two words")
            try:
                for w in self.query:
                    normalize_query_word(w)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        if self.l_min < 1:
            raise UsageError(f"--lmin must be >= 1, got {self.l_min}")
        if self.l_min > self.l_max:
            raise UsageError(f"--lmin ({self.l_min}) exceeds --lmax ({self.l_max})")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        for name in ("tie_tol", "plateau_tol", "degenerate_eps"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be > 0")

    def sweep_options(self) -> bell.SweepOptions:
        return bell.SweepOptions(eps=self.degenerate_eps, cache_dir=self.cache_dir, workers=self.workers)


# argparse dest -> RunConfig field
_FIELDS = {
    "docs": "docs",
    "query": "query",
    "lmin": "l_min",
    "lmax": "l_max",
    "cache_dir": "cache_dir",
    "format": "format",
    "workers": "workers",
    "tie_tol": "tie_tol",
    "plateau_tol": "plateau_tol",
    "degenerate_eps": "degenerate_eps",
}


def _coerce(key: str, value):
    if key in ("docs",):
        return tuple(value) if isinstance(value, (list, tuple)) else (value,)
    if key == "query":
        return tuple(value)
    return value


def resolve_config(args: argparse.Namespace, default_format: str = "csv") -> RunConfig:
    """Flags override the config file, which overrides the environment and defaults."""
    values: dict = {"format": default_format}
    if os.environ.get(CACHE_ENV):
        values["cache_dir"] = os.environ[CACHE_ENV]
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError(f"config file {args.config}: expected a JSON object")
        for key, value in data.items():
            field = _FIELDS.get(key, key if key in _FIELDS.values() else None)
            if field is None:
                raise UsageError(f"config file {args.config}: unknown key {key!r}")
            values[field] = _coerce(field, value)
    for dest, field in _FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[field] = _coerce(field, value)
    if getattr(args, "no_cache", False):
        values["cache_dir"] = None
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _fmt(x: float) -> str:
    return repr(float(x))


def curves_csv(curves: Sequence[bell.BellCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["doc", "wordA", "wordB", "l", "S"])
    for c in curves:
        for pt in c.points:
            w.writerow([c.doc_id, c.word_a, c.word_b, pt.l, _fmt(pt.s)])
    return buf.getvalue()


def curves_json(curves: Sequence[bell.BellCurve]) -> str:
    obj = [
        {
            "doc": c.doc_id,
            "wordA": c.word_a,
            "wordB": c.word_b,
            "status": c.status.value,
            "points": [{"l": pt.l, "S": pt.s} for pt in c.points],
        }
        for c in curves
    ]
    return json.dumps(obj, indent=2) + "\n"


def state_csv(curves: Sequence[bell.BellCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["doc", "l", "status", "p", "alpha", "alpha_perp", "beta", "beta_perp"])
    for c in curves:
        for pt in c.points:
            st = pt.state
            coords = [_fmt(v) for v in (st.alpha, st.alpha_perp, st.beta, st.beta_perp)] if st else [""] * 4
            w.writerow([c.doc_id, pt.l, pt.status.value, "" if pt.p is None else _fmt(pt.p), *coords])
    return buf.getvalue()


def ops_csv(curves: Sequence[bell.BellCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["doc", "l", "op", "m11", "m12", "m21", "m22"])
    for c in curves:
        for pt in c.points:
            if pt.p is None:
                continue
            ops = {
                "A": op_A(),
                "Ax": op_Ax(),
                "B": op_B(pt.p),
                "Bx": op_Bx(pt.p),
                "Bplus": op_Bplus(pt.p),
                "Bminus": op_Bminus(pt.p),
            }
            for name, op in ops.items():
                w.writerow([c.doc_id, pt.l, name, *(_fmt(v) for v in (op.m11, op.m12, op.m21, op.m22))])
    return buf.getvalue()


def rank_json(result: bell.RankResult) -> str:
    return json.dumps(result.to_json_obj(), indent=2) + "\n"


def rank_csv(result: bell.RankResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "doc", "status", "l_star", "s_star", "plateau_width"])
    for i, e in enumerate(result.entries, start=1):
        pk = e.peak
        w.writerow([i, e.doc_id, e.status.value, pk.l_star if pk else "", _fmt(pk.s_star) if pk else "", pk.plateau_width if pk else ""])
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _sweep(cfg: RunConfig, args: argparse.Namespace) -> tuple[list[bell.BellCurve], int]:
    docs = load_documents(cfg.docs)
    a, b = cfg.query
    curves, built = bell.sweep_documents(docs, a, b, cfg.l_min, cfg.l_max, cfg.sweep_options())
    if args.dump_state:
        Path(args.dump_state).write_text(state_csv(curves), encoding="utf-8")
    if args.dump_ops:
        Path(args.dump_ops).write_text(ops_csv(curves), encoding="utf-8")
    return curves, built


def cmd_build(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, default_format="json")
    cfg.validate(need_query=False)
    if cfg.cache_dir is None:
        raise UsageError(f"build needs --cache-dir (or {CACHE_ENV})")
    docs = load_documents(cfg.docs)
    built, loaded = bell.build_matrices(docs, cfg.l_min, cfg.l_max, cfg.sweep_options())
    report = {"documents": len(docs), "built": built, "loaded": loaded, "cache_dir": str(cfg.cache_dir)}
    if cfg.format == "json":
        _emit(json.dumps(report) + "\n", args.output)
    else:
        _emit("documents,built,loaded\n" f"{len(docs)},{built},{loaded}\n", args.output)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    cfg.validate()
    curves, _ = _sweep(cfg, args)
    _emit(curves_csv(curves) if cfg.format == "csv" else curves_json(curves), args.output)
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, default_format="json")
    cfg.validate()
    curves, _ = _sweep(cfg, args)
    result = bell.rank_curves(curves, cfg.tie_tol, cfg.plateau_tol)
    _emit(rank_json(result) if cfg.format == "json" else rank_csv(result), args.output)
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    if args.window is not None:
        cfg = replace(cfg, l_min=args.window, l_max=args.window)
    cfg.validate()
    curves, _ = _sweep(cfg, args)
    _emit(curves_csv(curves) if cfg.format == "csv" else curves_json(curves), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--docs", nargs="+", metavar="PATH", help="document files or directories (UTF-8 text)")
    common.add_argument("--query", nargs=2, metavar=("A", "B"), help="the two query words, in order")
    common.add_argument("--lmin", type=int, help=f"smallest window length (default {bell.DEFAULT_L_MIN})")
    common.add_argument("--lmax", type=int, help=f"largest window length (default {bell.DEFAULT_L_MAX})")
    common.add_argument("--cache-dir", help=f"matrix cache directory (default ${CACHE_ENV})")
    common.add_argument("--no-cache", action="store_true", help="ignore any cache directory")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int, help="worker processes for the sweep (default 1)")
    common.add_argument("--tie-tol", type=float, help=f"peak tie tolerance (default {bell.DELTA_TIE})")
    common.add_argument("--plateau-tol", type=float, help=f"plateau tolerance (default {bell.DELTA_PLATEAU})")
    common.add_argument("--degenerate-eps", type=float, help=f"parallel-word threshold on p (default {DEGENERATE_EPS})")
    common.add_argument("--config", help="JSON config file; command-line flags take precedence")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--dump-state", metavar="FILE", help="write p, alpha, alpha_perp, beta, beta_perp per (doc, l) as CSV")
    common.add_argument("--dump-ops", metavar="FILE", help="write the 2x2 query operators per (doc, l) as CSV")

    parser = argparse.ArgumentParser(prog="qhal", description="Bell-parameter document scoring over HAL semantic spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="populate the matrix cache").set_defaults(func=cmd_build)
    sub.add_parser("sweep", parents=[common], help="S_query curves over a window range").set_defaults(func=cmd_sweep)
    sub.add_parser("rank", parents=[common], help="rank documents by earliest peak").set_defaults(func=cmd_rank)
    score = sub.add_parser("score", parents=[common], help="S_query at a single window length")
    score.add_argument("--l", dest="window", type=int, help="window length")
    score.set_defaults(func=cmd_score)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, bell.NoPeak) as exc:
        print(f"qhal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, CacheFormatError, UnicodeDecodeError) as exc:
        print(f"qhal: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"qhal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"qhal: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
