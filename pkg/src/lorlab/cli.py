"""Command-line entry point: ``lorlab decide | verify | constants``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

from .counterexamples import (
    FAMILIES,
    InfeasibleGrid,
    measure_ratio,
    natural_family,
    select_family,
)
from .measure import INF
from .oracle import EmbeddingQuery, PAIRS, decide, parse_exponent
from .triangle import empirical_constant

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3
QUERY_KEYS = ("pair", "d", "s0", "p0", "q0", "r0", "s1", "p1", "q1", "r1")
EXPECTED = {True: "bounded", False: "growth"}


class UsageError(Exception):
    pass


def _exponent(text: str):
    try:
        return parse_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _number_list(text) -> list:
    if isinstance(text, list):
        items = text
    else:
        items = [t for t in str(text).split(",") if t.strip()]
    try:
        return [parse_exponent(t) for t in items]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_query(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pair", choices=PAIRS)
    p.add_argument("--d", type=int)
    for name in QUERY_KEYS[2:]:
        p.add_argument(f"--{name}", type=_exponent)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorlab", description="Embeddings between Besov and "
                                     "Triebel-Lizorkin spaces over Lorentz spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide whether an embedding holds")
    _add_query(p)

    p = sub.add_parser("verify", help="measure norm ratios of a test-function family")
    _add_query(p)
    p.add_argument("--sizes", help="comma-separated family sizes")
    p.add_argument("--family", choices=FAMILIES, help="override the chosen family")
    p.add_argument("--csv", dest="csv_path", help="write the ratio table here")
    p.add_argument("--json", dest="json_path", help="write the summary here")
    p.add_argument("--config", help="JSON file with defaults for any of the flags")

    p = sub.add_parser("constants", help="sweep triangle-inequality constants")
    p.add_argument("--p-grid", dest="p_grid", help="comma-separated p values")
    p.add_argument("--r-grid", dest="r_grid", help="comma-separated r values, 'inf' allowed")
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--csv", dest="csv_path", help="write the sweep here")
    p.add_argument("--svg", dest="svg_path", help="write a plot of empirical vs bound")
    p.add_argument("--config", help="JSON file with defaults for any of the flags")
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    aliases = {"csv": "csv_path", "json": "json_path", "svg": "svg_path",
               "p-grid": "p_grid", "r-grid": "r_grid"}
    for key, value in cfg.items():
        dest = aliases.get(key, key)
        if dest in ("command", "config") or not hasattr(args, dest):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            if dest in QUERY_KEYS[2:]:
                try:
                    value = parse_exponent(value)
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
            setattr(args, dest, value)


def _query(args: argparse.Namespace) -> EmbeddingQuery:
    missing = [k for k in QUERY_KEYS if k != "d" and getattr(args, k) is None]
    if missing:
        raise UsageError("missing query parameters: " + ", ".join(missing))
    if args.pair not in PAIRS:
        raise UsageError(f"pair must be one of {PAIRS}")
    d = 1 if args.d is None else int(args.d)
    try:
        return EmbeddingQuery.build(args.pair, d, *(getattr(args, k) for k in QUERY_KEYS[2:]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_decide(args: argparse.Namespace) -> int:
    v = decide(_query(args))
    print(json.dumps(v.as_dict(), sort_keys=True))
    return EXIT_OK


def _override(spec, family: str, q: EmbeddingQuery):
    if family == spec.family:
        return spec
    extra = {}
    if family == "log":
        p = float(q.source.p)
        extra = {"p": p, "delta": spec.delta if spec.delta is not None else 1.0 / p}
    if family == "critical_h":
        extra = {"gamma": -float(q.source.s) + q.d / float(q.source.p)}
    return replace(spec, family=family, N=max(spec.N, 2), **extra)


def cmd_verify(args: argparse.Namespace) -> int:
    _apply_config(args)
    q = _query(args)
    v = decide(q)
    spec = natural_family(q) if v.holds else select_family(q, v)
    if args.family:
        spec = _override(spec, args.family, q)
    sizes = None
    if args.sizes is not None:
        sizes = [int(x) for x in _number_list(args.sizes)]
        if len(sizes) < 2 or min(sizes) < 2:
            raise UsageError("need at least two sizes, each >= 2")
    try:
        table = measure_ratio(q, spec, sizes)
    except InfeasibleGrid as exc:
        print(f"lorlab: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    summary = table.summary()
    summary.update({"holds": v.holds, "clause": v.clause, "theorem": v.theorem,
                    "expected": EXPECTED[v.holds]})
    summary["consistent"] = table.classification == EXPECTED[v.holds]
    text = json.dumps(summary, sort_keys=True)
    _emit(table.to_csv(), args.csv_path)
    _emit(text + "\n", args.json_path)
    return EXIT_OK if summary["consistent"] else EXIT_MISMATCH


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(x) -> str:
    if x is None:
        return ""
    if x == INF:
        return "inf"
    return repr(float(x))


CONSTANT_COLUMNS = ("p", "r", "status", "empirical_lower", "analytic_bound_mod_A", "stw_bound",
                    "bks_constant", "hardy_constant", "evaluations")


def constant_rows(ps, rs, budget: int, seed: int) -> list[dict]:
    rows = []
    for p in ps:
        for r in rs:
            row = {"p": p, "r": r}
            if not (0 < p < INF) or not r > 0:
                row["status"] = "domain error: need 0 < p < inf and r > 0"
                rows.append(row)
                continue
            rep = empirical_constant(float(p), float(r), budget, seed)
            row.update(rep.as_dict())
            row["status"] = "ok"
            rows.append(row)
    return rows


def constants_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONSTANT_COLUMNS)
    for row in rows:
        w.writerow([row["status"] if c == "status" else
                    str(row.get(c, "")) if c == "evaluations" else _fmt(row.get(c))
                    for c in CONSTANT_COLUMNS])
    return buf.getvalue()


def constants_svg(rows: list[dict], path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "lorlab"
    fig, ax = plt.subplots(figsize=(6, 4))
    for p in sorted({row["p"] for row in rows if row["status"] == "ok"}):
        sel = [row for row in rows if row["p"] == p and row["status"] == "ok" and row["r"] != INF]
        if not sel:
            continue
        rs = [float(row["r"]) for row in sel]
        ax.plot(rs, [row["empirical_lower"] for row in sel], "o-", label=f"empirical, p={float(p):g}")
        bound = [(float(row["r"]), row["analytic_bound_mod_A"]) for row in sel
                 if row.get("analytic_bound_mod_A") is not None]
        if bound:
            ax.plot(*zip(*bound), "s--", label=f"bound / A^(1/p), p={float(p):g}")
    ax.set_xlabel("r")
    ax.set_ylabel("triangle constant")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_constants(args: argparse.Namespace) -> int:
    _apply_config(args)
    if args.p_grid is None or args.r_grid is None:
        raise UsageError("--p-grid and --r-grid are required")
    ps = _number_list(args.p_grid)
    rs = _number_list(args.r_grid)
    if not ps or not rs:
        raise UsageError("empty grid")
    budget = 10_000 if args.budget is None else int(args.budget)
    seed = 0 if args.seed is None else int(args.seed)
    if budget < 1:
        raise UsageError("budget must be at least 1")
    rows = constant_rows(ps, rs, budget, seed)
    _emit(constants_csv(rows), args.csv_path)
    if args.svg_path:
        constants_svg(rows, args.svg_path)
    return EXIT_OK


COMMANDS = {"decide": cmd_decide, "verify": cmd_verify, "constants": cmd_constants}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"lorlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
