"""Command-line front end.

Exit codes: 0 success, 2 invalid input or flags, 3 solver precondition failure.

Examples::

    eqalloc solve scenario.json --objective rawlsian
    eqalloc psi scenario.json --pivot A2
    eqalloc coins scenario.json --output table
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import deficit, oracle, shares, welfare
from .core import (
    PROPERTIES,
    Allocation,
    EqallocError,
    Scenario,
    SolverError,
    UnreachableValue,
    WelfareReport,
    check_concave,
    check_fairness,
    div,
)
from .io import SCHEMA, dumps, format_number, loads_scenario, scenario_to_dict

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3

SOLVE_OBJECTIVES = ("utilitarian", "rawlsian", "maximin", "leximin", "nash", "wefx", "balanced-efx")
ORACLE_OBJECTIVES = oracle.OBJECTIVES + ("wmms", "min_coins")
COUNT_FIELDS = ("case", "swept_items", "items")


class UsageError(EqallocError):
    pass


def _fmt_list(values):
    return None if values is None else [format_number(v) for v in values]


def _name(s: Scenario, i: Optional[int]):
    return None if i is None else s.agent_names[i]


def _ratios(s: Scenario, utilities):
    w = s.scalar_weights()
    return None if w is None else [div(u, wi) for u, wi in zip(utilities, w)]


def report_dict(r, s: Scenario) -> dict:
    """Plain-JSON view of any result object."""
    if isinstance(r, WelfareReport):
        out = {
            "objective": r.objective,
            "value": format_number(r.value),
            "allocation": r.allocation.to_list(),
            "utilities": _fmt_list(r.utilities),
            "ratios": _fmt_list(r.ratios),
            "utilitarian": format_number(r.utilitarian),
            "rawlsian": format_number(r.rawlsian),
            "twd": format_number(r.twd),
            "pivot": _name(s, r.pivot),
        }
        for key, v in r.extras.items():
            if key in COUNT_FIELDS:
                out[key] = v
            else:
                out[key] = _fmt_list(v) if isinstance(v, tuple) else format_number(v)
        return out
    if isinstance(r, deficit.DeficitResult):
        items = r.pivot_items
        return {
            "psi": format_number(r.twd),
            "pivot": _name(s, r.pivot),
            "pivot_items": list(items) if isinstance(items, tuple) else items,
            "allocation": r.allocation.to_list(),
            "utilities": _fmt_list(r.utilities),
            "ratios": _fmt_list(_ratios(s, r.utilities)),
        }
    if isinstance(r, deficit.CoinPlan):
        vec = r.allocation.vector
        base = [s.f(i)(vec[i]) * r.scale for i in range(s.n)]
        final = [div(base[i] + r.transfers[i] * r.denomination, s.w(i)) for i in range(s.n)]
        return {
            "pivot": _name(s, r.pivot),
            "denomination": format_number(r.denomination),
            "transfers": list(r.transfers),
            "total_coins": r.total_coins,
            "scale": r.scale,
            "allocation": r.allocation.to_list(),
            "final_ratios": _fmt_list(final),
        }
    if isinstance(r, tuple):
        return {"shares": _fmt_list(r)}
    raise TypeError(f"cannot serialise {type(r).__name__}")


def _table(d: dict, s: Scenario) -> str:
    """Figure-style grid: one row per agent plus the scalar fields."""
    cols = [("agent", list(s.agent_names))]
    w = s.scalar_weights()
    cols.append(("weight", [format_number(v) for v in w] if w else ["-"] * s.n))
    for key in ("allocation", "utilities", "ratios", "shares", "transfers", "final_ratios"):
        vals = d.get(key)
        if isinstance(vals, list) and len(vals) == s.n:
            cols.append((key, [str(v) for v in vals]))
    widths = [max(len(h), *(len(v) for v in vals)) for h, vals in cols]
    lines = [" | ".join(h.ljust(wd) for (h, _), wd in zip(cols, widths))]
    lines.append("-+-".join("-" * wd for wd in widths))
    for i in range(s.n):
        lines.append(" | ".join(vals[i].ljust(wd) for (_, vals), wd in zip(cols, widths)))
    for key, v in d.items():
        if key in ("schema", "command") or (isinstance(v, list) and len(v) == s.n):
            continue
        lines.append(f"{key}: {v}")
    return "\n".join(lines)


def emit_report(r, s: Scenario, fmt: str = "json", command: str = None) -> str:
    d = {"schema": SCHEMA, "command": command}
    d.update(r if isinstance(r, dict) else report_dict(r, s))
    return dumps(d) if fmt == "json" else _table(d, s)


def _parse_allocation(text: str, s: Scenario) -> Allocation:
    try:
        if ";" in text:
            rows = [[int(v) for v in row.split(",")] for row in text.split(";")]
            return Allocation(tuple(tuple(r) for r in rows))
        return Allocation.from_vector(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse allocation {text!r}; use '3,2,1,1' or '1,0;0,1'") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="scenario JSON file, or '-' for stdin")
    common.add_argument("--epsilon", type=float, default=None,
                        help="comparison tolerance for power/log utilities (default 1e-9)")
    common.add_argument("--seed", type=int, default=None,
                        help="recorded in the output; the solvers are deterministic")
    common.add_argument("--output", choices=("json", "table"), default="json")

    parser = argparse.ArgumentParser(prog="eqalloc", description="Fair division of identical goods.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="optimal or fair allocation")
    p.add_argument("--objective", choices=SOLVE_OBJECTIVES, default="leximin")
    p.add_argument("--items", type=int, default=None, help="items to allocate (rawlsian only)")

    p = sub.add_parser("check", parents=[common], help="test a fairness property")
    p.add_argument("--property", required=True, type=str.upper, choices=PROPERTIES)
    p.add_argument("--allocation", required=True, help="counts, e.g. '3,2,1,1'")

    p = sub.add_parser("psi", parents=[common], help="minimum total weighted deficit")
    p.add_argument("--pivot", default=None, help="agent name or 1-based index")
    p.add_argument("--per-type", action="store_true", help="solve each item type separately")
    p.add_argument("--incremental", action="store_true",
                   help="raise the pivot item by item instead of scanning its bundle size (upper bound)")

    p = sub.add_parser("coins", parents=[common], help="coin compensation to equitability")
    p.add_argument("--no-scale", action="store_true", help="require integer utilities")

    sub.add_parser("shares", parents=[common], help="weighted maximin shares")

    p = sub.add_parser("oracle", parents=[common], help="exhaustive ground truth")
    p.add_argument("--objective", choices=ORACLE_OBJECTIVES, required=True)

    sub.add_parser("validate", parents=[common], help="check a scenario file")
    return parser


def _read_scenario(args) -> Scenario:
    if args.scenario == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.scenario}: {exc.strerror}") from None
    s = loads_scenario(text)
    if args.epsilon is not None:
        if s.is_exact:
            raise UsageError("--epsilon only applies to power/log utilities; this scenario is exact")
        if not args.epsilon > 0:
            raise UsageError("--epsilon must be positive")
        s = s.with_eps(args.epsilon)
    return s


def _dispatch(args, s: Scenario):
    cmd = args.command
    if cmd == "validate":
        return {
            "valid": True, "agents": s.n, "types": s.k, "items": s.m, "exact": s.is_exact,
            "concave": all(check_concave(f, s.counts[j]) for row in s.utilities
                           for j, f in enumerate(row)),
            "scenario": scenario_to_dict(s),
        }
    if cmd == "solve":
        obj = args.objective
        if args.items is not None and obj not in ("rawlsian", "maximin"):
            raise UsageError("--items only applies to the rawlsian objective")
        if obj == "utilitarian":
            return welfare.solve_utilitarian(s)
        if obj in ("rawlsian", "maximin"):
            return welfare.solve_maximin(s, args.items)
        if obj == "leximin":
            return welfare.solve_leximin(s)
        if obj == "nash":
            return welfare.solve_nash(s)
        x = shares.construct_wefx(s) if obj == "wefx" else shares.construct_balanced_efx(s)
        r = welfare.welfare_report(s, x, objective=obj)
        r.extras["fair"] = bool(check_fairness(s, x, "WEFX"))
        return r
    if cmd == "check":
        x = _parse_allocation(args.allocation, s)
        res = check_fairness(s, x, args.property)
        return {
            "property": args.property,
            "allocation": x.to_list(),
            "holds": res.holds,
            "witness": None if res.witness is None else [s.agent_names[i] for i in res.witness],
        }
    if cmd == "psi":
        if args.per_type:
            if args.pivot is not None or args.incremental:
                raise UsageError("--per-type cannot be combined with --pivot or --incremental")
            parts = deficit.psi_per_type(s)
            out = []
            for j, r in enumerate(parts):
                entry = {"type": s.type_names[j]}
                if r is not None:
                    entry.update(report_dict(r, s.restrict_to_type(j)))
                out.append(entry)
            total = sum(r.twd for r in parts if r is not None)
            return {"per_type": out, "psi": format_number(total)}
        pivot = None if args.pivot is None else s.agent_index(args.pivot)
        if args.incremental:
            if pivot is None:
                raise UsageError("--incremental needs --pivot")
            return deficit.psi_p_incremental(s, pivot)
        if s.k > 1:
            return deficit.psi_multitype(s, pivot)
        return deficit.psi(s) if pivot is None else deficit.psi_p(s, pivot)
    if cmd == "coins":
        return deficit.coin_compensation(s, scale=not args.no_scale)
    if cmd == "shares":
        mu = shares.compute_wmms_shares(s)
        exists, x = shares.decide_wmms(s, mu)
        return {"shares": _fmt_list(mu), "exists": exists,
                "allocation": None if x is None else x.to_list()}
    if cmd == "oracle":
        obj = args.objective
        if obj == "wmms":
            mu, exists = oracle.oracle_wmms(s)
            return {"shares": _fmt_list(mu), "exists": exists}
        if obj == "min_coins":
            return {"min_coins": oracle.oracle_min_coins(s)}
        return oracle.oracle_best(s, obj)
    raise UsageError(f"unknown command {cmd}")  # pragma: no cover


def run(argv: Sequence[str] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=stderr)
    try:
        s = _read_scenario(args)
        result = _dispatch(args, s)
        if isinstance(result, dict):
            result = dict(result)
        text = emit_report(result, s, args.output, args.command)
    except (SolverError, UnreachableValue) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_SOLVER
    except (EqallocError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - report, never dump a traceback
        print(f"error: unexpected {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_SOLVER
    if args.seed is not None and args.output == "json":
        text = text[:-1].rstrip() + f',\n  "seed": {args.seed}\n}}'
    print(text, file=stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
