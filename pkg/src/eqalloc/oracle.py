"""Exhaustive ground truth for small scenarios.

Everything here enumerates complete allocations directly and shares no code
with the solvers beyond utility evaluation, so the solvers can be checked
against it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

from .core import (
    Allocation,
    LimitsExceeded,
    NonIntegerData,
    Scenario,
    UnsupportedScenario,
    WelfareReport,
    div,
    leq,
    less,
    lex_compare,
    welfare_report,
)

OBJECTIVES = ("utilitarian", "rawlsian", "leximin", "nash", "min_twd")


@dataclass(frozen=True)
class OracleLimits:
    max_total_items: int = 12
    max_agents: int = 4
    max_types: int = 2
    max_allocations: int = 10 ** 6


def compositions(m: int, n: int) -> Iterator[tuple]:
    """All ``n``-tuples of non-negative integers summing to ``m``, first entry largest first."""
    if n == 1:
        yield (m,)
        return
    for first in range(m, -1, -1):
        for rest in compositions(m - first, n - 1):
            yield (first,) + rest


def allocation_count(s: Scenario) -> int:
    return math.prod(math.comb(c + s.n - 1, s.n - 1) for c in s.counts)


def _check_limits(s: Scenario, limits: OracleLimits) -> None:
    if s.m > limits.max_total_items or s.n > limits.max_agents or s.k > limits.max_types:
        raise LimitsExceeded(
            f"oracle handles at most {limits.max_total_items} items, {limits.max_agents} agents "
            f"and {limits.max_types} types; got {s.m}, {s.n}, {s.k}"
        )
    if allocation_count(s) > limits.max_allocations:
        raise LimitsExceeded(f"{allocation_count(s)} allocations exceed {limits.max_allocations}")


def enumerate_allocations(s: Scenario, limits: OracleLimits = OracleLimits()) -> Iterator[Allocation]:
    """Every complete allocation exactly once, in lexicographically decreasing order."""
    _check_limits(s, limits)
    per_type = [list(compositions(c, s.n)) for c in s.counts]
    for cols in itertools.product(*per_type):
        yield Allocation(tuple(tuple(col[i] for col in cols) for i in range(s.n)))


def _nash_key(s: Scenario, x: Allocation) -> float:
    vec = x.vector
    if 0 in vec:
        return -math.inf
    return math.fsum(float(s.w(i)) * math.log(vec[i]) for i in range(s.n))


def oracle_best(s: Scenario, objective: str, limits: OracleLimits = OracleLimits()) -> WelfareReport:
    """Best allocation for ``objective`` by full enumeration (first found wins ties)."""
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
    if objective != "utilitarian" and s.scalar_weights() is None:
        raise UnsupportedScenario(f"{objective} needs one weight per agent")
    if objective == "nash":
        s.require_single_type("Nash oracle")
    eps = s.eps
    best = best_key = None
    for x in enumerate_allocations(s, limits):
        r = welfare_report(s, x)
        if objective == "utilitarian":
            key, better = r.utilitarian, lambda a, b: less(b, a, eps)
        elif objective == "rawlsian":
            key, better = r.rawlsian, lambda a, b: less(b, a, eps)
        elif objective == "leximin":
            key, better = tuple(sorted(r.ratios)), lambda a, b: lex_compare(a, b, eps) > 0
        elif objective == "nash":
            key = _nash_key(s, x)
            better = lambda a, b: a > b and not (math.isfinite(a) and math.isfinite(b) and leq(a, b, eps))
        else:
            key, better = r.twd, lambda a, b: less(a, b, eps)
        if best is None or better(key, best_key):
            best, best_key = r, key
    best.objective = objective
    best.value = {"utilitarian": best.utilitarian, "rawlsian": best.rawlsian,
                  "leximin": best.rawlsian, "min_twd": best.twd}.get(objective, best_key)
    if objective == "leximin":
        best.extras["sorted_ratios"] = best_key
    if objective == "nash":
        best.extras["log_nash"] = best_key
    return best


def oracle_wmms(s: Scenario, limits: OracleLimits = OracleLimits()):
    """Weighted maximin shares by enumerating every split, and whether all can be met at once."""
    s.require_single_type("WMMS oracle")
    _check_limits(s, limits)
    eps = s.eps
    w = [s.w(i) for i in range(s.n)]
    splits = list(compositions(s.m, s.n))
    shares = []
    for i in range(s.n):
        f = s.f(i)
        best = None
        for d in splits:
            worst = min(div(w[i] * f(d[j]), w[j]) for j in range(s.n))
            if best is None or less(best, worst, eps):
                best = worst
        shares.append(best)
    exists = any(
        all(leq(shares[i], s.f(i)(x[i]), eps) for i in range(s.n)) for x in splits
    )
    return tuple(shares), exists


def oracle_min_coins(s: Scenario, limits: OracleLimits = OracleLimits()) -> int:
    """Fewest coins that make some allocation weighted-equitable.

    Coins are worth ``1 / w_j`` for a chosen agent ``j`` who receives none of
    them.  Needs integer weights and integer utilities.  Candidate counts are
    tried upwards from zero.
    """
    s.require_single_type("coin oracle")
    w = [s.w(i) for i in range(s.n)]
    if not all(isinstance(v, int) for v in w):
        raise NonIntegerData("coin oracle needs integer weights")
    rows = []
    for x in enumerate_allocations(s, limits):
        u = [s.f(i)(x.vector[i]) for i in range(s.n)]
        if not all(isinstance(v, int) for v in u):
            raise NonIntegerData("coin oracle needs integer utilities")
        rows.append(u)
    candidates = set()
    for u in rows:
        for j in range(s.n):
            # with j holding no coins the common ratio is u_j / w_j, fixing every transfer
            y = [u[j] * w[i] - u[i] * w[j] for i in range(s.n)]
            if all(v >= 0 for v in y):
                candidates.add(sum(y))
    t = 0
    while t not in candidates:
        t += 1
    return t

