"""Welfare-optimal allocations of identical goods.

* ``solve_utilitarian``: item-by-item greedy on the largest weighted marginal
  gain, optimal when every utility is concave.
* ``solve_restricted_utilitarian``: the same greedy with an upper bound on
  each agent's utility.
* ``solve_nash``: weighted Nash welfare over bundle sizes.
* ``solve_maximin`` / ``solve_leximin``: a counter sweeping the merged,
  sorted sequence of weighted values ``f_i(j) / w_i``.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Callable, Optional, Sequence

from .core import (
    Allocation,
    NonConcaveUtility,
    Number,
    Scenario,
    SolverError,
    UnsupportedScenario,
    WelfareReport,
    check_concave,
    close,
    compare,
    div,
    eval_utility,
    is_exact,
    leq,
    welfare_report,
)

logger = logging.getLogger(__name__)


def require_concave(s: Scenario, agents: Sequence[int] = None) -> None:
    agents = range(s.n) if agents is None else agents
    for i in agents:
        for j in range(s.k):
            if not check_concave(s.utilities[i][j], s.counts[j]):
                raise NonConcaveUtility(
                    f"utility of agent {s.agent_names[i]} for type {s.type_names[j]} "
                    "is not concave; the greedy allocation is only optimal for concave utilities"
                )


def _pop_best(heap: list, eps: float, exact: bool):
    """Pop the entry with the largest gain, lowest slot on (tolerant) ties.

    Heap entries are ``(-gain, slot...)``.  With exact keys the heap order is
    already the tie-break order.
    """
    top = heapq.heappop(heap)
    if exact or not heap:
        return top
    tied = [top]
    while heap and close(heap[0][0], top[0], eps):
        tied.append(heapq.heappop(heap))
    best = min(tied, key=lambda e: e[1:])
    for e in tied:
        if e is not best:
            heapq.heappush(heap, e)
    return best


def _greedy(n_items: int, slots: Sequence[tuple], gain: Callable, allowed: Callable,
            stock: Optional[list], eps: float, exact: bool):
    """Hand out ``n_items`` one at a time to the slot with the largest gain.

    ``slots`` are ``(agent, type)`` pairs; ``gain(slot, x)`` is the marginal
    value of the ``x+1``-th item and ``allowed(slot, x)`` says whether slot
    may take it.  Slots that become disallowed never return, because every
    caller's constraint is monotone in ``x``.  Returns the counts per slot
    and the list of chosen gains, or ``None`` when stuck before the end.
    """
    counts = {slot: 0 for slot in slots}
    heap = [(-gain(slot, 0),) + slot for slot in slots if allowed(slot, 0)]
    heapq.heapify(heap)
    steps = []
    for _ in range(n_items):
        while True:
            if not heap:
                return counts, steps, False
            entry = _pop_best(heap, eps, exact)
            slot = entry[1:]
            if stock is not None and stock[slot[1]] == 0:
                continue
            x = counts[slot]
            if not allowed(slot, x):
                continue
            break
        counts[slot] = x + 1
        steps.append(-entry[0])
        if stock is not None:
            stock[slot[1]] -= 1
        if allowed(slot, x + 1):
            heapq.heappush(heap, (-gain(slot, x + 1),) + slot)
    return counts, steps, True


def _in_domain(f, x: int) -> bool:
    top = f.max_count
    return top is None or x <= top


def solve_utilitarian(s: Scenario) -> WelfareReport:
    """Maximise ``sum_ij w_ij f_ij(x_ij)`` for concave utilities.

    Each step gives the next item to the (agent, type) pair with the largest
    ``w_ij * (f_ij(x_ij + 1) - f_ij(x_ij))`` among types still in stock.
    The report's ``steps`` hold the chosen gains, so ``value`` is their sum.
    """
    require_concave(s)
    slots = [(i, j) for i in range(s.n) for j in range(s.k)]
    f, w = s.utilities, s.weights

    def gain(slot, x):
        i, j = slot
        fij = f[i][j]
        return w[i][j] * (fij._value(x + 1) - fij._value(x))

    def allowed(slot, x):
        i, j = slot
        return _in_domain(f[i][j], x + 1)

    counts, steps, done = _greedy(s.m, slots, gain, allowed, list(s.counts), s.eps, s.is_exact)
    if not done:  # pragma: no cover - tables are as long as the stock
        raise SolverError("greedy allocation ran out of extendible agents")
    x = Allocation(tuple(tuple(counts[(i, j)] for j in range(s.k)) for i in range(s.n)))
    report = welfare_report(s, x, objective="utilitarian")
    report.value = report.utilitarian
    report.steps = tuple(steps)
    return report


@dataclass(frozen=True)
class RestrictedResult:
    """Outcome of the capped utilitarian problem; infeasible means welfare ``-inf``."""

    counts: Optional[tuple]
    welfare: Number

    @property
    def feasible(self) -> bool:
        return self.counts is not None


INFEASIBLE = RestrictedResult(None, -math.inf)


def solve_restricted_utilitarian(
    s: Scenario,
    bounds: Sequence[Number],
    m: int = None,
    *,
    agents: Sequence[int] = None,
    weights: Sequence[Number] = None,
) -> RestrictedResult:
    """Maximise ``sum_i w_i f_i(x_i)`` over ``sum_i x_i = m`` with ``f_i(x_i) <= bounds[i]``.

    ``agents`` restricts the problem to a subset (others get nothing) and
    ``weights`` overrides the scenario weights of the objective; both exist
    for the deficit computation, which needs the plain utility sum over all
    agents but the pivot.
    """
    s.require_single_type("restricted utilitarian welfare")
    m = s.m if m is None else m
    if m < 0 or m > s.m:
        raise ValueError(f"item count {m} outside 0..{s.m}")
    agents = list(range(s.n)) if agents is None else list(agents)
    require_concave(s, agents)
    wts = [s.w(i) for i in range(s.n)] if weights is None else list(weights)
    eps = s.eps
    exact = s.is_exact and all(is_exact(b) for b in bounds)
    f = [s.f(i) for i in range(s.n)]

    def gain(slot, x):
        i = slot[0]
        return wts[i] * (f[i]._value(x + 1) - f[i]._value(x))

    def allowed(slot, x):
        i = slot[0]
        if not _in_domain(f[i], x + 1):
            return False
        v = f[i]._value(x + 1)
        return v <= bounds[i] if exact else leq(v, bounds[i], eps)

    slots = [(i, 0) for i in agents]
    counts, _steps, done = _greedy(m, slots, gain, allowed, None, eps, exact)
    if not done:
        return INFEASIBLE
    vec = tuple(counts.get((i, 0), 0) for i in range(s.n))
    welfare = sum(wts[i] * f[i]._value(vec[i]) for i in agents)
    return RestrictedResult(vec, welfare)


def solve_nash(s: Scenario) -> WelfareReport:
    """Maximise the weighted Nash product ``prod_i x_i ** w_i`` of bundle sizes.

    Every agent first gets one item (a zero factor is never optimal), then
    the remaining items go greedily by ``w_i * ln((x_i + 1) / x_i)``.  With
    fewer items than agents every allocation has product 0; the result is
    then flagged ``insufficient_items`` and hands single items to the lowest
    indices.
    """
    s.require_single_type("Nash welfare")
    n, m, eps = s.n, s.m, s.eps
    w = [s.w(i) for i in range(n)]
    if m < n:
        vec = [1 if i < m else 0 for i in range(n)]
        return welfare_report(s, Allocation.from_vector(vec), objective="nash", value=0,
                              insufficient_items=True, log_nash=-math.inf, nash_product=0)
    wf = [float(wi) for wi in w]

    def gain(slot, x):
        i = slot[0]
        return wf[i] * (math.log(x + 2) - math.log(x + 1))

    slots = [(i, 0) for i in range(n)]
    counts, _steps, _ = _greedy(m - n, slots, gain, lambda slot, x: True, None, eps, False)
    vec = [1 + counts[(i, 0)] for i in range(n)]
    log_nash = math.fsum(wf[i] * math.log(vec[i]) for i in range(n))
    if all(isinstance(wi, int) for wi in w):
        product = math.prod(vec[i] ** w[i] for i in range(n))
    else:
        product = math.exp(log_nash)
    return welfare_report(s, Allocation.from_vector(vec), objective="nash", value=product,
                          insufficient_items=False, log_nash=log_nash, nash_product=product)


# ---------------------------------------------------------------------------
# Counter sweep


@dataclass(frozen=True)
class Sweep:
    counts: tuple
    reached: int
    tied: tuple  # agents holding the next unswept value when the target is skipped

    @property
    def exact_hit(self) -> bool:
        return not self.tied


def counter_sweep(n: int, target: int, value: Callable[[int, int], Number], eps: float,
                  exact: bool) -> Sweep:
    """Sweep the merged sorted sequences ``value(i, 0) < value(i, 1) < ...``.

    Passing a value moves agent ``i``'s count forward by one; equal values
    across agents are passed together, so only some totals are reachable.
    Stops at ``target`` when reachable; otherwise stops at the largest
    reachable total below it and returns the agents tied at the next value.
    """
    counts = [0] * n
    heap = [(value(i, 0), i) for i in range(n)]
    heapq.heapify(heap)
    q = 0
    while q < target:
        v, i = heapq.heappop(heap)
        group = [i]
        while heap and (heap[0][0] == v if exact else close(heap[0][0], v, eps)):
            group.append(heapq.heappop(heap)[1])
        if q + len(group) > target:
            return Sweep(tuple(counts), q, tuple(sorted(group)))
        for g in group:
            counts[g] += 1
            heapq.heappush(heap, (value(g, counts[g]), g))
        q += len(group)
    return Sweep(tuple(counts), q, ())


def pick_largest(candidates: Sequence[int], key: Callable[[int], Number], count: int,
                 eps: float) -> list:
    """The ``count`` candidates with the largest key; ties favour low indices."""

    def order(a, b):
        c = compare(key(b), key(a), eps)
        return c if c else (a > b) - (a < b)

    return sorted(sorted(candidates, key=cmp_to_key(order))[:count])


def _ratio_fn(s: Scenario):
    f = [s.f(i) for i in range(s.n)]
    w = [s.w(i) for i in range(s.n)]
    return lambda i, j: div(f[i]._value(j), w[i])


def _maximin(s: Scenario, t_items: int, objective: str) -> WelfareReport:
    s.require_single_type(objective)
    if not 0 <= t_items <= s.m:
        raise ValueError(f"item count {t_items} outside 0..{s.m}")
    ratio = _ratio_fn(s)
    sweep = counter_sweep(s.n, t_items, ratio, s.eps, s.is_exact)
    counts = list(sweep.counts)
    extra = t_items - sweep.reached
    if extra:
        chosen = pick_largest(sweep.tied, lambda i: ratio(i, counts[i] + 1), extra, s.eps)
        for i in chosen:
            counts[i] += 1
    case = 1 if sweep.exact_hit else 2
    logger.debug("%s sweep: reached %d of %d items, case %d", objective, sweep.reached, t_items, case)
    vec = tuple(counts)
    value = min(ratio(i, vec[i]) for i in range(s.n))
    if t_items == s.m:
        report = welfare_report(s, Allocation.from_vector(vec), objective=objective, value=value)
    else:
        ratios = tuple(ratio(i, vec[i]) for i in range(s.n))
        utilities = tuple(s.f(i)(vec[i]) for i in range(s.n))
        report = WelfareReport(
            allocation=Allocation.from_vector(vec, partial=True),
            utilities=utilities,
            ratios=ratios,
            utilitarian=sum(s.w(i) * utilities[i] for i in range(s.n)),
            rawlsian=value,
            twd=None,
            objective=objective,
            value=value,
        )
    report.extras.update(case=case, swept_items=sweep.reached, items=t_items)
    return report


def solve_maximin(s: Scenario, t_items: int = None) -> WelfareReport:
    """Maximise ``min_i f_i(x_i) / w_i`` using exactly ``t_items`` items.

    When the sweep reaches ``t_items`` exactly (case 1) each agent gets its
    swept count.  Otherwise the largest reachable total ``m' < t_items`` is
    built and the ``t_items - m'`` leftover items go, one each, to agents at
    the minimum ratio, preferring the largest ``f_i(x_i + 1) / w_i``.
    Partial allocations (``t_items < m``) carry no deficit.
    """
    return _maximin(s, s.m if t_items is None else t_items, "rawlsian")


def solve_leximin(s: Scenario) -> WelfareReport:
    """Weighted leximin allocation of all items (same sweep as :func:`solve_maximin`)."""
    return _maximin(s, s.m, "leximin")
