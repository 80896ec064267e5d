"""Total weighted deficit and equitability via compensation.

For an allocation with utilities ``b_i`` and pivot ``p`` (the agent with the
largest ``b_i / w_i``) the total weighted deficit is
``twd = sum_i (w_i * b_p - w_p * b_i)``; it is zero exactly for weighted
equitable allocations.  ``psi_p`` minimises it over allocations where ``p``
is a pivot, ``psi`` over all allocations.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    Allocation,
    LimitsExceeded,
    Linear,
    NonIntegerData,
    Number,
    Scenario,
    Tabulated,
    UnsupportedScenario,
    div,
    ValidationError,
    is_exact,
    leq,
    less,
)
from .welfare import require_concave, solve_restricted_utilitarian

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeficitResult:
    pivot: int
    allocation: Allocation
    twd: Number
    pivot_items: object  # int for one type, tuple per type otherwise
    utilities: tuple = ()


def _settle(v: Number, eps: float) -> Number:
    if not is_exact(v) and abs(v) < eps:
        return 0.0
    return v


def psi_p(s: Scenario, p: int) -> DeficitResult:
    """Smallest total weighted deficit among allocations where ``p`` is a pivot.

    For each pivot bundle size ``t`` in ``1..m`` every other agent ``i`` is
    capped at ``(w_i / w_p) * f_p(t)`` and the remaining ``m - t`` items are
    placed to maximise the plain utility sum of the others; ``t = m`` is
    always feasible.  The best ``t`` (smallest on ties) wins.
    """
    s.require_single_type("psi_p")
    if not 0 <= p < s.n:
        raise ValidationError(f"pivot index {p} out of range")
    if s.m < 1:
        raise ValidationError("psi needs at least one item")
    require_concave(s)
    n, m, eps = s.n, s.m, s.eps
    w = [s.w(i) for i in range(n)]
    others = [i for i in range(n) if i != p]
    w_others = sum(w[i] for i in others)
    fp = s.f(p)
    best = None
    for t in range(1, m + 1):
        up = fp(t)
        bounds = [div(w[i] * up, w[p]) for i in range(n)]
        res = solve_restricted_utilitarian(s, bounds, m - t, agents=others, weights=[1] * n)
        if not res.feasible:
            continue
        tau = _settle(w_others * up - w[p] * res.welfare, eps)
        if best is None or less(tau, best[0], eps):
            vec = list(res.counts)
            vec[p] = t
            best = (tau, t, tuple(vec))
    tau, t, vec = best
    utilities = tuple(s.f(i)(vec[i]) for i in range(n))
    return DeficitResult(p, Allocation.from_vector(vec), tau, t, utilities)


def psi(s: Scenario) -> DeficitResult:
    """Minimum total weighted deficit over all complete allocations (lowest pivot on ties)."""
    best = None
    for p in range(s.n):
        r = psi_p(s, p)
        logger.debug("psi_%d = %s", p + 1, r.twd)
        if best is None or less(r.twd, best.twd, s.eps):
            best = r
    return best


def psi_per_type(s: Scenario) -> list:
    """Independent ``psi`` per item type; types without copies get ``None``."""
    return [psi(s.restrict_to_type(j)) if s.counts[j] else None for j in range(s.k)]


def psi_p_incremental(s: Scenario, p: int) -> DeficitResult:
    """Feasible pivot-``p`` allocation built by raising the pivot one item at a time.

    After each pivot increment, the other agents are filled greedily (by
    weighted marginal gain) up to the new caps ``(w_i / w_p) * f_p(x_p)``
    until the caps or the stock run out.  Cheap, but its deficit is only an
    upper bound on :func:`psi_p`.
    """
    s.require_single_type("psi_p_incremental")
    n, m, eps = s.n, s.m, s.eps
    w = [s.w(i) for i in range(n)]
    f = [s.f(i) for i in range(n)]
    x = [0] * n
    placed = 0
    while placed < m:
        x[p] += 1
        placed += 1
        cap = div(f[p](x[p]), w[p])
        while placed < m:
            best = None
            for i in range(n):
                if i == p or (f[i].max_count is not None and x[i] + 1 > f[i].max_count):
                    continue
                nxt = f[i](x[i] + 1)
                if not leq(nxt, w[i] * cap, eps):
                    continue
                gain = w[i] * (nxt - f[i](x[i]))
                if best is None or less(best[0], gain, eps):
                    best = (gain, i)
            if best is None:
                break
            x[best[1]] += 1
            placed += 1
    utilities = tuple(f[i](x[i]) for i in range(n))
    twd = _settle(sum(w[i] * utilities[p] - w[p] * utilities[i] for i in range(n)), eps)
    return DeficitResult(p, Allocation.from_vector(x), twd, x[p], utilities)


@dataclass(frozen=True)
class CoinPlan:
    """Coins of value ``denomination`` handed to each agent to reach equitability.

    Utilities are multiplied by ``scale`` first so that they are integers.
    """

    pivot: int
    denomination: Fraction
    transfers: tuple
    total_coins: int
    allocation: Allocation
    scale: int = 1


def _utility_denominators(s: Scenario):
    for i in range(s.n):
        f = s.f(i)
        if isinstance(f, Tabulated):
            for v in f.values:
                yield Fraction(v).denominator
        elif isinstance(f, Linear):
            yield Fraction(f.rate).denominator
        else:
            raise NonIntegerData(
                f"coin compensation needs rational utilities; agent {s.agent_names[i]} has a {f.kind} utility"
            )


def coin_compensation(s: Scenario, scale: bool = True) -> CoinPlan:
    """Fewest coins of value ``1 / w_pivot`` that make an allocation weighted-equitable.

    Takes the deficit-minimising allocation and gives agent ``i`` exactly
    ``u_p * w_i - u_i * w_p`` coins, where ``p`` is its pivot; the pivot gets
    none.  Weights must be positive integers.  Rational utilities are scaled
    by the least common denominator unless ``scale`` is false, in which case
    they must already be integers.
    """
    s.require_single_type("coin compensation")
    w = [s.w(i) for i in range(s.n)]
    if not all(isinstance(wi, int) for wi in w):
        raise NonIntegerData("coin compensation needs integer weights")
    lcd = math.lcm(*_utility_denominators(s))
    if lcd != 1 and not scale:
        raise NonIntegerData("utilities are not integers and scaling is disabled")
    scaled = s
    if lcd != 1:
        scaled = Scenario(
            s.weights,
            tuple((_scale_utility(row[0], lcd),) for row in s.utilities),
            s.counts, s.agent_names, s.type_names, s.eps,
        )
    r = psi(scaled)
    u = r.utilities
    p = r.pivot
    transfers = tuple(int(u[p] * w[i] - u[i] * w[p]) for i in range(s.n))
    return CoinPlan(p, Fraction(1, w[p]), transfers, sum(transfers), r.allocation, lcd)


def _scale_utility(f, factor):
    if isinstance(f, Tabulated):
        return Tabulated(tuple(v * factor for v in f.values))
    return Linear(f.rate * factor)


# ---------------------------------------------------------------------------
# Several item types


def psi_multitype(s: Scenario, p: Optional[int] = None, *, max_types: int = 3,
                  omega_limit: int = 10 ** 4, max_states: int = 10 ** 5) -> DeficitResult:
    """Minimum total weighted deficit for ``k`` item types and one weight per agent.

    The pivot's bundle is enumerated as a tuple ``(i_1, ..., i_k)``.  For each
    tuple the other agents, capped at ``w_i * u_p / w_p``, split the remaining
    copies so that their utility sum is largest; that split is found exactly
    by a dynamic program over the remaining-stock vector.  With ``p`` given
    only that pivot is considered.
    """
    w = s.scalar_weights()
    if w is None:
        raise UnsupportedScenario("multi-type deficit needs one weight per agent")
    if s.k > max_types:
        raise LimitsExceeded(f"{s.k} item types exceed the limit of {max_types}")
    if s.m < 1:
        raise ValidationError("psi needs at least one item")
    omega = max(sum(s.utilities[i][j](s.counts[j]) for j in range(s.k)) for i in range(s.n))
    if omega > omega_limit:
        raise LimitsExceeded(f"largest total utility {omega} exceeds the limit {omega_limit}")
    states = math.prod(c + 1 for c in s.counts)
    if states > max_states:
        raise LimitsExceeded(f"{states} stock vectors exceed the limit of {max_states}")
    pivots = range(s.n) if p is None else [p]
    best = None
    for piv in pivots:
        r = _psi_multitype_pivot(s, piv, w)
        if r is not None and (best is None or less(r.twd, best.twd, s.eps)):
            best = r
    if best is None:  # pragma: no cover - the pivot can always take everything
        raise ValidationError("no feasible pivot bundle")
    return best


def _bundle_utility(s: Scenario, i: int, bundle: tuple) -> Number:
    return sum(s.utilities[i][j](bundle[j]) for j in range(s.k))


def _psi_multitype_pivot(s: Scenario, p: int, w: tuple) -> Optional[DeficitResult]:
    n, k, eps = s.n, s.k, s.eps
    others = [i for i in range(n) if i != p]
    w_others = sum(w[i] for i in others)
    bundles = list(itertools.product(*(range(c + 1) for c in s.counts)))
    value = {i: {b: _bundle_utility(s, i, b) for b in bundles} for i in range(n)}
    best = None
    for own in bundles:
        if not any(own):
            continue
        up = value[p][own]
        rest = tuple(c - o for c, o in zip(s.counts, own))
        caps = {i: div(w[i] * up, w[p]) for i in others}
        total, split = _best_split(others, rest, value, caps, eps)
        if split is None:
            continue
        twd = _settle(w_others * up - w[p] * total, eps)
        if best is None or less(twd, best[0], eps):
            rows = [None] * n
            rows[p] = own
            for i, b in split.items():
                rows[i] = b
            best = (twd, own, tuple(rows))
    if best is None:
        return None
    twd, own, rows = best
    utilities = tuple(value[i][rows[i]] for i in range(n))
    return DeficitResult(p, Allocation(rows), twd, own, utilities)


def _best_split(agents, rest, value, caps, eps):
    """Split exactly ``rest`` among ``agents`` maximising the utility sum under caps."""
    ranges = [range(r + 1) for r in rest]
    # table[used] = (best sum, bundles so far)
    table = {tuple(0 for _ in rest): (0, {})}
    for i in agents:
        options = [b for b in itertools.product(*ranges) if leq(value[i][b], caps[i], eps)]
        nxt = {}
        for used, (total, chosen) in table.items():
            for b in options:
                u = tuple(a + c for a, c in zip(used, b))
                if any(a > r for a, r in zip(u, rest)):
                    continue
                cand = total + value[i][b]
                if u not in nxt or less(nxt[u][0], cand, eps):
                    nxt[u] = (cand, {**chosen, i: b})
        table = nxt
    final = table.get(tuple(rest))
    if final is None:
        return None, None
    return final
