"""Weighted maximin shares and envy-free-up-to-any-good constructions."""

from __future__ import annotations

import math
from typing import Optional

from .core import (
    Allocation,
    Linear,
    Power,
    Scenario,
    UnreachableValue,
    UnsupportedScenario,
    ValidationError,
    VerificationFailed,
    ceil_inverse,
    check_fairness,
    div,
    less,
)
from .welfare import counter_sweep


def _min_count(f, y, eps) -> Optional[int]:
    try:
        return ceil_inverse(f, y, eps)
    except UnreachableValue:
        return None


def _share_for_position(s: Scenario, i: int, j: int):
    """Best value ``(w_i / w_j) * f_i(l)`` with agent ``j``'s bundle the weighted minimum.

    A bundle size ``l`` for position ``j`` is feasible when every other
    position ``k`` can hold ``ceil_inverse(f_i, (w_k / w_j) * f_i(l))`` items
    within the ``m`` available.  Feasibility is monotone in ``l``, so the scan
    stops at the first failure.
    """
    f = s.f(i)
    m, eps = s.m, s.eps
    w = [s.w(r) for r in range(s.n)]
    best = 0
    for ell in range(m + 1):
        fl = f(ell)
        need = ell
        for k in range(s.n):
            if k == j:
                continue
            c = _min_count(f, div(w[k] * fl, w[j]), eps)
            if c is None:
                need = m + 1
                break
            need += c
            if need > m:
                break
        if need > m:
            break
        best = ell
    return div(w[i] * f(best), w[j])


def compute_wmms_shares(s: Scenario) -> tuple:
    """Weighted maximin share ``mu_i`` of every agent.

    ``mu_i`` is the best guarantee agent ``i`` can secure by splitting the
    items into bundles for all agents (with everyone valuing bundles by
    ``f_i``) and receiving the one with the smallest weighted value.
    """
    s.require_single_type("WMMS shares")
    out = []
    for i in range(s.n):
        shares = [_share_for_position(s, i, j) for j in range(s.n)]
        top = shares[0]
        for v in shares[1:]:
            if less(top, v, s.eps):
                top = v
        out.append(top)
    return tuple(out)


def decide_wmms(s: Scenario, shares=None):
    """Whether an allocation giving every agent its share exists, and one such allocation.

    Agent ``i`` needs ``ceil_inverse(f_i, mu_i)`` items; leftovers are dealt
    round-robin from the first agent.
    """
    s.require_single_type("WMMS decision")
    shares = compute_wmms_shares(s) if shares is None else shares
    need = []
    for i in range(s.n):
        c = _min_count(s.f(i), shares[i], s.eps)
        if c is None:
            return False, None
        need.append(c)
    surplus = s.m - sum(need)
    if surplus < 0:
        return False, None
    x = list(need)
    base, rem = divmod(surplus, s.n)
    for i in range(s.n):
        x[i] += base + (1 if i < rem else 0)
    return True, Allocation.from_vector(x)


def construct_balanced_efx(s: Scenario) -> Allocation:
    """Bundle sizes differing by at most one; the lowest indices get the extra items."""
    s.require_single_type("balanced EFX")
    w = [s.w(i) for i in range(s.n)]
    if any(wi != w[0] for wi in w):
        raise UnsupportedScenario("balanced EFX allocation needs equal weights")
    base, rem = divmod(s.m, s.n)
    return Allocation.from_vector(base + (1 if i < rem else 0) for i in range(s.n))


def construct_wefx(s: Scenario) -> Allocation:
    """Weighted EFX allocation for power utilities ``f_i(x) = c_i * x**a_i`` (linear is ``a_i = 1``).

    With ``t_i = f_i^{-1}(w_i)`` the allocation is ``x_i = ceil(lam * t_i)``
    for a scale ``lam`` making the sizes sum to ``m``.  Such scales are found
    by sweeping the breakpoints ``j / t_i``; when ``m`` is skipped, agents
    whose ``lam * t_i`` is integral at the last reachable scale get one more
    item each.  The result is checked before it is returned.

    The construction guarantees ``x_i / t_i >= (x_j - 1) / t_j``, which
    implies weighted EFX when all agents share the same utility function.
    For agents with different exponents or coefficients a weighted EFX
    allocation may not exist; :class:`VerificationFailed` is raised then.
    """
    s.require_single_type("WEFX construction")
    n, m, eps = s.n, s.m, s.eps
    fs = [s.f(i) for i in range(n)]
    if not all(isinstance(f, (Power, Linear)) for f in fs):
        raise UnsupportedScenario("WEFX construction needs power or linear utilities")
    t = [f.inverse(float(s.w(i))) if isinstance(f, Power) else float(s.w(i)) / float(f.rate)
         for i, f in enumerate(fs)]
    if not all(ti > 0 and math.isfinite(ti) for ti in t):
        raise ValidationError("weights must lie in the range of the utilities")
    sweep = counter_sweep(n, m, lambda i, j: j / t[i], eps, exact=False)
    counts = list(sweep.counts)
    extra = m - sweep.reached
    if extra:
        for i in sorted(sweep.tied)[:extra]:
            counts[i] += 1
    x = Allocation.from_vector(counts)
    result = check_fairness(s, x, "WEFX")
    if not result:
        i, j = result.witness
        raise VerificationFailed(
            f"constructed allocation {counts} is not WEFX: agent {s.agent_names[i]} "
            f"envies {s.agent_names[j]} beyond one item"
        )
    return x
