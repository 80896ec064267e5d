"""Domain model for dividing identical indivisible goods among weighted agents.

A scenario has ``n`` agents and ``k`` item types with ``m_j`` identical copies
of type ``j``.  Agent ``i`` values ``x`` copies of type ``j`` at ``f_ij(x)``,
where ``f_ij`` is strictly increasing with ``f_ij(0) == 0``, and holds the
entitlement ``w_ij > 0``.  Because goods of one type are interchangeable, an
allocation is simply an ``n x k`` matrix of counts.

Values are exact (``int`` / ``Fraction``) whenever the utilities allow it.
Power and log utilities produce floats; any comparison that touches a float is
made with a tolerance ``eps`` (default ``1e-9``).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Number = Union[int, Fraction, float]

DEFAULT_EPS = 1e-9


class EqallocError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(EqallocError, ValueError):
    """Input data violates a model invariant."""


class DomainError(EqallocError, ValueError):
    """A tabulated utility was evaluated past its last entry."""


class UnreachableValue(EqallocError, ValueError):
    """No item count within the domain reaches the requested utility."""


class IncompleteAllocation(EqallocError, ValueError):
    pass


class UnsupportedScenario(EqallocError, ValueError):
    """The operation is only defined for a narrower class of scenarios."""


class SolverError(EqallocError):
    """A solver precondition failed on otherwise valid input."""


class NonConcaveUtility(SolverError):
    pass


class LimitsExceeded(SolverError):
    pass


class NonIntegerData(SolverError):
    pass


class VerificationFailed(SolverError):
    pass


# ---------------------------------------------------------------------------
# Exact / approximate arithmetic helpers


def as_exact(value) -> Union[int, Fraction]:
    """Convert ``value`` to an exact rational, collapsing whole numbers to ``int``.

    Accepts ints, Fractions, Decimals, decimal strings (``"0.25"``), ratio
    strings (``"3/4"``) and floats (read through their shortest repr).
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        value = Fraction(repr(value))
    elif isinstance(value, (str, Decimal)):
        value = Fraction(str(value).strip())
    elif not isinstance(value, Fraction):
        raise TypeError(f"cannot read {value!r} as a rational")
    return value.numerator if value.denominator == 1 else value


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction))


def div(a: Number, b: Number) -> Number:
    """``a / b``, kept exact (and whole numbers as ``int``) when both operands are."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        q = Fraction(a) / b
        return q.numerator if q.denominator == 1 else q
    return a / b


def close(a: Number, b: Number, eps: float = DEFAULT_EPS) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=eps, abs_tol=eps)


def less(a: Number, b: Number, eps: float = DEFAULT_EPS) -> bool:
    """``a < b`` beyond tolerance."""
    return a < b and not close(a, b, eps)


def leq(a: Number, b: Number, eps: float = DEFAULT_EPS) -> bool:
    return a <= b or close(a, b, eps)


def compare(a: Number, b: Number, eps: float = DEFAULT_EPS) -> int:
    if close(a, b, eps):
        return 0
    return -1 if a < b else 1


def lex_compare(u: Sequence[Number], v: Sequence[Number], eps: float = DEFAULT_EPS) -> int:
    """Compare two equally long sequences lexicographically with tolerance."""
    for a, b in zip(u, v):
        c = compare(a, b, eps)
        if c:
            return c
    return 0


# ---------------------------------------------------------------------------
# Utility functions


class UtilityFunction:
    """Strictly increasing utility of a bundle size, with ``f(0) == 0``."""

    kind: str = ""
    exact: bool = True

    def __call__(self, x: int) -> Number:
        return eval_utility(self, x)

    @property
    def max_count(self) -> Optional[int]:
        """Largest bundle size the function is defined for (``None`` if unbounded)."""
        return None

    def _value(self, x: int) -> Number:
        raise NotImplementedError

    def _is_concave(self, m: int) -> bool:
        raise NotImplementedError

    def _inverse_guess(self, y: Number) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Tabulated(UtilityFunction):
    values: tuple

    kind = "table"
    exact = True

    def __post_init__(self):
        vals = tuple(as_exact(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValidationError("utility table is empty")
        if vals[0] != 0:
            raise ValidationError(f"utility table must start at 0, got {vals[0]}")
        for x in range(1, len(vals)):
            if vals[x] <= vals[x - 1]:
                raise ValidationError(f"utility not strictly increasing at x={x}")

    @property
    def max_count(self) -> int:
        return len(self.values) - 1

    def _value(self, x):
        return self.values[x]

    def _is_concave(self, m):
        # cached per object: large shared tables are checked once
        cache = self.__dict__.get("_concave_cache")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_concave_cache", cache)
        top = min(m, self.max_count)
        if top not in cache:
            v = self.values
            cache[top] = all(
                v[x + 2] - v[x + 1] <= v[x + 1] - v[x] for x in range(top - 1)
            )
        return cache[top]

    def _inverse_guess(self, y):
        return bisect.bisect_left(self.values, y)


@dataclass(frozen=True)
class Linear(UtilityFunction):
    rate: Union[int, Fraction]

    kind = "linear"
    exact = True

    def __post_init__(self):
        rate = as_exact(self.rate)
        if rate <= 0:
            raise ValidationError(f"linear rate must be positive, got {rate}")
        object.__setattr__(self, "rate", rate)

    def _value(self, x):
        return self.rate * x

    def _is_concave(self, m):
        return True

    def _inverse_guess(self, y):
        return math.ceil(y / self.rate)


@dataclass(frozen=True)
class Power(UtilityFunction):
    """``f(x) = c * x**a``; the multiplicative family."""

    c: float
    a: float

    kind = "power"
    exact = False

    def __post_init__(self):
        c, a = float(self.c), float(self.a)
        if not (c > 0 and a > 0 and math.isfinite(c) and math.isfinite(a)):
            raise ValidationError(f"power utility needs c > 0 and a > 0, got c={c}, a={a}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a", a)

    def _value(self, x):
        return self.c * float(x) ** self.a

    def _is_concave(self, m):
        return self.a <= 1

    def _inverse_guess(self, y):
        return math.ceil((float(y) / self.c) ** (1.0 / self.a))

    def inverse(self, y: float) -> float:
        """Real-valued inverse."""
        return (float(y) / self.c) ** (1.0 / self.a)


@dataclass(frozen=True)
class Log(UtilityFunction):
    """``f(x) = scale * ln(1 + x)``."""

    scale: float = 1.0

    kind = "log"
    exact = False

    def __post_init__(self):
        scale = float(self.scale)
        if not (scale > 0 and math.isfinite(scale)):
            raise ValidationError(f"log scale must be positive, got {scale}")
        object.__setattr__(self, "scale", scale)

    def _value(self, x):
        return self.scale * math.log1p(x)

    def _is_concave(self, m):
        return True

    def _inverse_guess(self, y):
        return math.ceil(math.expm1(float(y) / self.scale))


def eval_utility(f: UtilityFunction, x: int) -> Number:
    """Utility of a bundle of ``x`` identical items."""
    if x < 0:
        raise DomainError(f"negative item count {x}")
    top = f.max_count
    if top is not None and x > top:
        raise DomainError(f"item count {x} exceeds table domain 0..{top}")
    return f._value(x)


def ceil_inverse(f: UtilityFunction, y: Number, eps: float = DEFAULT_EPS) -> int:
    """Smallest item count ``x`` with ``f(x) >= y``.

    Raises :class:`UnreachableValue` when ``y`` exceeds the last entry of a
    tabulated function.  For float-valued functions ``f(x) >= y`` is read with
    tolerance ``eps``.
    """
    exact = f.exact and is_exact(y)
    if (y <= 0) if exact else leq(y, 0, eps):
        return 0
    top = f.max_count
    if top is not None and (y > f._value(top) if exact else less(f._value(top), y, eps)):
        raise UnreachableValue(f"value {y} is above f({top}) = {f._value(top)}")
    x = max(0, f._inverse_guess(y))
    if top is not None:
        x = min(x, top)
    if exact:
        # the analytic guess is exact here; guard anyway
        while x > 0 and f._value(x - 1) >= y:
            x -= 1
        while f._value(x) < y:
            x += 1
        return x
    while x > 0 and leq(y, f._value(x - 1), eps):
        x -= 1
    while less(f._value(x), y, eps):
        x += 1
    return x


def check_concave(f: UtilityFunction, m: int) -> bool:
    """True if marginal gains ``f(x+1) - f(x)`` never increase on ``0..m``."""
    return f._is_concave(m)


# ---------------------------------------------------------------------------
# Scenario and allocation


@dataclass(frozen=True)
class Scenario:
    """``n`` agents, ``k`` types, weights ``w_ij`` and utilities ``f_ij``."""

    weights: tuple
    utilities: tuple
    counts: tuple
    agent_names: tuple = ()
    type_names: tuple = ()
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts:
            raise ValidationError("scenario needs at least one item type")
        if any(c < 0 for c in counts):
            raise ValidationError(f"item counts must be non-negative, got {counts}")
        k = len(counts)
        weights = tuple(tuple(as_exact(w) for w in row) for row in self.weights)
        utilities = tuple(tuple(row) for row in self.utilities)
        n = len(weights)
        if n == 0:
            raise ValidationError("scenario needs at least one agent")
        if len(utilities) != n:
            raise ValidationError("weights and utilities disagree on the number of agents")
        names = tuple(self.agent_names) or tuple(f"A{i + 1}" for i in range(n))
        tnames = tuple(self.type_names) or tuple(f"g{j + 1}" for j in range(k))
        if len(names) != n or len(tnames) != k:
            raise ValidationError("name lists do not match scenario dimensions")
        for i in range(n):
            if len(weights[i]) != k or len(utilities[i]) != k:
                raise ValidationError(f"agent {names[i]} must have {k} weights and utilities")
            for j in range(k):
                if weights[i][j] <= 0:
                    raise ValidationError(f"weight of agent {names[i]} must be positive")
                f = utilities[i][j]
                if not isinstance(f, UtilityFunction):
                    raise ValidationError(f"utility of agent {names[i]} is not a UtilityFunction")
                if isinstance(f, Tabulated) and f.max_count != counts[j]:
                    raise ValidationError(
                        f"utility table of agent {names[i]} for type {tnames[j]} has "
                        f"{len(f.values)} entries, expected {counts[j] + 1}"
                    )
        if not self.eps > 0:
            raise ValidationError("eps must be positive")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "utilities", utilities)
        object.__setattr__(self, "agent_names", names)
        object.__setattr__(self, "type_names", tnames)

    @classmethod
    def single_type(
        cls,
        utilities: Sequence[UtilityFunction],
        weights: Sequence = None,
        m: int = None,
        agent_names: Sequence[str] = (),
        type_name: str = "g1",
        eps: float = DEFAULT_EPS,
    ) -> "Scenario":
        """Build a one-type scenario; ``m`` defaults to the table length."""
        utilities = list(utilities)
        if weights is None:
            weights = [1] * len(utilities)
        if m is None:
            tables = [f for f in utilities if isinstance(f, Tabulated)]
            if not tables:
                raise ValidationError("m is required when no utility is tabulated")
            m = tables[0].max_count
        return cls(
            weights=tuple((w,) for w in weights),
            utilities=tuple((f,) for f in utilities),
            counts=(m,),
            agent_names=tuple(agent_names),
            type_names=(type_name,),
            eps=eps,
        )

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def k(self) -> int:
        return len(self.counts)

    @property
    def m(self) -> int:
        return sum(self.counts)

    @property
    def is_exact(self) -> bool:
        return all(f.exact for row in self.utilities for f in row)

    def scalar_weights(self) -> Optional[tuple]:
        """Per-agent weights if every agent's weight row is constant, else ``None``."""
        out = []
        for row in self.weights:
            if any(w != row[0] for w in row):
                return None
            out.append(row[0])
        return tuple(out)

    def require_single_type(self, what: str = "this operation") -> None:
        if self.k != 1:
            raise UnsupportedScenario(f"{what} needs a single item type, scenario has {self.k}")

    def w(self, i: int):
        """Weight of agent ``i`` in a single-type scenario."""
        return self.weights[i][0]

    def f(self, i: int) -> UtilityFunction:
        return self.utilities[i][0]

    def restrict_to_type(self, j: int) -> "Scenario":
        return Scenario(
            weights=tuple((row[j],) for row in self.weights),
            utilities=tuple((row[j],) for row in self.utilities),
            counts=(self.counts[j],),
            agent_names=self.agent_names,
            type_names=(self.type_names[j],),
            eps=self.eps,
        )

    def with_eps(self, eps: float) -> "Scenario":
        return Scenario(self.weights, self.utilities, self.counts,
                        self.agent_names, self.type_names, eps)

    def agent_index(self, key) -> int:
        """Resolve an agent name or 1-based index string/int to a 0-based index."""
        if isinstance(key, str) and key in self.agent_names:
            return self.agent_names.index(key)
        try:
            idx = int(key)
        except (TypeError, ValueError):
            raise ValidationError(f"unknown agent {key!r}") from None
        if not 1 <= idx <= self.n:
            raise ValidationError(f"agent index {idx} out of range 1..{self.n}")
        return idx - 1


@dataclass(frozen=True)
class Allocation:
    """``x[i][j]`` copies of type ``j`` for agent ``i``."""

    x: tuple
    partial: bool = False

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.x)
        if any(v < 0 for row in rows for v in row):
            raise ValidationError("allocation entries must be non-negative")
        object.__setattr__(self, "x", rows)

    @classmethod
    def from_vector(cls, counts: Iterable[int], partial: bool = False) -> "Allocation":
        return cls(tuple((int(c),) for c in counts), partial)

    @classmethod
    def coerce(cls, value) -> "Allocation":
        if isinstance(value, Allocation):
            return value
        value = list(value)
        if value and isinstance(value[0], (list, tuple)):
            return cls(tuple(tuple(r) for r in value))
        return cls.from_vector(value)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def vector(self) -> tuple:
        """Counts per agent for a single-type allocation."""
        if any(len(row) != 1 for row in self.x):
            raise UnsupportedScenario("vector view needs a single-type allocation")
        return tuple(row[0] for row in self.x)

    def column_sums(self) -> tuple:
        if not self.x:
            return ()
        return tuple(sum(col) for col in zip(*self.x))

    def to_list(self):
        if all(len(row) == 1 for row in self.x):
            return [row[0] for row in self.x]
        return [list(row) for row in self.x]


def check_allocation(s: Scenario, x: Allocation, complete: bool = True) -> None:
    if x.n != s.n or any(len(row) != s.k for row in x.x):
        raise IncompleteAllocation(f"allocation must be {s.n} x {s.k}")
    sums = x.column_sums()
    for j, (got, want) in enumerate(zip(sums, s.counts)):
        if got > want:
            raise IncompleteAllocation(
                f"type {s.type_names[j]}: {got} copies allocated, only {want} exist"
            )
        if complete and got != want:
            raise IncompleteAllocation(
                f"type {s.type_names[j]}: {got} of {want} copies allocated"
            )


def agent_utility(s: Scenario, x: Allocation, i: int) -> Number:
    return sum(eval_utility(s.utilities[i][j], x.x[i][j]) for j in range(s.k))


def max_ratio_agent(ratios: Sequence[Number], eps: float = DEFAULT_EPS) -> int:
    """Index of the largest ratio; ties go to the lowest index."""
    best = 0
    for i in range(1, len(ratios)):
        if less(ratios[best], ratios[i], eps):
            best = i
    return best


def total_weighted_deficit(utilities: Sequence[Number], weights: Sequence[Number],
                           eps: float = DEFAULT_EPS) -> tuple:
    """Return ``(twd, pivot)`` where the pivot has the largest utility/weight ratio.

    Since ``twd = w_p * (r_max * sum(w) - sum(u))``, agents tied for the
    largest ratio give different values; the one with the smallest weight
    (then lowest index) is used, which is the smallest of them.
    """
    ratios = [div(u, w) for u, w in zip(utilities, weights)]
    top = ratios[max_ratio_agent(ratios, eps)]
    p = min((i for i, r in enumerate(ratios) if close(r, top, eps)), key=lambda i: (weights[i], i))
    up, wp = utilities[p], weights[p]
    twd = sum(w * up - wp * u for u, w in zip(utilities, weights))
    if not is_exact(twd) and abs(twd) < eps:
        twd = 0.0
    return twd, p


@dataclass
class WelfareReport:
    """An allocation together with the welfare figures it induces."""

    allocation: Allocation
    utilities: tuple
    ratios: Optional[tuple]
    utilitarian: Number
    rawlsian: Optional[Number]
    twd: Optional[Number]
    pivot: Optional[int] = None
    objective: Optional[str] = None
    value: Optional[Number] = None
    extras: dict = field(default_factory=dict)
    steps: tuple = ()


def welfare_report(s: Scenario, x, objective: str = None, value: Number = None,
                   **extras) -> WelfareReport:
    """Per-agent utilities, weighted welfare values and total weighted deficit.

    Ratios, the Rawlsian value and the deficit need one weight per agent, so
    they are ``None`` for multi-type scenarios whose weight rows vary.
    """
    x = Allocation.coerce(x)
    check_allocation(s, x, complete=True)
    utilities = tuple(agent_utility(s, x, i) for i in range(s.n))
    utilitarian = sum(
        s.weights[i][j] * eval_utility(s.utilities[i][j], x.x[i][j])
        for i in range(s.n) for j in range(s.k)
    )
    ratios = rawlsian = twd = pivot = None
    w = s.scalar_weights()
    if w is not None:
        ratios = tuple(div(u, wi) for u, wi in zip(utilities, w))
        rawlsian = min(ratios)
        twd, pivot = total_weighted_deficit(utilities, w, s.eps)
    return WelfareReport(
        allocation=x,
        utilities=utilities,
        ratios=ratios,
        utilitarian=utilitarian,
        rawlsian=rawlsian,
        twd=twd,
        pivot=pivot,
        objective=objective,
        value=value,
        extras=dict(extras),
    )


# ---------------------------------------------------------------------------
# Fairness properties

PROPERTIES = ("WEF", "WEF1", "WEFX", "WEQ", "WEQX", "WMMS")


@dataclass(frozen=True)
class FairnessResult:
    holds: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.holds


def check_fairness(s: Scenario, x, prop: str, shares: Sequence[Number] = None) -> FairnessResult:
    """Test one weighted fairness property of a single-type allocation.

    With identical goods, removing any one good from a bundle of ``x_j``
    items leaves ``x_j - 1`` items, so the "up to one good" and "up to any
    good" relaxations coincide.  An empty bundle has nothing to remove and
    its value is 0, which never causes a violation.

    The witness is the first violating pair ``(i, j)`` (0-based) where ``i``
    is the disadvantaged agent.  For WMMS it is ``(i,)``.
    """
    s.require_single_type("check_fairness")
    prop = prop.upper()
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    x = Allocation.coerce(x)
    check_allocation(s, x, complete=True)
    xs = x.vector
    eps = s.eps
    n = s.n
    f = [s.f(i) for i in range(n)]
    w = [s.w(i) for i in range(n)]
    own = [div(f[i](xs[i]), w[i]) for i in range(n)]

    if prop == "WMMS":
        if shares is None:
            from .shares import compute_wmms_shares
            shares = compute_wmms_shares(s)
        for i in range(n):
            if less(f[i](xs[i]), shares[i], eps):
                return FairnessResult(False, (i,))
        return FairnessResult(True)

    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if prop == "WEQ":
                other = own[j]
            elif prop == "WEQX":
                if xs[j] == 0:
                    continue
                other = div(f[j](xs[j] - 1), w[j])
            elif prop == "WEF":
                other = div(f[i](xs[j]), w[j])
            else:  # WEF1, WEFX
                if xs[j] == 0:
                    continue
                other = div(f[i](xs[j] - 1), w[j])
            if less(own[i], other, eps):
                return FairnessResult(False, (i, j))
    return FairnessResult(True)
