"""Seeded random scenario generators shared by the test modules."""

import random
from fractions import Fraction

from eqalloc import Linear, Power, Scenario, Tabulated

# lines collected by the acceptance module, printed in the terminal summary
ACCEPTANCE = []


def record(number: int, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(line)
    ACCEPTANCE.append(line)
    return ok


def concave_table(rng: random.Random, m: int, rational: bool = False) -> Tabulated:
    """Strictly increasing concave table of length ``m + 1``."""
    steps = sorted((rng.randint(1, 9) for _ in range(m)), reverse=True)
    if rational:
        den = rng.choice([1, 2, 3, 4])
        steps = [Fraction(d, den) for d in steps]
    values = [0]
    for d in steps:
        values.append(values[-1] + d)
    return Tabulated(tuple(values))


def random_scenario(rng: random.Random, n_max: int = 4, m_max: int = 12, n_min: int = 2,
                    rational: bool = True) -> Scenario:
    n = rng.randint(n_min, n_max)
    m = rng.randint(1, m_max)
    utilities = []
    for _ in range(n):
        if rng.random() < 0.15:
            utilities.append(Linear(rng.randint(1, 9)))
        else:
            utilities.append(concave_table(rng, m, rational and rng.random() < 0.3))
    weights = [rng.randint(1, 5) for _ in range(n)]
    if rational and rng.random() < 0.2:
        weights = [Fraction(w, rng.randint(1, 3)) for w in weights]
    return Scenario.single_type(utilities, weights, m=m)


def random_family(seed: int, count: int = 200, **kw):
    rng = random.Random(seed)
    return [random_scenario(rng, **kw) for _ in range(count)]


def integer_family(seed: int, count: int = 200, **kw):
    """Integer weights and integer utilities, as coin compensation needs."""
    return random_family(seed, count, rational=False, **kw)


def power_scenario(rng: random.Random, exponents=(0.5, 1.0), m_max: int = 50) -> Scenario:
    n = rng.randint(2, 5)
    m = rng.randint(1, m_max)
    utilities = [Power(1.0, rng.choice(exponents)) for _ in range(n)]
    weights = [rng.randint(1, 4) for _ in range(n)]
    return Scenario.single_type(utilities, weights, m=m)


def figure1() -> Scenario:
    return Scenario.single_type([Linear(2), Linear(4), Linear(7), Linear(7)], [1, 1, 1, 1], m=7,
                                agent_names=["A1", "A2", "A3", "A4"])


def multitype_scenario(rng: random.Random, n_max: int = 3, count_max: int = 4) -> Scenario:
    """Two item types, integer utilities, one weight per agent."""
    n = rng.randint(2, n_max)
    counts = (rng.randint(0, count_max), rng.randint(1, count_max))
    weights = tuple((w, w) for w in (rng.randint(1, 4) for _ in range(n)))
    utilities = tuple(tuple(concave_table(rng, c) for c in counts) for _ in range(n))
    return Scenario(weights, utilities, counts, tuple(f"A{i + 1}" for i in range(n)), ("g1", "g2"))
