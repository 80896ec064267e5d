import math
import random

import pytest

from eqalloc import LimitsExceeded, Linear, OracleLimits, Scenario, enumerate_allocations, oracle_best
from eqalloc.oracle import allocation_count, compositions
from helpers import figure1, multitype_scenario


def test_compositions_are_complete_and_distinct():
    for m, n in [(0, 3), (5, 1), (6, 3), (7, 4)]:
        comps = list(compositions(m, n))
        assert len(comps) == math.comb(m + n - 1, n - 1)
        assert len(set(comps)) == len(comps)
        assert all(sum(c) == m and len(c) == n for c in comps)


def test_enumeration_count_multitype():
    s = multitype_scenario(random.Random(1))
    assert len(list(enumerate_allocations(s))) == allocation_count(s)


def test_oracle_limits():
    s = Scenario.single_type([Linear(1)] * 5, [1] * 5, m=3)
    with pytest.raises(LimitsExceeded):
        oracle_best(s, "utilitarian")
    with pytest.raises(LimitsExceeded):
        oracle_best(figure1(), "utilitarian", OracleLimits(max_allocations=10))


def test_oracle_figure1():
    s = figure1()
    assert oracle_best(s, "rawlsian").value == 6
    assert oracle_best(s, "min_twd").value == 4
    assert oracle_best(s, "utilitarian").value == 49


def test_unknown_objective():
    with pytest.raises(ValueError):
        oracle_best(figure1(), "median")
