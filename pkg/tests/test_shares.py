import random

import pytest

from eqalloc import (
    Linear,
    Log,
    Power,
    Scenario,
    UnsupportedScenario,
    VerificationFailed,
    check_fairness,
    compute_wmms_shares,
    construct_balanced_efx,
    construct_wefx,
    decide_wmms,
    oracle_wmms,
)
from helpers import figure1, power_scenario, random_family

FAMILY = random_family(303, 200)


def test_figure1_shares():
    s = figure1()
    assert compute_wmms_shares(s) == (2, 4, 7, 7)
    exists, x = decide_wmms(s)
    assert exists and x.vector == (2, 2, 2, 1)


def test_shares_and_existence_match_oracle():
    for s in FAMILY:
        mu = compute_wmms_shares(s)
        want_mu, want_exists = oracle_wmms(s)
        assert mu == want_mu
        exists, x = decide_wmms(s, mu)
        assert exists == want_exists
        if exists:
            assert sum(x.vector) == s.m
            assert check_fairness(s, x, "WMMS", shares=mu)


def test_balanced_efx():
    for n, m in [(3, 7), (4, 4), (5, 2)]:
        s = Scenario.single_type([Linear(i + 1) for i in range(n)], [2] * n, m=m)
        x = construct_balanced_efx(s)
        assert max(x.vector) - min(x.vector) <= 1 and sum(x.vector) == m
        assert check_fairness(s, x, "WEFX")
    with pytest.raises(UnsupportedScenario):
        construct_balanced_efx(Scenario.single_type([Linear(1)] * 2, [1, 2], m=3))


def test_wefx_worked_example():
    s = Scenario.single_type([Linear(1), Linear(1)], [1, 2], m=6)
    assert construct_wefx(s).vector == (2, 4)


def test_wefx_with_a_shared_exponent():
    rng = random.Random(29)
    for a in (0.5, 1.0):
        for _ in range(50):
            s = power_scenario(rng, exponents=(a,))
            x = construct_wefx(s)
            assert sum(x.vector) == s.m
            assert check_fairness(s, x, "WEFX")


def test_wefx_can_be_impossible_with_mixed_exponents():
    # no allocation of 17 items is WEFX here, so the construction must refuse
    s = Scenario.single_type([Power(1.0, 1.0), Power(1.0, 0.5)], [1, 4], m=17)
    with pytest.raises(VerificationFailed):
        construct_wefx(s)
    for a in range(18):
        assert not check_fairness(s, [a, 17 - a], "WEFX")


def test_wefx_needs_power_utilities():
    with pytest.raises(UnsupportedScenario):
        construct_wefx(Scenario.single_type([Log(), Linear(1)], [1, 1], m=3))
