import json
import random
from fractions import Fraction

import pytest

from eqalloc import Log, Power, Scenario, Tabulated, ValidationError, loads_scenario, scenario_to_dict
from eqalloc.io import format_number, scenario_from_dict
from helpers import figure1, multitype_scenario


def test_round_trip_single_type():
    s = Scenario.single_type(
        [Tabulated((0, Fraction(3, 2), 2)), Power(2.0, 0.5), Log(3.0)], [1, Fraction(1, 2), 3], m=2
    )
    again = loads_scenario(json.dumps(scenario_to_dict(s)))
    assert again == s


def test_round_trip_multitype():
    s = multitype_scenario(random.Random(4))
    assert scenario_from_dict(scenario_to_dict(s)) == s


def test_rationals_are_strings():
    assert format_number(4) == "4"
    assert format_number(Fraction(3, 4)) == "3/4"
    d = scenario_to_dict(figure1())
    assert d["agents"][0]["weight"] == "1"


@pytest.mark.parametrize("text", [
    "{",
    "[]",
    '{"types": [], "agents": []}',
    '{"types": [{"count": "7"}], "agents": [{"utility": {"kind": "linear", "rate": 1}}]}',
    '{"types": [{"count": 2}], "agents": [{"utility": {"kind": "cubic"}}]}',
    '{"types": [{"count": 2}], "agents": [{"utility": {"kind": "table", "values": [0, 1]}}]}',
    '{"types": [{"count": 2}], "agents": [{"weight": "x", "utility": {"kind": "linear", "rate": 1}}]}',
    '{"types": [{"count": 2}], "agents": [{"name": "a", "utility": {"kind": "linear", "rate": 1}},'
    ' {"name": "a", "utility": {"kind": "linear", "rate": 1}}]}',
])
def test_malformed_scenarios(text):
    with pytest.raises(ValidationError):
        loads_scenario(text)
