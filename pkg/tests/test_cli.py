import io
import json
import sys

import pytest

from eqalloc import Linear, Power, Scenario
from eqalloc.cli import run
from eqalloc.io import dumps, scenario_to_dict
from helpers import figure1


@pytest.fixture
def fig1_path(tmp_path):
    p = tmp_path / "fig1.json"
    p.write_text(dumps(scenario_to_dict(figure1())))
    return str(p)


def call(*argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin)
    try:
        code = run(list(argv), out, err)
    finally:
        if stdin is not None:
            sys.stdin = old
    return code, out.getvalue(), err.getvalue()


def test_solve_rawlsian(fig1_path):
    code, out, _ = call("solve", fig1_path, "--objective", "rawlsian")
    d = json.loads(out)
    assert code == 0
    assert d["schema"] == "eqalloc/1"
    assert d["value"] == "6" and d["allocation"] == [3, 2, 1, 1]


def test_psi_with_pivots(fig1_path):
    assert json.loads(call("psi", fig1_path)[1])["psi"] == "4"
    d = json.loads(call("psi", fig1_path, "--pivot", "1")[1])
    assert d["psi"] == "6" and d["pivot"] == "A1"
    d = json.loads(call("psi", fig1_path, "--pivot", "A3", "--incremental")[1])
    assert d["psi"] == "25"


def test_coins_and_shares(fig1_path):
    d = json.loads(call("coins", fig1_path)[1])
    assert d["total_coins"] == 4 and d["final_ratios"] == ["8"] * 4
    d = json.loads(call("shares", fig1_path)[1])
    assert d["shares"] == ["2", "4", "7", "7"] and d["exists"] is True


def test_check_and_oracle(fig1_path):
    d = json.loads(call("check", fig1_path, "--property", "weqx", "--allocation", "3,2,1,1")[1])
    assert d["holds"] is True
    d = json.loads(call("oracle", fig1_path, "--objective", "min_coins")[1])
    assert d["min_coins"] == 4


def test_stdin_and_seed(fig1_path):
    text = open(fig1_path).read()
    code, out, _ = call("validate", "-", "--seed", "12", stdin=text)
    d = json.loads(out)
    assert code == 0 and d["seed"] == 12 and d["concave"] is True


def test_table_output(fig1_path):
    code, out, _ = call("solve", fig1_path, "--objective", "leximin", "--output", "table")
    assert code == 0
    assert out.splitlines()[0].split(" | ")[0].strip() == "agent"
    assert "value: 6" in out


def test_exit_codes(fig1_path, tmp_path):
    assert call("psi", fig1_path, "--epsilon", "1e-6")[0] == 2
    assert call("solve", str(tmp_path / "missing.json"))[0] == 2
    assert call("solve", "-", stdin="{not json")[0] == 2
    assert call("solve", fig1_path, "--objective", "median")[0] == 2
    assert call("check", fig1_path, "--property", "WEF", "--allocation", "1,x")[0] == 2
    assert call("check", fig1_path, "--property", "WEF", "--allocation", "1,1")[0] == 2
    assert call("psi", fig1_path, "--pivot", "A9")[0] == 2
    # WEFX construction on rates 2,4,7,7 fails its own verification
    assert call("solve", fig1_path, "--objective", "wefx")[0] == 3
    assert call("solve", fig1_path, "--objective", "balanced-efx")[0] == 0


def test_epsilon_on_power_scenario(tmp_path):
    s = Scenario.single_type([Power(1.0, 0.5), Power(1.0, 0.5)], [1, 2], m=9)
    p = tmp_path / "pow.json"
    p.write_text(dumps(scenario_to_dict(s)))
    code, out, _ = call("solve", str(p), "--objective", "wefx", "--epsilon", "1e-7")
    assert code == 0 and sum(json.loads(out)["allocation"]) == 9


def test_oracle_limits_exit_3(tmp_path):
    s = Scenario.single_type([Linear(1)] * 3, [1] * 3, m=30)
    p = tmp_path / "big.json"
    p.write_text(dumps(scenario_to_dict(s)))
    assert call("oracle", str(p), "--objective", "utilitarian")[0] == 3
