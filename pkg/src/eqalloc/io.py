"""Scenario JSON reading/writing and result serialisation.

Scenario layout::

    {"types": [{"name": "seat", "count": 7}],
     "agents": [{"name": "A1", "weight": "1", "utility": {"kind": "linear", "rate": "2"}},
                {"name": "A2", "weight": "1", "utility": {"kind": "table", "values": ["0", "4", ...]}},
                {"name": "A3", "weight": "1", "utility": {"kind": "power", "c": 1.0, "a": 0.5}}]}

With several types, ``weight`` and ``utility`` are lists with one entry per
type.  Rationals are written as strings (``"3"``, ``"0.25"``, ``"3/4"``).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .core import (
    DEFAULT_EPS,
    Linear,
    Log,
    Power,
    Scenario,
    Tabulated,
    UtilityFunction,
    ValidationError,
    as_exact,
)

SCHEMA = "eqalloc/1"


def format_number(v) -> Any:
    """Exact values become ``"p/q"`` / ``"p"`` strings; floats their repr."""
    if v is None:
        return None
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    return v


def _rational(value, where: str):
    try:
        return as_exact(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValidationError(f"{where}: cannot read {value!r} as a rational") from None


def _real(value, where: str) -> float:
    try:
        if isinstance(value, str):
            return float(Fraction(value))
        if isinstance(value, bool):
            raise TypeError
        return float(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValidationError(f"{where}: cannot read {value!r} as a number") from None


def parse_utility(spec: dict, where: str) -> UtilityFunction:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValidationError(f"{where}: utility must be an object with a 'kind'")
    kind = spec["kind"]
    try:
        if kind in ("table", "tabulated"):
            values = spec.get("values")
            if not isinstance(values, list):
                raise ValidationError("table utility needs a 'values' list")
            return Tabulated(tuple(_rational(v, where) for v in values))
        if kind == "linear":
            return Linear(_rational(spec.get("rate"), where))
        if kind == "power":
            return Power(_real(spec.get("c", 1.0), where), _real(spec.get("a"), where))
        if kind == "log":
            return Log(_real(spec.get("scale", 1.0), where))
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    raise ValidationError(f"{where}: unknown utility kind {kind!r}")


def scenario_from_dict(data: dict, eps: float = DEFAULT_EPS) -> Scenario:
    if not isinstance(data, dict):
        raise ValidationError("scenario must be a JSON object")
    types = data.get("types")
    agents = data.get("agents")
    if not isinstance(types, list) or not types:
        raise ValidationError("scenario needs a non-empty 'types' list")
    if not isinstance(agents, list) or not agents:
        raise ValidationError("scenario needs a non-empty 'agents' list")
    type_names, counts = [], []
    for j, t in enumerate(types):
        if not isinstance(t, dict) or not isinstance(t.get("count"), int) or isinstance(t.get("count"), bool):
            raise ValidationError(f"type #{j + 1} needs an integer 'count'")
        type_names.append(str(t.get("name", f"g{j + 1}")))
        counts.append(t["count"])
    k = len(types)
    names, weights, utilities = [], [], []
    for i, a in enumerate(agents):
        if not isinstance(a, dict):
            raise ValidationError(f"agent #{i + 1} must be an object")
        name = str(a.get("name", f"A{i + 1}"))
        w, u = a.get("weight", "1"), a.get("utility")
        if k == 1:
            w = w if isinstance(w, list) else [w]
            u = u if isinstance(u, list) else [u]
        if not isinstance(w, list) or not isinstance(u, list) or len(w) != k or len(u) != k:
            raise ValidationError(f"agent {name} needs {k} weights and {k} utilities")
        names.append(name)
        weights.append(tuple(_rational(v, f"agent {name} weight") for v in w))
        utilities.append(tuple(parse_utility(spec, f"agent {name}") for spec in u))
    if len(set(names)) != len(names):
        raise ValidationError("agent names must be unique")
    return Scenario(tuple(weights), tuple(utilities), tuple(counts), tuple(names),
                    tuple(type_names), eps)


def loads_scenario(text: str, eps: float = DEFAULT_EPS) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from None
    return scenario_from_dict(data, eps)


def load_scenario(path: str, eps: float = DEFAULT_EPS) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return loads_scenario(fh.read(), eps)


def utility_to_dict(f: UtilityFunction) -> dict:
    if isinstance(f, Tabulated):
        return {"kind": "table", "values": [format_number(v) for v in f.values]}
    if isinstance(f, Linear):
        return {"kind": "linear", "rate": format_number(f.rate)}
    if isinstance(f, Power):
        return {"kind": "power", "c": f.c, "a": f.a}
    if isinstance(f, Log):
        return {"kind": "log", "scale": f.scale}
    raise TypeError(f"unknown utility {f!r}")


def scenario_to_dict(s: Scenario) -> dict:
    agents = []
    for i in range(s.n):
        w = [format_number(v) for v in s.weights[i]]
        u = [utility_to_dict(f) for f in s.utilities[i]]
        if s.k == 1:
            w, u = w[0], u[0]
        agents.append({"name": s.agent_names[i], "weight": w, "utility": u})
    return {
        "types": [{"name": n, "count": c} for n, c in zip(s.type_names, s.counts)],
        "agents": agents,
    }


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)
