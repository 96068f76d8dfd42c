"""Scenario files.

A scenario is a TOML document with exactly these top-level keys::

    K        = 3                      # number of users
    PG       = 4                      # chips per symbol
    codes    = [[1, 1, 1, -1], ...]   # K rows of PG chips, each +1 or -1
    energies = [1.0, 1.0, 1.0]        # symbol energies E_k, positive
    gains    = [1.0, 1.0, 1.0]        # path gains a_k, positive
    Ts       = 4.0                    # symbol duration in chips, equal to PG
    Nn       = 1                      # noise indices run over -Nn..Nn
    nR       = 1.0                    # noise / sample quantisation step
    tauR     = 1.3333333333333333     # delay step; Ts / tauR must be an integer

Every key is required and unknown keys are rejected.
"""

from __future__ import annotations

import re
import sys
from pathlib import Path

from .cdma import CdmaScenario, QuantGrid
from .errors import QmudError, ScenarioError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

KEYS = ("K", "PG", "codes", "energies", "gains", "Ts", "Nn", "nR", "tauR")


def _line_of(text: str, key: str) -> int | None:
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*=", re.MULTILINE)
    match = pattern.search(text)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


def _error_line(text: str, exc: Exception) -> int | None:
    found = re.search(r"line (\d+)", str(exc))
    if found:
        return int(found.group(1))
    if "end of document" in str(exc):
        return max(1, len(text.splitlines()))
    return None


def parse_scenario(text: str) -> tuple[CdmaScenario, QuantGrid]:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"invalid TOML: {exc}", _error_line(text, exc)) from exc

    for key in data:
        if key not in KEYS:
            raise ScenarioError(f"unknown key {key!r}", _line_of(text, key))
    for key in KEYS:
        if key not in data:
            raise ScenarioError(f"missing required key {key!r}")

    def check(key, ok, why):
        if not ok:
            raise ScenarioError(f"{key}: {why}", _line_of(text, key))

    check("K", isinstance(data["K"], int) and data["K"] >= 1, "must be a positive integer")
    check("PG", isinstance(data["PG"], int) and data["PG"] >= 1, "must be a positive integer")
    codes = data["codes"]
    check("codes", isinstance(codes, list) and len(codes) == data["K"], f"must list {data['K']} code rows")
    for row in codes:
        check("codes", isinstance(row, list) and len(row) == data["PG"], f"each row must have {data['PG']} chips")
        check("codes", all(c in (1, -1) and isinstance(c, int) for c in row), "chips must be +1 or -1")
    for key in ("energies", "gains"):
        vals = data[key]
        check(key, isinstance(vals, list) and len(vals) == data["K"], f"must list {data['K']} values")
        check(key, all(isinstance(v, (int, float)) and v > 0 for v in vals), "values must be positive")
    for key in ("Ts", "nR", "tauR"):
        check(key, isinstance(data[key], (int, float)) and data[key] > 0, "must be a positive number")
    check("Nn", isinstance(data["Nn"], int) and data["Nn"] >= 0, "must be a non-negative integer")

    try:
        scenario = CdmaScenario(codes, data["energies"], data["gains"], data["Ts"])
    except QmudError as exc:
        raise ScenarioError(str(exc), _line_of(text, "Ts")) from exc
    grid = QuantGrid(data["Nn"], data["nR"], data["tauR"])
    try:
        grid.delay_slots(scenario.Ts)
    except QmudError as exc:
        raise ScenarioError(str(exc), _line_of(text, "tauR")) from exc
    return scenario, grid


def load_scenario(path) -> tuple[CdmaScenario, QuantGrid]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text)


def dump_scenario(scenario: CdmaScenario, grid: QuantGrid) -> str:
    def num(v):
        return repr(float(v))

    rows = ",\n".join("    [" + ", ".join(str(int(c)) for c in row) + "]" for row in scenario.codes)
    return (
        f"K = {scenario.K}\n"
        f"PG = {scenario.PG}\n"
        f"codes = [\n{rows},\n]\n"
        f"energies = [{', '.join(num(v) for v in scenario.energies)}]\n"
        f"gains = [{', '.join(num(v) for v in scenario.gains)}]\n"
        f"Ts = {num(scenario.Ts)}\n"
        f"Nn = {grid.Nn}\n"
        f"nR = {num(grid.nR)}\n"
        f"tauR = {num(grid.tauR)}\n"
    )
