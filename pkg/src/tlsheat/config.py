"""JSON device configs and sweep grids."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidNetwork
from .model import TlsNetwork


class ConfigError(InvalidNetwork):
    pass


def _require(obj, key, where):
    if not isinstance(obj, dict):
        raise ConfigError(where, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ConfigError(f"{where}.{key}" if where else key, "missing required field")
    return obj[key]


def _real(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(where, f"expected a number, got {value!r}")
    return float(value)


def network_from_config(doc: dict) -> TlsNetwork:
    """Validate a parsed config document into a network.

    Schema::

        {"sites": [{"omega": w}, ...],
         "couplings": [[...], ...],
         "baths": [{"temperature": T, "label": "L", "coupling": 1.0}, ...]}

    ``label`` and ``coupling`` are optional.
    """
    sites = _require(doc, "sites", "")
    if not isinstance(sites, list) or not sites:
        raise ConfigError("sites", "expected a non-empty list")
    omegas = [_real(_require(s, "omega", f"sites[{i}]"), f"sites[{i}].omega") for i, s in enumerate(sites)]
    n = len(omegas)

    couplings = _require(doc, "couplings", "")
    if not isinstance(couplings, list) or len(couplings) != n:
        raise ConfigError("couplings", f"expected a {n}x{n} matrix")
    rows = []
    for i, row in enumerate(couplings):
        if not isinstance(row, list) or len(row) != n:
            raise ConfigError(f"couplings[{i}]", f"expected a list of {n} numbers")
        rows.append([_real(c, f"couplings[{i}][{j}]") for j, c in enumerate(row)])
    for i in range(n):
        if rows[i][i] != 0:
            raise ConfigError(f"couplings[{i}][{i}]", "diagonal must be zero")
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise ConfigError(
                    f"couplings[{i}][{j}]", f"asymmetric: {rows[i][j]!r} vs couplings[{j}][{i}] = {rows[j][i]!r}"
                )

    baths = _require(doc, "baths", "")
    if not isinstance(baths, list) or len(baths) != n:
        raise ConfigError("baths", f"expected {n} baths, one per site")
    temps, labels, gains = [], [], []
    for i, b in enumerate(baths):
        t = _real(_require(b, "temperature", f"baths[{i}]"), f"baths[{i}].temperature")
        if t < 0 or not math.isfinite(t):
            raise ConfigError(f"baths[{i}].temperature", f"must be finite and >= 0, got {t!r}")
        temps.append(t)
        if "label" in b:
            if not isinstance(b["label"], str) or not b["label"]:
                raise ConfigError(f"baths[{i}].label", "expected a non-empty string")
            labels.append(b["label"])
        gains.append(_real(b.get("coupling", 1.0), f"baths[{i}].coupling"))
    if labels and len(labels) != n:
        raise ConfigError("baths", "label either every bath or none")
    try:
        return TlsNetwork(
            site_energy=tuple(omegas),
            coupling=tuple(tuple(r) for r in rows),
            bath_temperature=tuple(temps),
            labels=tuple(labels),
            bath_coupling=tuple(gains),
        )
    except InvalidNetwork as exc:
        raise ConfigError(exc.field, str(exc)) from None


def network_to_config(network: TlsNetwork) -> dict:
    return {
        "sites": [{"omega": w} for w in network.site_energy],
        "couplings": [list(r) for r in network.coupling],
        "baths": [
            {"temperature": t, "label": lab, "coupling": g}
            for t, lab, g in zip(network.bath_temperature, network.labels, network.bath_coupling)
        ],
    }


def load_config(path) -> TlsNetwork:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return network_from_config(doc)


@dataclass(frozen=True)
class SweepSpec:
    bath: str | int
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.scale not in ("linear", "log"):
            raise ConfigError("scale", f"expected 'linear' or 'log', got {self.scale!r}")
        if not self.start < self.stop:
            raise ConfigError("start", f"start ({self.start!r}) must be below stop ({self.stop!r})")
        if self.points < 2:
            raise ConfigError("points", f"need at least 2 points, got {self.points!r}")
        if self.scale == "log" and self.start <= 0:
            raise ConfigError("start", "logarithmic sweeps need start > 0")
        if self.start < 0:
            raise ConfigError("start", "temperatures must be >= 0")

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)
