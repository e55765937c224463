"""Networks of sigma_z-coupled two-level systems, their eigenstates and bath transitions.

Units: hbar = k_B = 1.  Every site P carries a splitting ``omega_P`` and is
attached to its own bath at temperature ``T_P``.  The system Hamiltonian is
diagonal in the spin basis,

    H = sum_P omega_P/2 s_P + sum_{P<Q} omega_PQ/2 s_P s_Q,   s = +1 (up) / -1 (down),

so the eigenstates are the 2^N spin configurations.  States are numbered
1..2^N with site 0 as the most significant spin and "up" before "down"
(|1> = all up, |2^N> = all down).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidNetwork

DEFAULT_LABELS = {1: ("L",), 2: ("L", "R"), 3: ("L", "M", "R")}


def _as_float(value, name):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise InvalidNetwork(name, f"expected a real number, got {value!r}") from None
    if not math.isfinite(x):
        raise InvalidNetwork(name, f"must be finite, got {x!r}")
    return x


@dataclass(frozen=True)
class TlsNetwork:
    """Device description: site energies, pair couplings and one bath per site.

    ``bath_coupling`` scales every rate of bath P (dimensionless, default 1).
    """

    site_energy: tuple[float, ...]
    coupling: tuple[tuple[float, ...], ...]
    bath_temperature: tuple[float, ...]
    labels: tuple[str, ...] = ()
    bath_coupling: tuple[float, ...] = ()

    def __post_init__(self):
        energies = tuple(_as_float(w, f"site_energy[{i}]") for i, w in enumerate(self.site_energy))
        n = len(energies)
        if n < 1:
            raise InvalidNetwork("site_energy", "at least one site is required")
        if len(self.coupling) != n:
            raise InvalidNetwork("coupling", f"expected {n} rows, got {len(self.coupling)}")
        rows = []
        for i, row in enumerate(self.coupling):
            if len(row) != n:
                raise InvalidNetwork(f"coupling[{i}]", f"expected {n} entries, got {len(row)}")
            rows.append(tuple(_as_float(c, f"coupling[{i}][{j}]") for j, c in enumerate(row)))
        for i in range(n):
            if rows[i][i] != 0.0:
                raise InvalidNetwork(f"coupling[{i}][{i}]", "diagonal must be zero")
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise InvalidNetwork(
                        f"coupling[{i}][{j}]",
                        f"matrix must be symmetric ({rows[i][j]!r} != coupling[{j}][{i}] = {rows[j][i]!r})",
                    )
        if len(self.bath_temperature) != n:
            raise InvalidNetwork(
                "bath_temperature", f"expected {n} temperatures, got {len(self.bath_temperature)}"
            )
        temps = tuple(
            _as_float(t, f"bath_temperature[{i}]") for i, t in enumerate(self.bath_temperature)
        )
        for i, t in enumerate(temps):
            if t < 0:
                raise InvalidNetwork(f"bath_temperature[{i}]", f"must be >= 0, got {t!r}")

        labels = tuple(self.labels) or DEFAULT_LABELS.get(n, tuple(str(i) for i in range(n)))
        if len(labels) != n:
            raise InvalidNetwork("labels", f"expected {n} labels, got {len(labels)}")
        if len(set(labels)) != n:
            raise InvalidNetwork("labels", f"labels must be unique, got {labels}")

        gains = tuple(self.bath_coupling) or (1.0,) * n
        if len(gains) != n:
            raise InvalidNetwork("bath_coupling", f"expected {n} values, got {len(gains)}")
        gains = tuple(_as_float(g, f"bath_coupling[{i}]") for i, g in enumerate(gains))
        for i, g in enumerate(gains):
            if g < 0:
                raise InvalidNetwork(f"bath_coupling[{i}]", f"must be >= 0, got {g!r}")

        object.__setattr__(self, "site_energy", energies)
        object.__setattr__(self, "coupling", tuple(rows))
        object.__setattr__(self, "bath_temperature", temps)
        object.__setattr__(self, "labels", tuple(str(s) for s in labels))
        object.__setattr__(self, "bath_coupling", gains)

    @property
    def n_sites(self) -> int:
        return len(self.site_energy)

    @property
    def n_states(self) -> int:
        return 2 ** self.n_sites

    def bath_index(self, bath: int | str) -> int:
        """Resolve a bath given by label or 0-based index."""
        if isinstance(bath, str):
            try:
                return self.labels.index(bath)
            except ValueError:
                raise KeyError(f"no bath labelled {bath!r}; labels are {self.labels}") from None
        if not 0 <= bath < self.n_sites:
            raise IndexError(f"bath index {bath} out of range for {self.n_sites} sites")
        return int(bath)

    def with_temperatures(self, **temps: float) -> "TlsNetwork":
        """Copy with some bath temperatures replaced, keyed by label."""
        new = list(self.bath_temperature)
        for label, t in temps.items():
            new[self.bath_index(label)] = t
        return replace(self, bath_temperature=tuple(new))

    def with_temperature(self, bath: int | str, temperature: float) -> "TlsNetwork":
        new = list(self.bath_temperature)
        new[self.bath_index(bath)] = temperature
        return replace(self, bath_temperature=tuple(new))


def diode(omega_L, omega_R, omega_LR, T_L, T_R) -> TlsNetwork:
    """Two coupled TLS with baths L and R."""
    return TlsNetwork(
        site_energy=(omega_L, omega_R),
        coupling=((0.0, omega_LR), (omega_LR, 0.0)),
        bath_temperature=(T_L, T_R),
    )


def transistor(Delta, T_L, T_M, T_R, omega=(0.0, 0.0, 0.0), omega_RL=0.0) -> TlsNetwork:
    """Three TLS in the L-M-R chain with omega_LM = omega_MR = Delta.

    The defaults give the degenerate configuration (zero site energies,
    no direct L-R coupling).
    """
    c = ((0.0, Delta, omega_RL), (Delta, 0.0, Delta), (omega_RL, Delta, 0.0))
    return TlsNetwork(site_energy=tuple(omega), coupling=c, bath_temperature=(T_L, T_M, T_R))


@dataclass(frozen=True)
class BasisState:
    spins: tuple[int, ...]
    index: int
    energy: float


@dataclass(frozen=True)
class Transition:
    """Single spin flip driven by ``bath``; ``upper``/``lower`` are 1-based state indices."""

    bath: int
    upper: int
    lower: int
    frequency: float


@dataclass(frozen=True)
class TransitionSet:
    entries: tuple[Transition, ...]
    n_baths: int = field(default=0)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def for_bath(self, bath: int) -> tuple[Transition, ...]:
        return tuple(t for t in self.entries if t.bath == bath)


def spin_configurations(n_sites: int) -> list[tuple[int, ...]]:
    return list(itertools.product((1, -1), repeat=n_sites))


def state_energy(network: TlsNetwork, spins: Sequence[int]) -> float:
    w, c = network.site_energy, network.coupling
    n = network.n_sites
    e = sum(0.5 * w[p] * spins[p] for p in range(n))
    e += sum(0.5 * c[p][q] * spins[p] * spins[q] for p in range(n) for q in range(p + 1, n))
    return e


def enumerate_states(network: TlsNetwork) -> list[BasisState]:
    return [
        BasisState(spins=s, index=i + 1, energy=state_energy(network, s))
        for i, s in enumerate(spin_configurations(network.n_sites))
    ]


def energies(network: TlsNetwork) -> np.ndarray:
    return np.array([s.energy for s in enumerate_states(network)])


def flip_gap(network: TlsNetwork, spins: Sequence[int], site: int) -> float:
    """Energy of ``spins`` with ``site`` up minus the same with it down."""
    c = network.coupling[site]
    return network.site_energy[site] + sum(
        c[q] * spins[q] for q in range(network.n_sites) if q != site
    )


def allowed_transitions(network: TlsNetwork) -> TransitionSet:
    """Single-flip transitions grouped by bath.

    Frequencies come from the flip gap directly rather than from a difference
    of state energies, so exactly degenerate pairs give exactly 0.  Degenerate
    pairs are oriented with the lower index as ``upper``.
    """
    n = network.n_sites
    configs = spin_configurations(n)
    index = {s: i + 1 for i, s in enumerate(configs)}
    entries = []
    for p in range(n):
        for s in configs:
            if s[p] != 1:
                continue
            down = s[:p] + (-1,) + s[p + 1 :]
            i_up, i_down = index[s], index[down]
            gap = flip_gap(network, s, p)
            # spin-up at p always has the lower index, which settles gap == 0
            if gap >= 0:
                entries.append(Transition(p, i_up, i_down, abs(gap)))
            else:
                entries.append(Transition(p, i_down, i_up, abs(gap)))
    return TransitionSet(tuple(entries), n)
