"""Population master equation: bath rates, generator assembly, steady state, time evolution.

With a diagonal system Hamiltonian the secular Lindblad equation closes on
the populations, leaving a classical rate equation dp/dt = G p.  For a
transition of frequency w driven by a bath at temperature T with an ohmic
spectral density I(w) = w,

    down rate = w (1 + n(w, T)),   up rate = w n(w, T),

and w -> 0 gives both rates equal to T.
"""
from __future__ import annotations

import decimal
import math
import warnings
from dataclasses import dataclass
from decimal import Decimal

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import NonConvergenceWarning, SingularSystem
from .model import TlsNetwork, TransitionSet, allowed_transitions, energies, spin_configurations

# exp(-x) underflows to a denormal near here; n(w, T) is e^{-x} to double precision
_EXP_CUTOFF = 700.0
# working precision of precise_steady_state
PRECISE_DIGITS = 50


def bose_einstein(omega: float, temperature: float) -> float:
    """Mean occupation 1/(exp(omega/T) - 1) of a bath mode.

    ``omega`` must be strictly positive; use :func:`rate_coefficients` for
    the zero-frequency limit.
    """
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega!r}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        return 0.0
    x = omega / temperature
    if x > _EXP_CUTOFF:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def rate_coefficients(omega: float, temperature: float, coupling: float = 1.0) -> tuple[float, float]:
    """(up, down) rates of one transition, ohmic spectral density times ``coupling``."""
    if omega < 0:
        raise ValueError(f"omega must be >= 0, got {omega!r}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature!r}")
    if omega == 0:
        return coupling * temperature, coupling * temperature
    if temperature == 0:
        return 0.0, coupling * omega
    x = omega / temperature
    # omega * n written as omega / expm1 stays accurate as omega -> 0
    up = omega * math.exp(-x) if x > _EXP_CUTOFF else omega / math.expm1(x)
    return coupling * up, coupling * (up + omega)


@dataclass(frozen=True, eq=False)
class RateMatrix:
    """Generator of dp/dt = G p plus the per-transition rates it was built from.

    ``generator[j, i]`` is the total rate i -> j (0-based).  ``up_rates[k]``
    and ``down_rates[k]`` belong to ``transitions.entries[k]``.
    """

    network: TlsNetwork
    transitions: TransitionSet
    up_rates: np.ndarray
    down_rates: np.ndarray
    generator: np.ndarray
    energies: np.ndarray

    @property
    def n_states(self) -> int:
        return self.generator.shape[0]


def _frozen(a):
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


def build_rate_matrix(network: TlsNetwork, include_zero_frequency: bool = True) -> RateMatrix:
    """Assemble the population generator of ``network``.

    ``include_zero_frequency=False`` drops degenerate (w = 0) transitions;
    it exists to show that they matter for the populations.
    """
    transitions = allowed_transitions(network)
    if not include_zero_frequency:
        transitions = TransitionSet(
            tuple(t for t in transitions if t.frequency != 0), transitions.n_baths
        )
    dim = network.n_states
    up = np.empty(len(transitions))
    down = np.empty(len(transitions))
    G = np.zeros((dim, dim))
    for k, t in enumerate(transitions):
        up[k], down[k] = rate_coefficients(
            t.frequency, network.bath_temperature[t.bath], network.bath_coupling[t.bath]
        )
        u, d = t.upper - 1, t.lower - 1
        G[u, d] += up[k]
        G[d, u] += down[k]
    # diagonal from the off-diagonal column sums so columns sum to zero exactly
    np.fill_diagonal(G, 0.0)
    G[np.diag_indices(dim)] = -G.sum(axis=0)
    return RateMatrix(
        network=network,
        transitions=transitions,
        up_rates=_frozen(up),
        down_rates=_frozen(down),
        generator=_frozen(G),
        energies=_frozen(energies(network)),
    )


def closed_classes(rate_matrix: RateMatrix) -> list[list[int]]:
    """Closed communicating classes of the transition graph, as 0-based state lists."""
    G = rate_matrix.generator
    return _closed_classes((G.T > 0) & ~np.eye(rate_matrix.n_states, dtype=bool))


def _closed_classes(adjacency: np.ndarray) -> list[list[int]]:
    """Closed classes of a directed graph; ``adjacency[i, j]`` means an edge i -> j."""
    n_comp, label = connected_components(adjacency, directed=True, connection="strong")
    leaves = np.ones(n_comp, dtype=bool)
    src, dst = np.nonzero(adjacency)
    for i, j in zip(src, dst):
        if label[i] != label[j]:
            leaves[label[i]] = False
    return [np.flatnonzero(label == c).tolist() for c in range(n_comp) if leaves[c]]


def _gth(Q: np.ndarray) -> np.ndarray:
    """Stationary vector of an irreducible rate matrix Q[i, j] = rate i -> j.

    Grassmann-Taksar-Heyman state reduction: no subtractions, so tiny
    populations keep full relative accuracy.  State 0 is the reference;
    callers put the most populated state there.
    """
    Q = Q.copy()
    np.fill_diagonal(Q, 0)
    n = Q.shape[0]
    out = np.empty(n, dtype=Q.dtype)
    for k in range(n - 1, 0, -1):
        out[k] = Q[k, :k].sum()
        Q[:k, :k] += np.outer(Q[:k, k], Q[k, :k]) / out[k]
    pi = np.zeros(n, dtype=Q.dtype)
    pi[0] = 1
    for k in range(1, n):
        pi[k] = pi[:k] @ Q[:k, k] / out[k]
        if pi[k] > 1e100:
            pi[: k + 1] /= pi[k]
    return pi / pi.sum()


def _normalized_solve(G: np.ndarray) -> np.ndarray:
    """Replace the last balance equation by sum(p) = 1 and solve densely."""
    A = np.array(G, dtype=float)
    A[-1, :] = 1.0
    b = np.zeros(A.shape[0])
    b[-1] = 1.0
    return np.linalg.solve(A, b)


def steady_state(rate_matrix: RateMatrix, method: str = "gth") -> np.ndarray:
    """Unique stationary populations of ``rate_matrix``.

    ``method="gth"`` (default) uses subtraction-free state reduction, which
    resolves populations down to ~1e-300 with full relative precision.
    ``method="dense"`` swaps the last balance equation for the trace
    condition and calls a dense solver.

    Raises SingularSystem when more than one closed class exists.
    """
    classes = closed_classes(rate_matrix)
    if len(classes) != 1:
        raise SingularSystem([[i + 1 for i in c] for c in classes])
    G = rate_matrix.generator
    n = rate_matrix.n_states
    if method == "dense":
        p = _normalized_solve(G)
    elif method == "gth":
        # transient states carry no weight; low energies first so that the
        # reference is near the ground state and high-energy states go first
        order = sorted(classes[0], key=lambda i: (rate_matrix.energies[i], i))
        p = np.zeros(n)
        p[order] = _gth(G.T[np.ix_(order, order)]) if len(order) > 1 else 1.0
    else:
        raise ValueError(f"unknown method {method!r}")
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    p.setflags(write=False)
    return p


def _decimal_rates(omega, temperature: float, coupling: float) -> tuple[Decimal, Decimal]:
    """(up, down) of one transition in the current decimal context, from the exact binary inputs."""
    w, T, c = Decimal(omega), Decimal(temperature), Decimal(coupling)
    if w == 0:
        return c * T, c * T
    if T == 0:
        return Decimal(0), c * w
    x = w / T
    # 1 - e^{-x} cancels for small x; widen the context by the digits it loses
    with decimal.localcontext() as ctx:
        ctx.prec += max(0, -x.adjusted()) + 5
        q = (-x).exp()
        up = c * w * q / (1 - q)
    return +up, +(up + c * w)


@dataclass(frozen=True, eq=False)
class PreciseSteadyState:
    """Steady state solved in ``digits``-digit decimal arithmetic.

    Rates are recomputed in decimal from the exact binary values of the
    network parameters.  Transition frequencies are differences of one
    table of state energies, so every cycle of transitions closes exactly
    and a uniform temperature satisfies detailed balance to ``digits``
    digits.  Net flows on nearly balanced transitions keep full relative
    accuracy.  ``frequencies``, ``up_rates``, ``down_rates`` and
    ``populations`` hold Decimals; rates follow the orientation of
    ``transitions`` even where the decimal frequency differs from the binary
    one by an ulp.
    """

    network: TlsNetwork
    transitions: TransitionSet
    frequencies: tuple
    up_rates: tuple
    down_rates: tuple
    populations: tuple
    digits: int

    def context(self) -> decimal.Context:
        return _decimal_context(self.digits)

    def flows(self) -> tuple:
        """Net upward flow (lower -> upper) of every transition, as Decimals."""
        p = self.populations
        with decimal.localcontext(self.context()):
            return tuple(
                u * p[t.lower - 1] - d * p[t.upper - 1]
                for t, u, d in zip(self.transitions, self.up_rates, self.down_rates)
            )

    def populations_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.populations])


def _decimal_energies(network: TlsNetwork) -> list[Decimal]:
    w = [Decimal(x) for x in network.site_energy]
    c = [[Decimal(x) for x in row] for row in network.coupling]
    n = network.n_sites
    return [
        (sum(w[p] * s[p] for p in range(n)) + sum(c[p][q] * s[p] * s[q] for p in range(n) for q in range(p + 1, n)))
        / 2
        for s in spin_configurations(n)
    ]


def _decimal_context(digits: int) -> decimal.Context:
    return decimal.Context(prec=digits, Emin=decimal.MIN_EMIN, Emax=decimal.MAX_EMAX)


def precise_steady_state(network: TlsNetwork, digits: int = PRECISE_DIGITS) -> PreciseSteadyState:
    """Steady state of ``network`` by state reduction in decimal arithmetic.

    Rates that underflow in binary floating point stay positive here, so
    the transition graph is the exact one.  Raises SingularSystem when more
    than one closed class exists.
    """
    transitions = allowed_transitions(network)
    dim = network.n_states
    with decimal.localcontext(_decimal_context(digits)):
        E = _decimal_energies(network)
        freq, up, down, cache = [], [], [], {}
        Q = np.full((dim, dim), Decimal(0), dtype=object)  # Q[i, j] = rate i -> j
        for t in transitions:
            g = E[t.upper - 1] - E[t.lower - 1]
            key = (abs(g), network.bath_temperature[t.bath], network.bath_coupling[t.bath])
            if key not in cache:
                cache[key] = _decimal_rates(*key)
            u, d = cache[key] if g >= 0 else cache[key][::-1]
            freq.append(g)
            up.append(u)
            down.append(d)
            Q[t.lower - 1, t.upper - 1] += u
            Q[t.upper - 1, t.lower - 1] += d
        # every single flip is a transition, so with all rates positive the chain is irreducible
        states = range(dim)
        if not all(r > 0 for r in up + down):
            adjacency = np.array([[q > 0 for q in row] for row in Q]) & ~np.eye(dim, dtype=bool)
            classes = _closed_classes(adjacency)
            if len(classes) != 1:
                raise SingularSystem([[i + 1 for i in c] for c in classes])
            states = classes[0]
        eps = energies(network)
        order = sorted(states, key=lambda i: (eps[i], i))
        p = [Decimal(0)] * dim
        pi = _gth(Q[np.ix_(order, order)]) if len(order) > 1 else [Decimal(1)]
        for i, x in zip(order, pi):
            p[i] = +x
    return PreciseSteadyState(
        network=network,
        transitions=transitions,
        frequencies=tuple(freq),
        up_rates=tuple(up),
        down_rates=tuple(down),
        populations=tuple(p),
        digits=digits,
    )


def max_escape_rate(rate_matrix: RateMatrix) -> float:
    return float(np.max(np.abs(np.diag(rate_matrix.generator)), initial=0.0))


def relaxation_time(rate_matrix: RateMatrix) -> float:
    """Inverse spectral gap of the generator (inf if there is no relaxation)."""
    lam = np.linalg.eigvals(rate_matrix.generator)
    scale = max(max_escape_rate(rate_matrix), 1e-300)
    decays = -lam.real[np.abs(lam) > 1e-12 * scale]
    if decays.size == 0:
        return math.inf
    return 1.0 / decays.min()


def _rk4_propagator(G: np.ndarray, h: float) -> np.ndarray:
    hG = h * G
    term = np.eye(G.shape[0])
    M = term.copy()
    for k in range(1, 5):
        term = term @ hG / k
        M = M + term
    return M


def evolve(
    rate_matrix: RateMatrix,
    initial,
    duration: float,
    step: float | None = None,
    tol: float = 1e-10,
) -> np.ndarray:
    """Integrate dp/dt = G p for ``duration`` with fixed-step classical RK4.

    The step defaults to (and may not exceed) 0.1 / max escape rate.  For
    a linear, autonomous system every RK4 step applies the same matrix, so
    n steps are taken by binary powering of that matrix, renormalising the
    populations after every product.  A NonConvergenceWarning is issued if
    ``max|G p| > tol * max escape rate`` at the end.
    """
    p = np.array(initial, dtype=float)
    if p.shape != (rate_matrix.n_states,):
        raise ValueError(f"initial must have length {rate_matrix.n_states}")
    if duration < 0:
        raise ValueError("duration must be >= 0")
    G = np.asarray(rate_matrix.generator)
    rate = max_escape_rate(rate_matrix)
    if rate == 0 or duration == 0:
        return p
    h_max = 0.1 / rate
    if step is None:
        step = h_max
    elif step <= 0 or step > h_max * (1 + 1e-12):
        raise ValueError(f"step must be in (0, {h_max:.6g}] for this generator, got {step!r}")
    n_steps = max(1, math.ceil(duration / step - 1e-9))
    M = _rk4_propagator(G, duration / n_steps)
    power = M
    n = n_steps
    while n:
        if n & 1:
            p = power @ p
            p /= p.sum()
        n >>= 1
        if n:
            power = power @ power
    drift = float(np.max(np.abs(G @ p)))
    if drift > tol * rate:
        warnings.warn(
            f"populations still drifting after t={duration:g}: max|dp/dt| = {drift:.3e}",
            NonConvergenceWarning,
            stacklevel=2,
        )
    return p
