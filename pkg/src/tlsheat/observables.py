"""Heat currents, diode rectification, transistor amplification and the J_M searches."""
from __future__ import annotations

import decimal
import math
import warnings
from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from .dynamics import (
    PRECISE_DIGITS,
    PreciseSteadyState,
    RateMatrix,
    build_rate_matrix,
    precise_steady_state,
)
from .errors import DegenerateInput, NoBracket, NoInteriorMinimum, NonConvergenceWarning
from .model import TlsNetwork

_EPS = float(np.finfo(float).eps)
# largest accepted relative change of the emitter slope when the step is halved
RICHARDSON_TOLERANCE = 5e-3
INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARED = (3 - math.sqrt(5)) / 2


@dataclass(frozen=True)
class CurrentReport:
    """Heat injected by each bath into the system (positive = into the system).

    ``resolution`` bounds the absolute round-off error of each current.
    From binary populations it is a few ulps of the gross (one-way) energy
    flow through that bath; from a decimal steady state it is about one ulp
    of the current itself.
    """

    labels: tuple[str, ...]
    current: tuple[float, ...]
    conservation_residual: float
    resolution: tuple[float, ...] = ()

    def __getitem__(self, bath):
        if isinstance(bath, str):
            bath = self.labels.index(bath)
        return self.current[bath]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.current))


def transition_flows(rate_matrix: RateMatrix, populations) -> np.ndarray:
    """Net upward probability flow (lower -> upper) of every transition."""
    p = np.asarray(populations, dtype=float)
    lower = np.array([t.lower - 1 for t in rate_matrix.transitions], dtype=int)
    upper = np.array([t.upper - 1 for t in rate_matrix.transitions], dtype=int)
    return rate_matrix.up_rates * p[lower] - rate_matrix.down_rates * p[upper]


def heat_currents(network: TlsNetwork, populations, rate_matrix: RateMatrix | None = None) -> CurrentReport:
    """Heat currents J_P = sum of w * (net upward flow) over the transitions of bath P.

    Works for any binary population vector, stationary or not.  For the
    steady state prefer :func:`solve_currents`, which avoids the cancellation
    between nearly equal one-way flows.
    """
    rm = rate_matrix if rate_matrix is not None else build_rate_matrix(network)
    p = np.asarray(populations, dtype=float)
    flows = transition_flows(rm, p)
    J = np.zeros(network.n_sites)
    gross = np.zeros(network.n_sites)
    for k, (t, f) in enumerate(zip(rm.transitions, flows)):
        J[t.bath] += t.frequency * f
        gross[t.bath] += t.frequency * (rm.up_rates[k] * p[t.lower - 1] + rm.down_rates[k] * p[t.upper - 1])
    return CurrentReport(
        labels=network.labels,
        current=tuple(float(x) for x in J),
        conservation_residual=float(abs(J.sum())),
        resolution=tuple(float(x) for x in 16 * _EPS * gross),
    )


def solution_currents(solution: PreciseSteadyState) -> CurrentReport:
    """Heat currents of a decimal steady state, rounded once to binary at the end."""
    network = solution.network
    J = [Decimal(0)] * network.n_sites
    gross = [Decimal(0)] * network.n_sites
    p = solution.populations
    with decimal.localcontext(solution.context()):
        for t, w, u, d, f in zip(
            solution.transitions, solution.frequencies, solution.up_rates, solution.down_rates, solution.flows()
        ):
            J[t.bath] += w * f
            gross[t.bath] += w * (u * p[t.lower - 1] + d * p[t.upper - 1])
    current = tuple(float(x) for x in J)
    floor = 10.0 ** (5 - solution.digits)
    return CurrentReport(
        labels=network.labels,
        current=current,
        conservation_residual=abs(math.fsum(current)),
        resolution=tuple(
            _EPS * abs(j) + floor * float(g) for j, g in zip(current, gross)
        ),
    )


def solve_currents(network: TlsNetwork, digits: int = PRECISE_DIGITS) -> CurrentReport:
    """Steady-state heat currents of ``network``, solved in decimal arithmetic."""
    return solution_currents(precise_steady_state(network, digits))


def net_rate(network: TlsNetwork, populations, bath, source: int, target: int, rate_matrix=None) -> float:
    """Net probability flow ``source -> target`` (1-based states) carried by ``bath``.

    This is the Gamma^P_{source,target} of the rate-equation bookkeeping:
    antisymmetric in its state arguments, and the gain of ``target`` from
    ``source``.  ``populations`` may be a binary population vector or a
    :class:`PreciseSteadyState`; the latter gives flows accurate to the last
    bit even when the two one-way flows nearly cancel.
    """
    b = network.bath_index(bath)
    if isinstance(populations, PreciseSteadyState):
        transitions, flows = populations.transitions, populations.flows()
    else:
        rm = rate_matrix if rate_matrix is not None else build_rate_matrix(network)
        transitions, flows = rm.transitions, transition_flows(rm, populations)
    for t, f in zip(transitions, flows):
        if t.bath != b:
            continue
        if (t.lower, t.upper) == (source, target):
            return float(f)
        if (t.upper, t.lower) == (source, target):
            return float(-f)
    raise ValueError(f"bath {bath!r} does not drive {source} <-> {target}")


def rectification_ratio(network: TlsNetwork, T_a: float, T_b: float) -> float:
    """|J_L(T_a, T_b) + J_L(T_b, T_a)| / max(|J_L(T_a, T_b)|, |J_L(T_b, T_a)|)."""
    return rectification_point(network, T_a, T_b)[2]


def _left_current(network):
    rep = solve_currents(network)
    return rep.current[0], rep.resolution[0]


def rectification_point(network: TlsNetwork, T_a: float, T_b: float) -> tuple[float, float, float]:
    """(J_forward, J_reversed, R) for a two-site device, J measured at bath 0."""
    if network.n_sites != 2:
        raise DegenerateInput(f"rectification needs a 2-site network, got {network.n_sites}")
    if T_a == T_b:
        raise DegenerateInput(f"equal temperatures T_a = T_b = {T_a!r} give 0/0")
    j_fwd, r_fwd = _left_current(network.with_temperature(0, T_a).with_temperature(1, T_b))
    j_rev, r_rev = _left_current(network.with_temperature(0, T_b).with_temperature(1, T_a))
    denom = max(abs(j_fwd), abs(j_rev))
    if denom < 1e-30:
        raise DegenerateInput(f"both fluxes vanish (|J| < 1e-30) at T_a={T_a!r}, T_b={T_b!r}")
    if abs(j_fwd) <= r_fwd and abs(j_rev) <= r_rev:
        raise DegenerateInput(
            f"both fluxes ({j_fwd:.3e}, {j_rev:.3e}) are below round-off "
            f"({r_fwd:.1e}, {r_rev:.1e}) at T_a={T_a!r}, T_b={T_b!r}"
        )
    return j_fwd, j_rev, abs(j_fwd + j_rev) / denom


@dataclass(frozen=True)
class AmplificationReport:
    """Amplification of the two outer currents by the base current.

    ``alpha_L``/``alpha_R`` refer to the first and second non-base baths.
    When ``diverged`` is set they are +-inf.  ``richardson_drift`` is the
    relative change of dJ_L/dT_M when the step is halved.
    """

    temperature: float
    alpha_L: float
    alpha_R: float
    dJL_dTM: float
    dJM_dTM: float
    dJR_dTM: float
    diverged: bool
    richardson_drift: float
    delta_T: float


def _outer_baths(network: TlsNetwork, base) -> tuple[int, int, int]:
    if network.n_sites != 3:
        raise DegenerateInput(f"amplification needs a 3-site network, got {network.n_sites}")
    m = network.bath_index(base)
    left, right = (i for i in range(3) if i != m)
    return left, m, right


def current_slopes(network: TlsNetwork, T_M: float, delta_T: float | None = None, base="M"):
    """Richardson-extrapolated central differences of all currents along T_M.

    Returns (slopes, drift) with slopes indexed by bath and drift the
    relative change of the emitter slope when the step is halved.
    """
    _, m, _ = _outer_baths(network, base)
    h = T_M / 1000 if delta_T is None else delta_T
    if not h > 0:
        raise DegenerateInput(f"delta_T must be > 0, got {h!r}")
    if T_M - h < 0:
        raise DegenerateInput(f"T_M - delta_T = {T_M - h!r} is below zero")

    def J(t):
        return np.array(solve_currents(network.with_temperature(m, t)).current)

    d_full = (J(T_M + h) - J(T_M - h)) / (2 * h)
    d_half = (J(T_M + h / 2) - J(T_M - h / 2)) / h
    slopes = (4 * d_half - d_full) / 3
    emitter = 0 if m != 0 else 1
    ref = abs(d_half[emitter])
    drift = abs(d_half[emitter] - d_full[emitter]) / ref if ref > 0 else 0.0
    return slopes, drift


def amplification(
    network: TlsNetwork,
    T_M: float | None = None,
    delta_T: float | None = None,
    base="M",
    threshold: float = 1e-12,
) -> AmplificationReport:
    """alpha_X = dJ_X/dJ_M evaluated as (dJ_X/dT_M) / (dJ_M/dT_M).

    ``T_M`` defaults to the base temperature already in ``network``.
    Divergence is flagged when |dJ_M/dT_M| < threshold * max |dJ_P/dT_M|.
    A NonConvergenceWarning is issued when halving the step moves the
    emitter slope by more than RICHARDSON_TOLERANCE.
    """
    left, m, right = _outer_baths(network, base)
    if T_M is None:
        T_M = network.bath_temperature[m]
    h = T_M / 1000 if delta_T is None else delta_T
    slopes, drift = current_slopes(network, T_M, h, base)
    if drift > RICHARDSON_TOLERANCE:
        warnings.warn(
            f"finite-difference slope at T_M={T_M:g} moved by {drift:.2%} when delta_T was halved",
            NonConvergenceWarning,
            stacklevel=2,
        )
    s_l, s_m, s_r = slopes[left], slopes[m], slopes[right]
    scale = float(np.max(np.abs(slopes)))
    diverged = abs(s_m) < threshold * scale or scale == 0
    if diverged:
        a_l = math.copysign(math.inf, s_l)
        a_r = math.copysign(math.inf, s_r)
    else:
        a_l, a_r = s_l / s_m, s_r / s_m
    return AmplificationReport(
        temperature=float(T_M),
        alpha_L=float(a_l),
        alpha_R=float(a_r),
        dJL_dTM=float(s_l),
        dJM_dTM=float(s_m),
        dJR_dTM=float(s_r),
        diverged=bool(diverged),
        richardson_drift=float(drift),
        delta_T=float(h),
    )


def base_current(network: TlsNetwork, T_M: float, base="M") -> float:
    m = network.bath_index(base)
    return solve_currents(network.with_temperature(m, T_M)).current[m]


def _bisect(f, a, b, fa, ftol, xtol):
    """Bisection with a secant probe per step; ``f(a)`` and ``f(b)`` differ in sign."""
    fb = f(b)
    while b - a > xtol:
        # secant guess, kept only if it lands well inside the bracket
        x = b - fb * (b - a) / (fb - fa) if fb != fa else 0.5 * (a + b)
        if not a + 0.1 * (b - a) < x < b - 0.1 * (b - a):
            x = 0.5 * (a + b)
        fx = f(x)
        if abs(fx) < ftol:
            return x
        if (fx < 0) == (fa < 0):
            a, fa = x, fx
        else:
            b, fb = x, fx
    return a if abs(fa) < abs(fb) else b


def find_jm_zero(
    network: TlsNetwork,
    T_lo: float,
    T_hi: float,
    base="M",
    ftol: float = 1e-14,
    xtol: float = 1e-10,
) -> float:
    """Base temperature in [T_lo, T_hi] at which the base current vanishes."""
    f = lambda t: base_current(network, t, base)  # noqa: E731
    f_lo, f_hi = f(T_lo), f(T_hi)
    if f_lo == 0:
        return T_lo
    if f_hi == 0:
        return T_hi
    if (f_lo < 0) == (f_hi < 0):
        raise NoBracket(
            f"J_{network.labels[network.bath_index(base)]} has the same sign at T={T_lo!r} ({f_lo:.3e}) and T={T_hi!r} ({f_hi:.3e})"
        )
    return float(_bisect(f, T_lo, T_hi, f_lo, ftol, xtol))


def golden_section_search(func, a: float, b: float, tol: float) -> tuple[float, float]:
    """Shrink [a, b] around a minimum of ``func`` until it is narrower than ``tol``."""
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, b
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARED * h
    d = a + INV_PHI * h
    yc, yd = func(c), func(d)
    for _ in range(n - 1):
        h *= INV_PHI
        if yc < yd:
            b, d, yd = d, c, yc
            c = a + INV_PHI_SQUARED * h
            yc = func(c)
        else:
            a, c, yc = c, d, yd
            d = a + INV_PHI * h
            yd = func(d)
    return (a, d) if yc < yd else (c, b)


def find_jm_minimum(
    network: TlsNetwork,
    T_lo: float,
    T_hi: float,
    base="M",
    tol: float = 1e-8,
    threshold: float = 1e-12,
    delta_T: float | None = None,
) -> float:
    """Base temperature of the interior minimum of J_M(T_M) in [T_lo, T_hi].

    Golden-section search narrows the bracket to ``tol``; the result is then
    polished by bisection on the finite-difference slope dJ_M/dT_M (the one
    used by :func:`amplification`) until the slope drops below the
    divergence threshold.
    """
    f = lambda t: base_current(network, t, base)  # noqa: E731
    a, b = golden_section_search(f, T_lo, T_hi, tol)
    x = 0.5 * (a + b)
    edge = max(2 * tol, 1e-12 * abs(T_hi))
    if x - T_lo < edge or T_hi - x < edge:
        raise NoInteriorMinimum(
            f"J_{network.labels[network.bath_index(base)]} is monotone on [{T_lo!r}, {T_hi!r}]; search ended at T={x!r}"
        )
    m = network.bath_index(base)

    def slope(t):
        slopes, _ = current_slopes(network, t, delta_T, base)
        return slopes[m], float(np.max(np.abs(slopes)))

    width = max(b - a, tol)
    for _ in range(20):
        lo, hi = max(x - width, T_lo), min(x + width, T_hi)
        (s_lo, scale), (s_hi, _) = slope(lo), slope(hi)
        if s_lo < 0 < s_hi:
            break
        width *= 4
    else:
        return float(x)
    # half the threshold so amplification() at the result reports divergence
    return float(_bisect(lambda t: slope(t)[0], lo, hi, s_lo, 0.5 * threshold * scale, 4e-16 * hi))
