"""Closed-form low-temperature approximations for the diode and the degenerate transistor.

These are reference formulas for validating the numerical solver.  Nothing
in the solver pipeline calls them.

The transistor formulas assume omega_L = omega_M = omega_R = 0,
omega_RL = 0 and omega_LM = omega_MR = Delta.  The eight spin states then
pair up into four degenerate levels

    I = {1, 8} (E = Delta),  II = {2, 7} (E = 0),  III = {3, 6} (E = -Delta),  IV = {4, 5} (E = 0).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import rate_coefficients
from .errors import RegimeWarning

# validity bounds of the first-order expansion in exp(-Delta/T)
MAX_TL_OVER_DELTA = 0.25
MAX_TR_OVER_DELTA = 0.0625

DEGENERATE_PAIRS = {"I": (1, 8), "II": (2, 7), "III": (3, 6), "IV": (4, 5)}


def diode_current_approx(omega_L: float, omega_LR: float, T_L: float) -> float:
    """(omega_L omega_LR / 2) exp(-omega_LR/T_L) / cosh(omega_L/T_L), for omega_R = 0 and a cold right bath."""
    if T_L <= 0:
        return 0.0
    # rewritten so that neither exp nor cosh overflows as T_L -> 0
    a = abs(omega_L) / T_L
    return omega_L * omega_LR * math.exp(-omega_LR / T_L - a) / (1.0 + math.exp(-2.0 * a))


@dataclass(frozen=True)
class ReducedTransistorState:
    rho_I: float
    rho_II: float
    rho_III: float
    rho_IV: float

    @property
    def total(self) -> float:
        return self.rho_I + self.rho_II + self.rho_III + self.rho_IV

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.rho_I, self.rho_II, self.rho_III, self.rho_IV)


def reduce_degenerate(populations) -> ReducedTransistorState:
    """Merge the eight transistor populations into the four degenerate levels."""
    p = np.asarray(populations, dtype=float)
    if p.shape != (8,):
        raise ValueError(f"expected 8 populations, got shape {p.shape}")
    return ReducedTransistorState(
        *(float(p[i - 1] + p[j - 1]) for i, j in DEGENERATE_PAIRS.values())
    )


def _check_regime(Delta, T_L):
    if Delta <= 0:
        raise ValueError(f"Delta must be > 0, got {Delta!r}")
    if T_L / Delta > MAX_TL_OVER_DELTA:
        warnings.warn(
            f"T_L/Delta = {T_L / Delta:.3g} exceeds {MAX_TL_OVER_DELTA}; "
            "first-order expansion in exp(-Delta/T_L) is unreliable",
            RegimeWarning,
            stacklevel=3,
        )


def transistor_populations_approx(Delta: float, T_L: float, T_M: float) -> ReducedTransistorState:
    """First-order populations of levels I-IV (they need not sum to 1 exactly)."""
    _check_regime(Delta, T_L)
    eL = math.exp(-Delta / T_L)
    rho_I = 0.5 * math.exp(-2 * Delta / T_M) + T_M / (4 * Delta + 8 * T_M) * eL**2 if T_M > 0 else 0.0
    return ReducedTransistorState(
        rho_I=rho_I,
        rho_II=(Delta + T_M) / (Delta + 2 * T_M) * eL,
        rho_III=1.0 - eL,
        rho_IV=T_M / (Delta + 2 * T_M) * eL,
    )


def transistor_currents_approx(Delta: float, T_L: float, T_M: float) -> tuple[float, float, float]:
    """First-order (J_L, J_M, J_R) of the degenerate transistor."""
    _check_regime(Delta, T_L)
    if T_M <= 0:
        return 0.0, 0.0, 0.0
    lin = T_M / (Delta + 2 * T_M)
    J_L = Delta**2 * lin * math.exp(-Delta / T_L)
    J_M = Delta**2 * (-lin * math.exp(-2 * Delta / T_L) + 2 * math.exp(-2 * Delta / T_M))
    return J_L, J_M, -J_L


def amplification_approx(Delta: float, T_L: float) -> float:
    """Low-T_M plateau estimate |alpha| ~ exp(Delta/T_L)."""
    return math.exp(Delta / T_L)


def _gamma(omega, T, upper, lower):
    """Net decay rate upper -> lower of a merged pair of levels."""
    up, down = rate_coefficients(omega, T)
    return down * upper - up * lower


def reduced_currents(
    reduced: ReducedTransistorState, Delta: float, T_L: float, T_M: float, T_R: float
) -> tuple[float, float, float]:
    """Exact currents written on the four merged levels.

    J_L = -Delta [G^L(I->IV) + G^L(II->III)],  J_M = -2 Delta G^M(I->III),
    J_R = -Delta [G^R(I->II) + G^R(IV->III)],  with G the net decay rates.
    Zero-frequency II<->IV transitions of bath M carry no heat and drop out.
    """
    r = reduced
    J_L = -Delta * (_gamma(Delta, T_L, r.rho_I, r.rho_IV) + _gamma(Delta, T_L, r.rho_II, r.rho_III))
    J_M = -2 * Delta * _gamma(2 * Delta, T_M, r.rho_I, r.rho_III)
    J_R = -Delta * (_gamma(Delta, T_R, r.rho_I, r.rho_II) + _gamma(Delta, T_R, r.rho_IV, r.rho_III))
    return J_L, J_M, J_R
