import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_network
from tlsheat import (
    DegenerateInput,
    NoBracket,
    NoInteriorMinimum,
    NonConvergenceWarning,
    TlsNetwork,
    amplification,
    build_rate_matrix,
    diode,
    find_jm_minimum,
    find_jm_zero,
    heat_currents,
    net_rate,
    precise_steady_state,
    rectification_ratio,
    solve_currents,
    steady_state,
    transistor,
)
from tlsheat.dynamics import RateMatrix


def test_diode_chain_and_current(reference_diode):
    rm = build_rate_matrix(reference_diode)
    p = steady_state(rm)
    g = [
        net_rate(reference_diode, p, "L", 3, 1),
        net_rate(reference_diode, p, "L", 2, 4),
        net_rate(reference_diode, p, "R", 1, 2),
        net_rate(reference_diode, p, "R", 4, 3),
    ]
    assert g == pytest.approx([g[0]] * 4, rel=1e-12)
    J = heat_currents(reference_diode, p)
    assert J["L"] > 0
    assert J["L"] == pytest.approx(2 * 0.1 * g[0], rel=1e-12)
    assert J["R"] == pytest.approx(-J["L"], rel=1e-12)


def test_net_rate_is_antisymmetric(reference_diode):
    p = steady_state(build_rate_matrix(reference_diode))
    assert net_rate(reference_diode, p, "L", 1, 3) == -net_rate(reference_diode, p, "L", 3, 1)
    with pytest.raises(ValueError):
        net_rate(reference_diode, p, "L", 1, 4)


@pytest.mark.parametrize("T", [0.05, 1.0, 7.0])
def test_uniform_temperature_no_current(T):
    for net in (diode(1, 0, 0.1, T, T), transistor(1, T, T, T)):
        J = solve_currents(net)
        assert max(abs(j) for j in J.current) <= 1e-12


def test_currents_off_steady_state_are_defined(reference_diode):
    J = heat_currents(reference_diode, [0.25] * 4)
    assert all(math.isfinite(j) for j in J.current)


def test_transistor_base_current_smallest(reference_transistor):
    for T in np.geomspace(0.005, 0.1, 60):
        J = solve_currents(reference_transistor.with_temperatures(M=T))
        assert abs(J["M"]) < abs(J["L"])
        assert abs(J["M"]) < abs(J["R"])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31))
def test_conservation_and_second_law(seed):
    net = random_network(np.random.default_rng(seed))
    J = np.array(solve_currents(net).current)
    scale = np.abs(J).max()
    assert abs(J.sum()) <= max(1e-10 * scale, 1e-14)
    entropy = -np.sum(J / np.array(net.bath_temperature))
    assert entropy >= -1e-12 * np.sum(np.abs(J) / np.array(net.bath_temperature))


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2), st.floats(0, 2), st.floats(0.01, 2), st.floats(0.05, 5), st.floats(0.05, 5))
def test_full_swap_antisymmetry(wl, wr, wlr, tl, tr):
    a = solve_currents(diode(wl, wr, wlr, tl, tr))
    b = solve_currents(diode(wr, wl, wlr, tr, tl))
    assert b["R"] == pytest.approx(a["L"], rel=1e-9, abs=1e-15)


def test_zero_frequency_transitions(reference_transistor):
    rm = build_rate_matrix(reference_transistor)
    p = steady_state(rm)
    zero = [k for k, t in enumerate(rm.transitions) if t.frequency == 0]
    assert len(zero) == 2
    # their flows are nonzero but carry no energy
    J = heat_currents(reference_transistor, p, rm)
    masked = RateMatrix(
        network=rm.network,
        transitions=rm.transitions,
        up_rates=np.where(np.isin(np.arange(12), zero), 0.0, rm.up_rates),
        down_rates=np.where(np.isin(np.arange(12), zero), 0.0, rm.down_rates),
        generator=rm.generator,
        energies=rm.energies,
    )
    assert heat_currents(reference_transistor, p, masked).current == J.current
    # dropping the transitions from the dynamics changes the populations
    q = steady_state(build_rate_matrix(reference_transistor, include_zero_frequency=False))
    assert np.max(np.abs(q - p) / p) > 0.1


# --- rectification ----------------------------------------------------------------------


@pytest.mark.parametrize("ta, tb", [(0.3, 2.0), (5.0, 0.2), (1.0, 1.1), (0.05, 20.0)])
def test_symmetric_device_does_not_rectify(ta, tb):
    assert rectification_ratio(diode(0.8, 0.8, 0.2, 1, 1), ta, tb) <= 1e-10


def test_diode_rectifies_towards_one_as_cold_end_freezes():
    net = diode(1, 0, 0.1, 1, 1)
    Rs = [rectification_ratio(net, t, 0.1) for t in (0.05, 0.02, 1e-3)]
    assert Rs[0] < Rs[1] <= Rs[2]
    assert Rs[2] == pytest.approx(1.0, abs=1e-8)


def test_rectification_is_weak_for_hot_baths():
    net = diode(1, 0, 0.1, 1, 1)
    assert rectification_ratio(net, 50, 100) < 1e-3
    assert rectification_ratio(net, 10, 100) < 1e-2


def test_rectification_errors():
    net = diode(1, 0, 0.1, 1, 1)
    with pytest.raises(DegenerateInput):
        rectification_ratio(net, 0.5, 0.5)
    with pytest.raises(DegenerateInput):
        rectification_ratio(transistor(1, 1, 1, 1), 0.5, 0.6)
    with pytest.raises(DegenerateInput):
        rectification_ratio(net, 1e-4, 1e-3)  # both fluxes underflow
    with pytest.raises(DegenerateInput):
        # both directions frozen far below the 1e-30 floor
        rectification_ratio(diode(0.8, 0.8, 0.2, 1, 1), 1e-3, 2e-3)


def test_symmetric_device_in_extreme_regime():
    # currents ~1e-27 next to O(1) gross flows through the hot bath
    assert rectification_ratio(diode(0.8, 0.8, 0.2, 1, 1), 5.0, 0.01) <= 1e-10


def test_resolution_bounds_current_error():
    net = diode(0.8, 0.8, 0.2, 5.0, 0.01)
    precise = solve_currents(net)
    rm = build_rate_matrix(net)
    binary = heat_currents(net, steady_state(rm), rm)
    # binary populations resolve only a few ulps of the O(1) gross flow
    assert 1e-18 < binary.resolution[0] < 1e-13
    for jb, rb, jp, rp in zip(binary.current, binary.resolution, precise.current, precise.resolution):
        assert abs(jb - jp) <= rb
        assert rp <= 2 * np.finfo(float).eps * abs(jp) + 1e-40
    assert precise.current[0] == pytest.approx(-precise.current[1], rel=1e-15)
    assert 0 < precise.current[0] < 1e-25


def test_net_rate_from_precise_solution_balances_exactly():
    net = diode(1.0, 0.0, 0.1, 0.05, 8.0)
    sol = precise_steady_state(net)
    g = [net_rate(net, sol, "L", 3, 1), net_rate(net, sol, "L", 2, 4),
         net_rate(net, sol, "R", 1, 2), net_rate(net, sol, "R", 4, 3)]
    assert g == [g[0]] * 4
    p = sol.populations_array()
    assert net_rate(net, p, "R", 4, 3) == pytest.approx(g[0], rel=1e-6)


# --- amplification and J_M searches ------------------------------------------------------


def test_amplification_sums_to_minus_one(reference_transistor):
    for T in (0.01, 0.03, 0.06, 0.085, 0.095):
        a = amplification(reference_transistor, T)
        assert a.alpha_L + a.alpha_R == pytest.approx(-1.0, abs=1e-6 * abs(a.alpha_L))


def test_amplification_plateau(reference_transistor):
    a = amplification(reference_transistor, 0.02)
    assert abs(a.alpha_L) == pytest.approx(math.exp(10), rel=0.01)
    assert a.richardson_drift < 0.005


def test_amplification_matches_dense_sweep(reference_transistor):
    # independent slope estimate: np.gradient over a dense grid, away from the J_M minimum
    T = np.linspace(0.08, 0.1, 2001)
    J = np.array([solve_currents(reference_transistor.with_temperatures(M=t)).current for t in T])
    dJ = np.gradient(J, T, axis=0)
    for k in (200, 1000, 1800):
        a = amplification(reference_transistor, T[k])
        assert a.alpha_L == pytest.approx(dJ[k, 0] / dJ[k, 1], rel=0.01)
        assert a.alpha_R == pytest.approx(dJ[k, 2] / dJ[k, 1], rel=0.01)


def test_amplification_warns_on_coarse_step(reference_transistor):
    with pytest.warns(NonConvergenceWarning, match="delta_T was halved"):
        a = amplification(reference_transistor, 0.09, delta_T=0.04)
    assert a.richardson_drift > 0.005


def test_amplification_errors(reference_transistor, reference_diode):
    with pytest.raises(DegenerateInput):
        amplification(reference_transistor, 0.01, delta_T=0.02)
    with pytest.raises(DegenerateInput):
        amplification(reference_diode, 0.01)


def test_jm_zero(reference_transistor):
    T0 = find_jm_zero(reference_transistor, 0.02, 0.1)
    assert T0 == pytest.approx(0.08581, abs=5e-5)
    J = solve_currents(reference_transistor.with_temperatures(M=T0))
    assert abs(J["M"]) < 1e-14


def test_jm_zero_without_bracket(reference_transistor):
    with pytest.raises(NoBracket):
        find_jm_zero(reference_transistor, 0.02, 0.07)


def test_jm_minimum_diverges(reference_transistor):
    Tm = find_jm_minimum(reference_transistor, 0.02, 0.1)
    assert Tm == pytest.approx(0.07444, abs=5e-4)
    assert amplification(reference_transistor, Tm).diverged
    a = amplification(reference_transistor, Tm)
    assert math.isinf(a.alpha_L) and math.isinf(a.alpha_R)


def test_jm_monotone_region_has_no_minimum(reference_transistor):
    T = np.linspace(0.002, 0.02, 200)
    JM = [solve_currents(reference_transistor.with_temperatures(M=t))["M"] for t in T]
    assert np.all(np.diff(JM) < 0)
    with pytest.raises(NoInteriorMinimum):
        find_jm_minimum(reference_transistor, 0.002, 0.02)


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_coupling_sign_is_accepted(sign):
    c = 0.3 * sign
    net = TlsNetwork((1.0, 0.4, 0.0), ((0, c, 0.1), (c, 0, c), (0.1, c, 0)), (1.0, 0.3, 0.05))
    J = solve_currents(net)
    assert J.conservation_residual <= 1e-16 * max(abs(j) for j in J.current)
    assert J["L"] > 0 > J["R"]
