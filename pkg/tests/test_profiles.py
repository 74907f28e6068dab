import math

import numpy as np
import pytest

from nmwitness.dynamics import ENMParams, RateFunctions, enm_channel, enm_rates
from nmwitness.numerics import kron
from nmwitness.profiles import (
    DepolarizingStep,
    NonMonotoneProfile,
    Scan,
    check_monotone,
    contractive_scan,
    enm_bipartite_trial,
    increases,
    match_entanglement_profile,
    match_profile,
    positive_map_monotonicity_trial,
    contractivity_trial,
)
from nmwitness.states import basis_projector, from_bloch, random_state, trace_distance
from nmwitness.witness import ABC_DIMS, build_scenario, tripartite_initial, witness_negativity

GRID = np.linspace(0.0, 6.0, 61)


def test_increases_treats_inf_pairs_as_flat():
    assert np.allclose(increases([math.inf, math.inf, 1.0]), [0.0, -math.inf])


def test_scan_monotone_flag():
    assert Scan(np.arange(3.0), np.array([3.0, 2.0, 2.0])).monotone()
    assert not Scan(np.arange(3.0), np.array([3.0, 2.0, 2.5])).monotone()


def test_contractive_scan_closed_form():
    rho, sigma = basis_projector(0, 2), basis_projector(1, 2)
    scan = contractive_scan("trace_distance", ENMParams(), rho, sigma, GRID)
    assert np.allclose(scan.values, np.exp(-2 * GRID), atol=1e-12)
    assert scan.monotone()


def test_contractive_scan_rejects_bad_grid():
    with pytest.raises(ValueError):
        contractive_scan("trace_distance", ENMParams(), np.eye(2) / 2, np.eye(2) / 2, [1.0, 0.5])


def test_contractive_scan_with_rates_matches_closed_form():
    rho, sigma = from_bloch([0.5, 0.2, 0.1]), from_bloch([-0.3, 0.0, 0.6])
    p = ENMParams()
    a = contractive_scan("infidelity", enm_rates(p), rho, sigma, GRID[:11])
    b = contractive_scan("infidelity", p, rho, sigma, GRID[:11])
    assert np.allclose(a.values, b.values, atol=1e-9)


def test_contractivity_trial_no_increase():
    reports = contractivity_trial(["trace_distance", "infidelity", "relative_entropy", "renyi"], 20, seed=3)
    for rep in reports.values():
        assert rep.passed()


def test_contractivity_trial_detects_non_p_divisible_rates():
    rep = contractivity_trial(["trace_distance"], 5, seed=1, dynamics=RateFunctions.constant(1, 1, -2))
    assert not rep["trace_distance"].passed()


def test_depolarizing_step():
    rho = from_bloch([0, 0, 1])
    assert np.allclose(DepolarizingStep(1.0, 0.3)(rho), rho)
    assert np.allclose(DepolarizingStep(0.0, 0.3)(rho), np.eye(2) / 2)
    assert DepolarizingStep(0.25, 0.5).q == pytest.approx(0.5)
    with pytest.raises(ValueError):
        DepolarizingStep(1.5, 0.1)


def test_depolarizing_local_action(rng):
    ra, rb = random_state(2, rng), random_state(3, rng)
    w = DepolarizingStep(0.4, 1.0, 3)
    assert np.allclose(w.apply_local(kron(ra, rb), (2, 3), 1), kron(ra, w(rb)))
    w2 = DepolarizingStep(0.4, 1.0, 2)
    assert np.allclose(w2.apply_local(kron(ra, rb), (2, 3), 0), kron(w2(ra), rb))


def test_check_monotone_reports_index():
    with pytest.raises(NonMonotoneProfile) as err:
        check_monotone([1.0, 0.9, 0.95, 0.5])
    assert err.value.index == 2


def test_match_enm_trace_distance_profile():
    rho, sigma = from_bloch([0.3, 0.1, 0.8]), from_bloch([-0.2, 0.4, -0.5])
    targets = contractive_scan("trace_distance", ENMParams(), rho, sigma, GRID).values
    m = match_profile(targets, GRID, "trace_distance", rho, sigma)
    assert m.ok and m.max_error <= 1e-8
    assert np.all((m.a >= 0) & (m.a <= 1))


def test_match_synthetic_profile():
    rho, sigma = basis_projector(0, 2), basis_projector(1, 2)
    times = np.linspace(0, 3, 31)
    targets = 1.0 / (1.0 + times**2)
    m = match_profile(targets, times, "trace_distance", rho, sigma)
    assert m.ok


def test_match_flat_then_floor():
    rho, sigma = basis_projector(0, 2), basis_projector(1, 2)
    m = match_profile([1.0, 1.0, 0.0, 0.0], [0.0, 1.0, 2.0, 3.0], "trace_distance", rho, sigma)
    assert m.ok
    assert np.allclose(m.a, [1.0, 0.0, 0.0])


def test_match_flags_unreachable_start():
    rho, sigma = basis_projector(0, 2), basis_projector(1, 2)
    m = match_profile([0.5, 0.4], [0.0, 1.0], "trace_distance", rho, sigma)
    assert not m.feasible[0] and not m.ok


def test_match_rejects_increasing_target():
    rho, sigma = basis_projector(0, 2), basis_projector(1, 2)
    with pytest.raises(NonMonotoneProfile):
        match_profile([1.0, 0.5, 0.6], [0.0, 1.0, 2.0], "trace_distance", rho, sigma)


def test_match_entanglement_profile():
    s = build_scenario(ENMParams(), 1.0)
    times = np.linspace(0.0, 1.0, 11)
    targets = [witness_negativity(s, t) for t in times]
    m = match_entanglement_profile(targets, times, tripartite_initial(s), ABC_DIMS, cut=3)
    assert m.ok


def test_trials_pass():
    assert positive_map_monotonicity_trial(50, seed=2).passed()
    assert enm_bipartite_trial(20, seed=2).passed()


def test_enm_example_distance():
    ch = enm_channel(ENMParams(), 2.0)
    assert trace_distance(ch(basis_projector(0, 2)), ch(basis_projector(1, 2))) == pytest.approx(math.exp(-4))


def test_match_step_profile_stays_feasible():
    rho, sigma = basis_projector(0, 2), basis_projector(1, 2)
    targets = np.where(GRID < 3, 1.0, 0.4)
    m = match_profile(targets, GRID, "trace_distance", rho, sigma)
    assert m.ok and np.all(m.feasible)
    assert np.allclose(m.a[31:], 1.0)


def test_match_fine_grid_tiny_a():
    # a drop to the floor over a short step drives a below the float range
    rho, sigma = basis_projector(0, 2), basis_projector(1, 2)
    times = np.array([0.0, 0.001, 0.002])
    m = match_profile([1.0, 1e-3, 1e-3], times, "trace_distance", rho, sigma)
    assert m.ok and m.max_error <= 1e-8
