import math

import numpy as np
import pytest

from nmwitness.dynamics import ENMParams
from nmwitness.numerics import partial_trace, trace_norm
from nmwitness.states import check_state, maximally_mixed, negativity, trace_distance, von_neumann_entropy
from nmwitness.witness import (
    ABC_DIMS,
    AB_DIMS,
    analytic_trace_distance,
    build_scenario,
    closed_form_flag_pullback,
    closed_form_phi_pullback,
    distillability_check,
    evolve,
    flagged_state,
    forward_difference,
    lambda_star,
    mixture_entropy,
    pull_back,
    pullback_min_eigenvalue,
    right_derivative,
    scan_lambda_star,
    t_up,
    target_states,
    trace_distance_curve,
    tripartite_initial,
    witness_negativity,
)


@pytest.fixture(scope="module")
def scenario():
    return build_scenario(ENMParams(2.0, 0.5), 1.0)


def test_lambda_star_example():
    assert lambda_star(ENMParams(2.0, 0.5), 1.0) == pytest.approx(1 / (3 * math.e**2 - 2))


def test_targets_have_trace_distance_lambda():
    a, b = target_states(0.3)
    assert trace_distance(a, b) == pytest.approx(0.3, abs=1e-12)


def test_pullbacks_match_closed_forms(scenario):
    assert np.allclose(scenario.rho1, closed_form_phi_pullback(scenario.params, scenario.lambda_star), atol=1e-13)
    assert np.allclose(scenario.rho2, closed_form_flag_pullback(scenario.lambda_star), atol=1e-13)
    assert np.trace(closed_form_flag_pullback(0.2)).real == pytest.approx(1.0)


def test_pullback_fixes_maximally_mixed():
    p = ENMParams(3.0, 1.0)
    mixed = maximally_mixed(6)
    assert np.allclose(pull_back(p, 0.7, mixed), mixed, atol=1e-12)


def test_scenario_states_are_physical(scenario):
    for rho in (scenario.rho1, scenario.rho2, tripartite_initial(scenario)):
        check_state(rho)


def test_lambda_star_is_boundary(scenario):
    p, ts, lam = scenario.params, scenario.t_star, scenario.lambda_star
    assert pullback_min_eigenvalue(p, ts, lam) == pytest.approx(0.0, abs=1e-12)
    assert pullback_min_eigenvalue(p, ts, lam * 1.01) < 0


@pytest.mark.parametrize("alpha,c,ts", [(1, 0.25, 0.1), (2, 0.5, 1), (3, 1, 2)])
def test_scan_agrees_with_closed_form(alpha, c, ts):
    p = ENMParams(alpha, c)
    assert abs(scan_lambda_star(p, ts) - lambda_star(p, ts)) <= 1e-8


def test_states_reach_targets_at_t_star(scenario):
    r1, r2 = scenario.evolve_pair(scenario.t_star)
    a, b = target_states(scenario.lambda_star)
    assert np.allclose(r1, a, atol=1e-12) and np.allclose(r2, b, atol=1e-12)


def test_initial_negativity_example(scenario):
    # true AB|C negativity is a quarter of the trace norm
    assert witness_negativity(scenario, 0.0) == pytest.approx(0.5 * scenario.lambda_star * math.e**2, abs=1e-12)
    assert witness_negativity(scenario, 0.0) == pytest.approx(0.183195, abs=1e-6)
    assert trace_distance_curve(scenario, 0.0) == pytest.approx(0.73278, abs=1e-5)


def test_shortcut_matches_full(scenario):
    for t in (0.0, 0.4, 1.0, 1.3, 3.0):
        full = witness_negativity(scenario, t, "full")
        assert abs(full - witness_negativity(scenario, t, "shortcut")) <= 1e-12
        assert full == pytest.approx(trace_distance_curve(scenario, t) / 4, abs=1e-12)


def test_full_state_is_ab_c_entangled(scenario):
    state = evolve(scenario, 0.5)
    assert state.shape == (24, 24)
    assert negativity(state, ABC_DIMS, cut=3) > 0


def test_unknown_method(scenario):
    with pytest.raises(ValueError):
        witness_negativity(scenario, 0.0, "magic")


def test_analytic_matches_numeric(scenario):
    tu = t_up(scenario)
    for t in np.linspace(0, 5, 101):
        assert abs(analytic_trace_distance(scenario, t, tu) - trace_distance_curve(scenario, t)) <= 1e-9


def test_analytic_revival_branch():
    s = build_scenario(ENMParams(2.0, 0.5), 0.01)
    tu = t_up(s)
    assert tu == pytest.approx(0.030001, abs=1e-5)
    for t in (0.02, tu + 0.01, 2.0, 5.0):
        assert abs(analytic_trace_distance(s, t, tu) - trace_distance_curve(s, t)) <= 1e-9
    assert analytic_trace_distance(s, 5.0, tu) == pytest.approx(2 * s.lambda_star)


def test_no_revival_time_for_late_t_star(scenario):
    assert t_up(scenario) is None


def test_right_derivative_example(scenario):
    assert right_derivative(scenario) == pytest.approx(0.0114571652, rel=1e-8)
    half = lambda t: trace_distance_curve(scenario, t) / 2  # noqa: E731
    fd = forward_difference(half, scenario.t_star)
    assert abs(fd - right_derivative(scenario)) <= 1e-4 * right_derivative(scenario)


def test_negativity_kink_at_t_star(scenario):
    ts = scenario.t_star
    before = [witness_negativity(scenario, t) for t in np.linspace(0, ts, 50)]
    assert np.all(np.diff(before) <= 1e-12)
    after = [witness_negativity(scenario, t) for t in np.linspace(ts, ts + 0.05, 20)]
    assert np.all(np.diff(after) > 0)


def test_forward_difference_is_second_order():
    assert forward_difference(lambda x: x**2, 1.0, 1e-3) == pytest.approx(2.0, abs=1e-10)


def test_build_scenario_rejects_zero_t_star():
    with pytest.raises(ValueError):
        build_scenario(ENMParams(), 0.0)


def test_distillability_margin(scenario):
    for t in (0.0, 1.0, 3.0):
        rep = distillability_check(evolve(scenario, t))
        assert rep.margin >= -1e-9
        assert rep.s_ab == pytest.approx(
            von_neumann_entropy(partial_trace(evolve(scenario, t), ABC_DIMS, [0, 1, 2])), abs=1e-12
        )


def test_distillability_equality_case(scenario):
    rep = distillability_check(flagged_state(0.5, scenario.rho1, scenario.rho1))
    assert abs(rep.margin) <= 1e-9


def test_mixture_entropy_matches_flagged_state(scenario):
    state = flagged_state(0.3, scenario.rho1, scenario.rho2)
    expected = mixture_entropy(0.3, scenario.rho1, scenario.rho2)
    assert von_neumann_entropy(state) == pytest.approx(expected, abs=1e-9)


def test_ab_dims_constant():
    assert AB_DIMS == (2, 3) and trace_norm(np.eye(6) / 6) == pytest.approx(1.0)
