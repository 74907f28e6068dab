"""Tripartite negativity witness for the eternally non-Markovian qubit model.

Two qubit-qutrit states are pulled back through the inverse dynamics so that
at a chosen time ``t_star`` they reach
``(1-lam) I/6 + lam |phi+><phi+|`` and ``(1-lam) I/6 + lam |0><0| (x) |2><2|``,
with ``lam`` as large as positivity of the pulled-back states allows. Their
trace distance then has a kink at ``t_star`` and grows right after it. The
states are glued to an ``AB|C`` entangled pair,

    rho_ABC = (rho1 (x) |psi+><psi+| + rho2 (x) |psi-><psi-|) / 2,

on factors ``(A, B1, B2, C)`` with dimensions ``(2, 3, 2, 2)``. The ``AB|C``
negativity of the evolved state equals ``||Lambda_t (x) 1 [rho1 - rho2]||_1 / 4``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dynamics import ENMParams, PauliChannel, enm_channel, enm_inverse
from .numerics import eigvalsh, kron, partial_trace, trace_norm
from .states import (
    basis_projector,
    bell_state,
    check_state,
    maximally_mixed,
    negativity,
    projector,
    von_neumann_entropy,
    binary_entropy,
)

AB_DIMS = (2, 3)
ABC_DIMS = (2, 3, 2, 2)


def phi_plus_qubit_qutrit() -> np.ndarray:
    v = np.zeros(6, dtype=complex)
    v[0] = v[4] = 1 / math.sqrt(2)  # |00> and |11> in the 2 x 3 basis
    return projector(v)


def target_states(lam: float) -> tuple[np.ndarray, np.ndarray]:
    """States the pulled-back pair should reach at ``t_star``; trace distance ``lam``."""
    mixed = maximally_mixed(6)
    flag = kron(basis_projector(0, 2), basis_projector(2, 3))
    return (1 - lam) * mixed + lam * phi_plus_qubit_qutrit(), (1 - lam) * mixed + lam * flag


def lambda_star(p: ENMParams, t_star: float) -> float:
    return 1.0 / (3.0 * math.exp(2 * p.alpha * p.c * t_star) - 2.0)


def pull_back(p: ENMParams, t: float, rho: np.ndarray) -> np.ndarray:
    return enm_inverse(p, t).apply_local(rho, AB_DIMS, 0)


def pullback_min_eigenvalue(p: ENMParams, t_star: float, lam: float) -> float:
    """Smallest eigenvalue over both pulled-back target states."""
    return min(eigvalsh(pull_back(p, t_star, r))[0] for r in target_states(lam))


def scan_lambda_star(p: ENMParams, t_star: float, tol: float = 1e-14, iters: int = 200) -> float:
    """Largest ``lam`` in ``(0, 1]`` whose pulled-back targets stay positive, by bisection."""
    if pullback_min_eigenvalue(p, t_star, 1.0) >= 0.0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if pullback_min_eigenvalue(p, t_star, mid) >= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return lo


def chi_value(p: ENMParams, lam: float) -> float:
    a = p.alpha
    return 0.5 * (((1 + 2 * lam) / lam) ** (1 / a) + 3 ** (1 / a))


def closed_form_phi_pullback(p: ENMParams, lam: float) -> np.ndarray:
    """Explicit pull-back of the phi+ target at ``lam = lambda_star``."""
    chi = chi_value(p, lam)
    m = np.diag([(1 + lam) / 2, (1 - lam) / 6, (1 - lam) / 3, (1 - lam) / 6, (1 + lam) / 2, (1 - lam) / 3])
    m = m.astype(complex)
    m[0, 4] = m[4, 0] = (1 + 2 * lam) / chi**p.alpha
    return m / 2


def closed_form_flag_pullback(lam: float) -> np.ndarray:
    """Explicit pull-back of the ``|0><0| (x) |2><2|`` target at ``lam = lambda_star``."""
    return np.diag([1 - lam, 1 - lam, 2 + 4 * lam, 1 - lam, 1 - lam, 0.0]).astype(complex) / 6


@dataclass(frozen=True)
class WitnessScenario:
    params: ENMParams
    t_star: float
    lambda_star: float
    rho1: np.ndarray = field(repr=False)
    rho2: np.ndarray = field(repr=False)
    chi: float

    def channel(self, t: float) -> PauliChannel:
        return enm_channel(self.params, t)

    def evolve_pair(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        ch = self.channel(t)
        return ch.apply_local(self.rho1, AB_DIMS, 0), ch.apply_local(self.rho2, AB_DIMS, 0)


def build_scenario(p: ENMParams, t_star: float) -> WitnessScenario:
    if not t_star > 0.0:
        raise ValueError(f"t_star must be > 0, got {t_star}")
    lam = lambda_star(p, t_star)
    r1, r2 = (pull_back(p, t_star, r) for r in target_states(lam))
    r1, r2 = check_state(r1), check_state(r2)
    return WitnessScenario(p, float(t_star), lam, r1, r2, chi_value(p, lam))


def tripartite_initial(s: WitnessScenario) -> np.ndarray:
    return 0.5 * (kron(s.rho1, bell_state("psi+")) + kron(s.rho2, bell_state("psi-")))


def evolve(s: WitnessScenario, t: float) -> np.ndarray:
    """Act with the dynamics on factor A of the tripartite state."""
    return s.channel(t).apply_local(tripartite_initial(s), ABC_DIMS, 0)


class WitnessMethod:
    FULL = "full"
    SHORTCUT = "shortcut"


def witness_negativity(s: WitnessScenario, t: float, method: str = WitnessMethod.SHORTCUT) -> float:
    """``AB|C`` negativity of the evolved tripartite state.

    ``full`` partially transposes the 24x24 state; ``shortcut`` uses
    ``||Lambda_t (x) 1 [(rho1 - rho2)/2]||_1 / 2`` on the 6x6 difference.
    """
    if method == WitnessMethod.FULL:
        return negativity(evolve(s, t), ABC_DIMS, cut=3)
    if method == WitnessMethod.SHORTCUT:
        ch = s.channel(t)
        return 0.5 * trace_norm(ch.apply_local(0.5 * (s.rho1 - s.rho2), AB_DIMS, 0))
    raise ValueError(f"unknown method {method!r}")


def trace_distance_curve(s: WitnessScenario, t: float) -> float:
    """``||rho1(t) - rho2(t)||_1`` computed numerically."""
    return trace_norm(s.channel(t).apply_local(s.rho1 - s.rho2, AB_DIMS, 0))


def revival_ratio(s: WitnessScenario, t: float) -> float:
    p, ts = s.params, s.t_star
    # (cosh(c t) / cosh(c t*))^a / cosh(a c (t - t*)), in log form for large t
    def logcosh(x):
        return abs(x) + math.log1p(math.exp(-2 * abs(x))) - math.log(2)

    return math.exp(p.alpha * (logcosh(p.c * t) - logcosh(p.c * ts)) - logcosh(p.alpha * p.c * (t - ts)))


def t_up(s: WitnessScenario, iters: int = 200, samples: int = 4000) -> float | None:
    """First ``t > t_star`` where the revival ratio returns to one, or ``None``.

    Searched on ``(t_star, 50/c]``; the bracket comes from a uniform sample,
    then bisection.
    """
    hi_end = max(50.0 / s.params.c, s.t_star)
    grid = np.linspace(s.t_star, hi_end, samples + 1)[1:]
    vals = np.array([revival_ratio(s, t) - 1.0 for t in grid])
    lo_t = s.t_star
    idx = np.nonzero(vals <= 0.0)[0]
    if idx.size == 0:
        return None
    k = idx[0]
    lo, hi = (grid[k - 1] if k > 0 else lo_t), grid[k]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if revival_ratio(s, mid) - 1.0 > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def analytic_trace_distance(s: WitnessScenario, t: float, t_revival: float | None = ...) -> float:
    """Closed-form ``||rho1(t) - rho2(t)||_1``, three branches split at ``t_star`` and ``t_up``."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    p, ts, lam = s.params, s.t_star, s.lambda_star
    if t <= ts:
        return 2 * lam * math.exp(-2 * p.alpha * p.c * (t - ts))
    if t_revival is ...:
        t_revival = t_up(s)
    if t_revival is not None and t > t_revival:
        return 2 * lam
    r = revival_ratio(s, t)
    return 2 * lam * 0.25 * (3 + math.exp(-2 * p.alpha * p.c * (t - ts)) * (r - 1) + r)


def right_derivative(s: WitnessScenario) -> float:
    """Right derivative at ``t_star`` of the half trace distance ``||rho1(t) - rho2(t)||_1 / 2``.

    The ``AB|C`` negativity rises at half this rate.
    """
    p = s.params
    return 0.5 * p.alpha * p.c * s.lambda_star * math.tanh(p.c * s.t_star)


def forward_difference(fn, t: float, h: float = 1e-5) -> float:
    """Second-order one-sided difference ``(-3 f(t) + 4 f(t+h) - f(t+2h)) / 2h``."""
    return (-3 * fn(t) + 4 * fn(t + h) - fn(t + 2 * h)) / (2 * h)


class DistillabilityReport(NamedTuple):
    s_ab: float
    s_abc: float
    margin: float


def distillability_check(state: np.ndarray, dims=ABC_DIMS) -> DistillabilityReport:
    """Compare ``S(rho_AB)`` with ``S(rho_ABC)``; ``C`` is the last factor."""
    ab = partial_trace(state, dims, range(len(dims) - 1))
    s_ab = von_neumann_entropy(ab)
    s_abc = von_neumann_entropy(state)
    return DistillabilityReport(s_ab, s_abc, s_ab - s_abc)


def mixture_entropy(p1: float, rho1: np.ndarray, rho2: np.ndarray) -> float:
    """``h(p1) + p1 S(rho1) + p2 S(rho2)``, the entropy of an orthogonally flagged mixture."""
    return binary_entropy(p1) + p1 * von_neumann_entropy(rho1) + (1 - p1) * von_neumann_entropy(rho2)


def flagged_state(p1: float, rho1: np.ndarray, rho2: np.ndarray) -> np.ndarray:
    return p1 * kron(rho1, bell_state("psi+")) + (1 - p1) * kron(rho2, bell_state("psi-"))
