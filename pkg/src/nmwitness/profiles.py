"""Monotonicity scans and Markovian reproduction of monotone profiles.

``contractive_scan`` tracks a contractive function of two evolved qubit
states. ``match_profile`` and ``match_entanglement_profile`` rebuild any
non-increasing profile with the CP-divisible depolarizing family

    W[rho] = a^dt rho + (1 - a^dt) I/d,

choosing each ``a`` by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .divisibility import decomposable_positive_apply
from .dynamics import ENMParams, PauliChannel, RateFunctions, enm_channel, integrate_rates
from .numerics import partial_trace
from .states import Contractive, contractive_function, negativity, random_state
from .witness import ABC_DIMS

INCREASE_TOL = 1e-10
MATCH_TOL = 1e-8


def _as_contractive(f: str | Contractive) -> Contractive:
    return contractive_function(f) if isinstance(f, str) else f


def _check_grid(grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 1 or np.any(np.diff(g) <= 0) or g[0] < 0:
        raise ValueError("time grid must be a non-empty, strictly ascending array of times >= 0")
    return g


def channel_family(dynamics: ENMParams | RateFunctions, steps: int = 2000) -> Callable[[float], PauliChannel]:
    """Time -> Pauli map for the ENM closed form or for integrated rates."""
    if isinstance(dynamics, ENMParams):
        return lambda t: enm_channel(dynamics, t)
    return lambda t: integrate_rates(dynamics, t, steps)


def increases(values: np.ndarray) -> np.ndarray:
    """Step-to-step increases, with ``inf -> inf`` counted as no change."""
    v = np.asarray(values, dtype=float)
    with np.errstate(invalid="ignore"):
        d = np.diff(v)
    both_inf = np.isinf(v[:-1]) & np.isinf(v[1:])
    d[both_inf] = 0.0
    return d


class Scan(NamedTuple):
    times: np.ndarray
    values: np.ndarray

    @property
    def max_increase(self) -> float:
        if self.values.size < 2:
            return 0.0
        return float(np.max(increases(self.values)))

    def monotone(self, tol: float = INCREASE_TOL) -> bool:
        return self.max_increase <= tol


def contractive_scan(
    f: str | Contractive,
    dynamics: ENMParams | RateFunctions,
    rho: np.ndarray,
    sigma: np.ndarray,
    grid: Sequence[float],
) -> Scan:
    """``f(Lambda_t[rho], Lambda_t[sigma])`` along ``grid``."""
    fn = _as_contractive(f)
    times = _check_grid(grid)
    family = channel_family(dynamics)
    vals = []
    for t in times:
        ch = family(t)
        vals.append(fn(ch(rho), ch(sigma)))
    return Scan(times, np.array(vals))


# ---------------------------------------------------------------------------
# depolarizing mimicry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DepolarizingStep:
    """``rho -> a^dt rho + (1 - a^dt) I/d`` (CPTP for ``0 <= a <= 1``)."""

    a: float
    dt: float
    d: int = 2

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"a must lie in [0, 1], got {self.a}")
        if self.dt < 0:
            raise ValueError(f"dt must be >= 0, got {self.dt}")

    @property
    def q(self) -> float:
        return self.a**self.dt

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        q = self.q
        return q * np.asarray(rho) + (1 - q) * np.trace(rho) * np.eye(self.d) / self.d

    def apply_local(self, rho: np.ndarray, dims: Sequence[int], subsystem: int = 0) -> np.ndarray:
        """Same map on factor ``subsystem``: ``q rho + (1-q) I/d (x) Tr_sub rho``."""
        dims = tuple(dims)
        q = self.q
        rest = [k for k in range(len(dims)) if k != subsystem]
        reduced = partial_trace(rho, dims, rest)
        # rebuild I/d (x) reduced in the original factor order
        full_dims = [dims[subsystem]] + [dims[k] for k in rest]
        mixed = np.kron(np.eye(dims[subsystem]) / dims[subsystem], reduced)
        n = len(dims)
        order = [subsystem] + rest
        perm = np.argsort(order)
        t = mixed.reshape(full_dims + full_dims).transpose(list(perm) + [n + k for k in perm])
        return q * np.asarray(rho) + (1 - q) * t.reshape(np.shape(rho))


def depolarizing_step(a: float, dt: float, d: int = 2) -> DepolarizingStep:
    return DepolarizingStep(a, dt, d)


@dataclass
class ProfileMatch:
    times: np.ndarray
    targets: np.ndarray
    a: np.ndarray
    achieved: np.ndarray
    feasible: np.ndarray

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.achieved - self.targets)

    @property
    def max_error(self) -> float:
        return float(np.max(self.errors))

    @property
    def ok(self) -> bool:
        return bool(np.all(self.feasible)) and self.max_error <= MATCH_TOL


class NonMonotoneProfile(ValueError):
    def __init__(self, index: int):
        super().__init__(f"target profile increases at index {index}")
        self.index = index


def check_monotone(targets: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    t = np.asarray(targets, dtype=float)
    bad = np.nonzero(np.diff(t) > tol)[0]
    if bad.size:
        raise NonMonotoneProfile(int(bad[0]) + 1)
    return t


def _bisect_q(value_at: Callable[[float], float], target: float, iters: int = 80,
              width: float = 1e-15, value_tol: float = 1e-12) -> float:
    """Solve ``value_at(q) = target`` for the step weight ``q`` in [0, 1].

    ``value_at`` is increasing in ``q``. Working in ``q = a^dt`` rather than
    ``a`` keeps the problem well conditioned when ``a`` is tiny.
    """
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        v = value_at(mid)
        if abs(v - target) <= value_tol:
            return mid
        if v < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < width:
            break
    return 0.5 * (lo + hi)


def _match(times, targets, state, step, value) -> ProfileMatch:
    times = _check_grid(times)
    targets = check_monotone(targets)
    if targets.shape != times.shape:
        raise ValueError("targets and times must have the same length")
    n = times.size
    a = np.ones(n - 1)
    achieved = np.empty(n)
    feasible = np.ones(n, dtype=bool)
    achieved[0] = value(state)
    feasible[0] = abs(achieved[0] - targets[0]) <= MATCH_TOL
    for i in range(n - 1):
        dt = times[i + 1] - times[i]
        top = value(state)
        floor = value(step(state, 0.0))
        target = targets[i + 1]
        if target <= floor:
            q, feasible[i + 1] = 0.0, target >= floor - MATCH_TOL
        elif target >= top:
            q, feasible[i + 1] = 1.0, target <= top + MATCH_TOL
        else:
            q = _bisect_q(lambda x: value(step(state, x)), target)
        # the state advances with q itself, so an underflowing a cannot spoil it
        a[i] = q ** (1.0 / dt)
        state = step(state, q)
        achieved[i + 1] = value(state)
    return ProfileMatch(times, targets, a, achieved, feasible)


def match_profile(
    targets: Sequence[float],
    times: Sequence[float],
    f: str | Contractive,
    rho0: np.ndarray,
    sigma0: np.ndarray,
) -> ProfileMatch:
    """Depolarizing parameters reproducing a non-increasing ``f`` profile.

    Steps whose target lies below the fully depolarized floor, or above what
    is still reachable after an earlier infeasible step, are flagged in
    ``feasible`` rather than raising.
    """
    fn = _as_contractive(f)
    d = np.shape(rho0)[0]

    def step(pair, q):
        w = DepolarizingStep(q, 1.0, d)
        return w(pair[0]), w(pair[1])

    return _match(times, targets, (np.asarray(rho0), np.asarray(sigma0)), step, lambda pr: fn(*pr))


def match_entanglement_profile(
    targets: Sequence[float],
    times: Sequence[float],
    rho_abc: np.ndarray,
    dims: Sequence[int] = ABC_DIMS,
    cut: int = 3,
) -> ProfileMatch:
    """Local depolarizing on factor 0 reproducing a non-increasing negativity profile."""
    dims = tuple(dims)

    def step(state, q):
        return DepolarizingStep(q, 1.0, dims[0]).apply_local(state, dims, 0)

    return _match(times, targets, np.asarray(rho_abc), step, lambda s: negativity(s, dims, cut))


# ---------------------------------------------------------------------------
# negativity under local positive maps
# ---------------------------------------------------------------------------


class TrialReport(NamedTuple):
    trials: int
    max_violation: float
    seed: int

    def passed(self, tol: float = INCREASE_TOL) -> bool:
        return self.max_violation <= tol


def positive_map_monotonicity_trial(count: int, seed: int = 0) -> TrialReport:
    """Negativity before and after random local maps ``p E1 + (1-p) E2 o T`` on A.

    ``E1`` and ``E2`` are random Pauli channels; the reported violation is the
    largest ``E(after) - E(before)``.
    """
    rng = np.random.default_rng(seed)
    worst = -math.inf
    dims = (2, 2)
    for _ in range(count):
        rho = random_state(4, rng)
        p = float(rng.uniform())
        e1, e2 = PauliChannel.random(rng), PauliChannel.random(rng)
        out = decomposable_positive_apply(p, e1, e2, rho, dims, 0)
        worst = max(worst, negativity(out, dims) - negativity(rho, dims))
    return TrialReport(count, float(worst), seed)


def enm_bipartite_trial(count: int, seed: int = 0, grid: Sequence[float] | None = None) -> TrialReport:
    """Largest step increase of ``E^{A|B}`` along ENM evolution on A, random states and parameters."""
    rng = np.random.default_rng(seed)
    times = _check_grid(np.linspace(0.0, 6.0, 61) if grid is None else grid)
    worst = -math.inf
    for _ in range(count):
        params = ENMParams(float(rng.uniform(1, 4)), float(rng.uniform(0.05, 2)))
        rho = random_state(4, rng)
        vals = [negativity(enm_channel(params, t).apply_local(rho, (2, 2), 0)) for t in times]
        worst = max(worst, float(np.max(np.diff(vals))) if len(vals) > 1 else 0.0)
    return TrialReport(count, worst, seed)


def contractivity_trial(
    kinds: Sequence[str],
    pairs: int,
    seed: int = 0,
    grid: Sequence[float] | None = None,
    dynamics: ENMParams | RateFunctions | None = None,
    renyi_alpha: float = 2.0,
) -> dict[str, TrialReport]:
    """Largest increase of each contractive function over random single-qubit pairs."""
    rng = np.random.default_rng(seed)
    times = _check_grid(np.linspace(0.0, 6.0, 61) if grid is None else grid)
    fns = [contractive_function(k, renyi_alpha) for k in kinds]
    worst = {k: -math.inf for k in kinds}
    for _ in range(pairs):
        dyn = dynamics if dynamics is not None else ENMParams(float(rng.uniform(1, 4)), float(rng.uniform(0.05, 2)))
        rho, sigma = random_state(2, rng), random_state(2, rng)
        family = channel_family(dyn)
        chans = [family(t) for t in times]
        evolved = [(ch(rho), ch(sigma)) for ch in chans]
        for k, fn in zip(kinds, fns):
            vals = np.array([fn(r, s) for r, s in evolved])
            worst[k] = max(worst[k], float(np.max(increases(vals))) if vals.size > 1 else 0.0)
    return {k: TrialReport(pairs, worst[k], seed) for k in kinds}
