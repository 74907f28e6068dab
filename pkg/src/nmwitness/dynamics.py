"""Random-unitary qubit dynamics: Pauli channels, decay rates, the ENM model.

A Pauli channel acts as ``rho -> sum_mu p_mu sigma_mu rho sigma_mu``. In the
Pauli operator basis it is diagonal with eigenvalues ``(1, l1, l2, l3)``,
``l_i = p_0 + p_i - p_j - p_k``. Maps are composed in that diagonal form, so
inverse maps (quasi-channels with negative weights) need no special casing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .numerics import DimensionError
from .states import PAULIS

# p = HADAMARD4 @ lam / 4 and lam = HADAMARD4 @ p, with lam_0 = sum(p)
HADAMARD4 = np.array(
    [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]], dtype=float
)
PROB_TOL = 1e-12
_PAULI_STACK = np.stack(PAULIS)


@dataclass(frozen=True)
class PauliChannel:
    """Qubit Pauli map with weights ``p = (p0, p1, p2, p3)``.

    Weights must sum to one. With ``quasi=True`` they may be negative, which
    is how inverse maps are represented.
    """

    p: tuple[float, float, float, float]
    quasi: bool = False

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        if len(p) != 4:
            raise ValueError(f"a Pauli channel needs 4 weights, got {len(p)}")
        object.__setattr__(self, "p", p)
        if abs(sum(p) - 1.0) > 1e-10 * max(1.0, max(abs(x) for x in p)):
            raise ValueError(f"Pauli weights must sum to 1, got {sum(p)!r}")
        if not self.quasi and min(p) < -PROB_TOL:
            raise ValueError(f"negative Pauli weight {min(p)!r} in a channel; use quasi=True")

    @classmethod
    def identity(cls) -> "PauliChannel":
        return cls((1.0, 0.0, 0.0, 0.0))

    @classmethod
    def depolarizing(cls, q: float) -> "PauliChannel":
        """``rho -> (1 - q) rho + q I/2``."""
        return cls((1 - 0.75 * q, q / 4, q / 4, q / 4))

    @classmethod
    def from_eigenvalues(cls, lam: Sequence[float], quasi: bool | None = None) -> "PauliChannel":
        full = np.array([1.0, *lam], dtype=float)
        p = HADAMARD4 @ full / 4.0
        if quasi is None:
            quasi = bool(p.min() < -PROB_TOL)
        return cls(tuple(p), quasi=quasi)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "PauliChannel":
        return cls(tuple(rng.dirichlet(np.ones(4))))

    @property
    def eigenvalues(self) -> np.ndarray:
        return (HADAMARD4 @ np.array(self.p))[1:]

    @property
    def is_channel(self) -> bool:
        return min(self.p) >= -PROB_TOL

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply_pauli(self, rho)

    def apply_local(self, rho: np.ndarray, dims: Sequence[int], subsystem: int = 0) -> np.ndarray:
        """Act on one qubit factor of a composite operator."""
        dims = tuple(dims)
        if dims[subsystem] != 2 or np.shape(rho)[0] != int(np.prod(dims)):
            raise DimensionError(f"factor {subsystem} of {dims} is not a qubit of this operator")
        left = int(np.prod(dims[:subsystem]))
        right = int(np.prod(dims[subsystem + 1 :]))
        r = np.asarray(rho).reshape(left, 2, right, left, 2, right)
        half = np.einsum("mxj,ajbckd->maxbckd", _PAULI_STACK, r)
        out = np.einsum("m,maxbckd,mky->axbcyd", np.asarray(self.p, dtype=float), half, _PAULI_STACK)
        return out.reshape(np.shape(rho))

    def compose(self, other: "PauliChannel") -> "PauliChannel":
        """``self o other`` (``other`` acts first; Pauli maps commute)."""
        lam = self.eigenvalues * other.eigenvalues
        return PauliChannel.from_eigenvalues(lam, quasi=self.quasi or other.quasi or None)


def apply_pauli(ch: PauliChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise DimensionError(f"Pauli channels act on 2x2 operators, got {rho.shape}")
    out = np.zeros((2, 2), dtype=complex)
    for w, s in zip(ch.p, PAULIS):
        out += w * (s @ rho @ s)
    return out


def pauli_eigenvalues(ch: PauliChannel) -> np.ndarray:
    return ch.eigenvalues


# ---------------------------------------------------------------------------
# decay rates
# ---------------------------------------------------------------------------

Rate = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RateFunctions:
    """Decay rates ``gamma_1..3(t)`` of the random-unitary master equation.

    Each rate must accept a numpy array of times.
    """

    gamma1: Rate
    gamma2: Rate
    gamma3: Rate

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([np.broadcast_to(g(t), t.shape).astype(float) for g in self.rates()])

    def rates(self) -> tuple[Rate, Rate, Rate]:
        return self.gamma1, self.gamma2, self.gamma3

    @classmethod
    def constant(cls, g1: float, g2: float, g3: float) -> "RateFunctions":
        return cls(*(lambda t, g=g: np.full(np.shape(t), g, dtype=float) for g in (g1, g2, g3)))


@dataclass(frozen=True)
class ENMParams:
    """Eternally non-Markovian model parameters, ``alpha >= 1`` and ``c > 0``."""

    alpha: float = 2.0
    c: float = 0.5

    def __post_init__(self):
        if not self.alpha >= 1.0:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if not self.c > 0.0:
            raise ValueError(f"c must be > 0, got {self.c}")


def enm_rates(p: ENMParams) -> RateFunctions:
    half = p.alpha * p.c / 2.0
    const = lambda t: np.full(np.shape(t), half, dtype=float)  # noqa: E731
    return RateFunctions(const, const, lambda t: -half * np.tanh(p.c * np.asarray(t, dtype=float)))


def _check_time(t: float) -> None:
    if not t >= 0.0:
        raise ValueError(f"time must be >= 0, got {t}")


def enm_weights(alpha: float, c: float, t: float) -> tuple[float, float, float, float]:
    """Closed-form ENM Pauli weights; a negative ``alpha`` gives the inverse map."""
    e2 = math.exp(-2 * alpha * c * t)
    # 2 exp(-a c t) cosh^a(c t), rewritten so large c t cannot overflow cosh
    cross = 2.0 * ((1.0 + math.exp(-2 * c * t)) / 2.0) ** alpha
    p0 = 0.25 * (1.0 + e2 + cross)
    p1 = 0.25 * (1.0 - e2)
    p3 = 0.25 * (1.0 + e2 - cross)
    return p0, p1, p1, p3


def enm_channel(p: ENMParams, t: float) -> PauliChannel:
    _check_time(t)
    return PauliChannel(enm_weights(p.alpha, p.c, t))


def enm_inverse(p: ENMParams, t: float) -> PauliChannel:
    """Inverse of :func:`enm_channel`, obtained by flipping the sign of alpha."""
    _check_time(t)
    return PauliChannel(enm_weights(-p.alpha, p.c, t), quasi=True)


def enm_eigenvalues(p: ENMParams, t: float) -> np.ndarray:
    l1 = ((1.0 + math.exp(-2 * p.c * t)) / 2.0) ** p.alpha
    return np.array([l1, l1, math.exp(-2 * p.alpha * p.c * t)])


# ---------------------------------------------------------------------------
# rates -> channel
# ---------------------------------------------------------------------------


def simpson(f: Callable[[np.ndarray], np.ndarray], t: float, panels: int) -> np.ndarray:
    """Composite Simpson rule on ``[0, t]`` with ``panels`` double intervals.

    ``f`` may return an array with time as the last axis.
    """
    if panels < 1:
        raise ValueError(f"need at least one Simpson panel, got {panels}")
    n = 2 * panels
    x = np.linspace(0.0, t, n + 1)
    y = np.asarray(f(x), dtype=float)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (y @ w) * (t / n) / 3.0


def integrate_rates(r: RateFunctions, t: float, steps: int = 10_000) -> PauliChannel:
    """Integrate the commuting master equation up to time ``t``.

    The Pauli eigenvalues are ``l_i = exp(-2 int_0^t (gamma_j + gamma_k))``
    for ``{i, j, k} = {1, 2, 3}``.
    """
    _check_time(t)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    # odd step counts are rounded up to the next even number of subintervals
    integrals = simpson(r, t, (steps + 1) // 2)
    total = integrals.sum()
    lam = np.exp(-2.0 * (total - integrals))
    return PauliChannel.from_eigenvalues(lam)


class DivisibilityFlags(NamedTuple):
    times: np.ndarray
    cp: np.ndarray
    p: np.ndarray


def rate_divisibility_report(r: RateFunctions, grid: Sequence[float], tol: float = 1e-12) -> DivisibilityFlags:
    """Per-time CP-divisibility (all rates >= 0) and P-divisibility (pair sums >= 0)."""
    times = np.asarray(grid, dtype=float)
    g = r(times)
    cp = np.all(g >= -tol, axis=0)
    pairs = np.stack([g[0] + g[1], g[0] + g[2], g[1] + g[2]])
    p = np.all(pairs >= -tol, axis=0)
    return DivisibilityFlags(times, cp, p)
