"""Choi matrices, intermediate maps and CP-divisibility verdicts.

Choi matrices use the trace-``d`` convention
``Omega = sum_ij Lambda(|i><j|) (x) |i><j|``, so a trace-preserving map has
``Tr_A Omega = I_d`` and the identity channel on a qubit gives
``P_phi+ = 2 |phi+><phi+|``. Maps are plain callables on ``d x d`` arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .dynamics import ENMParams, PauliChannel
from .numerics import DimensionError, eigvalsh, hermitize, partial_trace, partial_transpose
from .states import SX, bell_state

LinearMap = Callable[[np.ndarray], np.ndarray]

CP_TOL = 1e-10
TP_TOL = 1e-9


def matrix_unit(i: int, j: int, d: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


@dataclass(frozen=True)
class ChoiMatrix:
    d: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.d**2, self.d**2):
            raise DimensionError(f"Choi matrix for d={self.d} must be {self.d**2}x{self.d**2}")
        object.__setattr__(self, "matrix", hermitize(m, 1e-10))

    @property
    def min_eigenvalue(self) -> float:
        return float(eigvalsh(self.matrix)[0])

    def tp_residual(self) -> float:
        marg = partial_trace(self.matrix, (self.d, self.d), 1)
        return float(np.max(np.abs(marg - np.eye(self.d))))


def choi_of(fn: LinearMap, d: int, check_tp: bool = True) -> ChoiMatrix:
    """Choi matrix of a Hermiticity-preserving linear map on ``d x d`` operators."""
    omega = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e = matrix_unit(i, j, d)
            out = np.asarray(fn(e))
            if out.shape != (d, d):
                raise DimensionError(f"map returned shape {out.shape} for input {d}x{d}")
            omega += np.kron(out, e)
    choi = ChoiMatrix(d, omega)
    if check_tp:
        res = choi.tp_residual()
        if res > TP_TOL:
            raise ValueError(f"map is not trace preserving: |Tr_A Omega - I| = {res:.3e}")
    return choi


def apply_via_choi(choi: ChoiMatrix, rho: np.ndarray) -> np.ndarray:
    """``Lambda[rho] = Tr_B[Omega (I (x) rho^T)]``."""
    rho = np.asarray(rho)
    d = choi.d
    if rho.shape != (d, d):
        raise DimensionError(f"operator shape {rho.shape} does not match Choi dimension {d}")
    prod = choi.matrix @ np.kron(np.eye(d), rho.T)
    return partial_trace(prod, (d, d), 0)


def map_from_choi(choi: ChoiMatrix) -> LinearMap:
    return lambda rho: apply_via_choi(choi, rho)


class CPVerdict(NamedTuple):
    cp: bool
    min_eigenvalue: float


def is_cp(choi: ChoiMatrix, tol: float = CP_TOL) -> CPVerdict:
    lo = choi.min_eigenvalue
    return CPVerdict(lo >= -tol, lo)


def superoperator(fn: LinearMap, d: int) -> np.ndarray:
    """Matrix ``S`` with ``vec(fn(X)) = S vec(X)`` for row-major ``vec``."""
    cols = [np.asarray(fn(matrix_unit(i, j, d))).ravel() for i in range(d) for j in range(d)]
    return np.stack(cols, axis=1)


def apply_local(fn: LinearMap, rho: np.ndarray, dims: Sequence[int], subsystem: int = 0) -> np.ndarray:
    """Apply a map on factor ``subsystem`` and the identity elsewhere."""
    dims = tuple(int(x) for x in dims)
    n = len(dims)
    rho = np.asarray(rho)
    if rho.shape[0] != int(np.prod(dims)):
        raise DimensionError(f"dims {dims} do not match shape {rho.shape}")
    d = dims[subsystem]
    rest = [k for k in range(n) if k != subsystem]
    r = int(np.prod([dims[k] for k in rest]))
    t = rho.reshape(dims + dims)
    order = [subsystem, n + subsystem] + rest + [n + k for k in rest]
    blocks = t.transpose(order).reshape(d * d, r * r)
    out = (superoperator(fn, d) @ blocks).reshape([d, d] + [dims[k] for k in rest] * 2)
    return out.transpose(np.argsort(order)).reshape(rho.shape)


# ---------------------------------------------------------------------------
# ENM intermediate maps
# ---------------------------------------------------------------------------


def _check_order(s: float, t: float) -> None:
    if not 0.0 <= s <= t:
        raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")


def enm_intermediate(p: ENMParams, s: float, t: float) -> PauliChannel:
    """``V_{t,s} = Lambda_t o Lambda_s^{-1}`` as a Pauli quasi-channel.

    Built from eigenvalue ratios. Multiplying out the weights of
    ``enm_inverse`` instead loses digits once ``alpha c s`` is large, since
    those weights grow like ``exp(2 alpha c s)``.
    """
    _check_order(s, t)
    l1 = ((1.0 + math.exp(-2 * p.c * t)) / (1.0 + math.exp(-2 * p.c * s))) ** p.alpha
    l3 = math.exp(-2 * p.alpha * p.c * (t - s))
    return PauliChannel.from_eigenvalues((l1, l1, l3), quasi=True)


def _enm_lambda_gamma(p: ENMParams, s: float, t: float) -> tuple[float, float]:
    lam = math.exp(-p.c * (t - s))
    gamma = lam * math.cosh(p.c * t) / math.cosh(p.c * s)
    return lam, gamma


def enm_intermediate_choi(p: ENMParams, s: float, t: float) -> ChoiMatrix:
    """Closed-form Choi matrix of ``V_{t,s}`` for the ENM model."""
    _check_order(s, t)
    lam, gamma = _enm_lambda_gamma(p, s, t)
    l2a = lam ** (2 * p.alpha)
    g = gamma**p.alpha
    m = 0.5 * np.array(
        [
            [1 + l2a, 0, 0, 2 * g],
            [0, 1 - l2a, 0, 0],
            [0, 0, 1 - l2a, 0],
            [2 * g, 0, 0, 1 + l2a],
        ],
        dtype=complex,
    )
    return ChoiMatrix(2, m)


class DecompositionWitness(NamedTuple):
    p1: float
    p2: float
    residual: float

    @property
    def p3(self) -> float:
        return 1.0 - self.p1 - self.p2


def enm_decomposition_weights(p: ENMParams, s: float, t: float) -> tuple[float, float]:
    _check_order(s, t)
    lam, gamma = _enm_lambda_gamma(p, s, t)
    ga = gamma**p.alpha
    return 0.5 * (lam ** (2 * p.alpha) + ga), 0.5 * (1.0 - ga)


def _p_bell(kind: str) -> np.ndarray:
    return 2.0 * bell_state(kind)


def enm_decomposition(p: ENMParams, s: float, t: float) -> DecompositionWitness:
    """Weights of ``Omega = p1 P_phi+ + p2 P_phi- + (1-p1-p2) P_psi+^{T_B}``.

    The residual is measured against the Choi matrix built numerically from
    the composed Pauli maps, not against the closed form.
    """
    p1, p2 = enm_decomposition_weights(p, s, t)
    omega = choi_of(enm_intermediate(p, s, t), 2).matrix
    rebuilt = (
        p1 * _p_bell("phi+")
        + p2 * _p_bell("phi-")
        + (1 - p1 - p2) * partial_transpose(_p_bell("psi+"), (2, 2), 1)
    )
    return DecompositionWitness(p1, p2, float(np.max(np.abs(omega - rebuilt))))


def decomposable_positive_apply(
    p: float,
    e1: LinearMap,
    e2: LinearMap,
    rho: np.ndarray,
    dims: Sequence[int] | None = None,
    subsystem: int = 0,
) -> np.ndarray:
    """``p E1[rho] + (1 - p) E2[rho^T]``.

    With ``dims`` the map acts on factor ``subsystem`` only, the transpose
    becoming a partial transpose on that factor.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability, got {p}")
    rho = np.asarray(rho)
    if dims is None:
        return p * np.asarray(e1(rho)) + (1 - p) * np.asarray(e2(rho.T))
    flipped = partial_transpose(rho, dims, subsystem)
    return p * apply_local(e1, rho, dims, subsystem) + (1 - p) * apply_local(e2, flipped, dims, subsystem)


def enm_decomposed_map(p: ENMParams, s: float, t: float) -> LinearMap:
    """``V_{t,s}`` rebuilt from its decomposition weights alone.

    ``E1`` is the Pauli channel with Choi matrix ``(p1 P_phi+ + p2 P_phi-)/(p1+p2)``
    and ``E2`` is conjugation by ``sigma_x`` (Choi matrix ``P_psi+``).
    """
    p1, p2 = enm_decomposition_weights(p, s, t)
    q = p1 + p2
    e1 = PauliChannel((p1 / q, 0.0, 0.0, p2 / q))
    e2 = lambda r: SX @ r @ SX  # noqa: E731
    return lambda r: decomposable_positive_apply(q, e1, e2, r)


def choi_map_3(rho: np.ndarray) -> np.ndarray:
    """Choi's positive, trace-preserving, not completely positive map on 3x3 matrices."""
    a = np.asarray(rho)
    if a.shape != (3, 3):
        raise DimensionError(f"expected a 3x3 operator, got {a.shape}")
    out = -a.astype(complex)
    for i in range(3):
        out[i, i] = a[i, i] + 2 * a[(i + 1) % 3, (i + 1) % 3]
    return out / 3.0
