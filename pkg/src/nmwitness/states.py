"""Quantum states, Bloch vectors and the contractive two-state functions.

All distances and entropies are base 2. States are ``numpy`` arrays; the
composite structure, where it matters, is passed as a ``dims`` list.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from .numerics import (
    DimensionError,
    eigvalsh,
    hermitian_eig,
    hermitize,
    partial_transpose,
    trace_norm,
)

PSD_TOL = 1e-10
TRACE_TOL = 1e-10
SUPPORT_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SX, SY, SZ)


class StateError(ValueError):
    """Raised when an operator fails the invariants of a quantum state."""


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def basis_projector(index: int, dim: int) -> np.ndarray:
    return projector(ket(index, dim))


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


_BELL_KETS = {
    "phi+": np.array([1, 0, 0, 1]) / math.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / math.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / math.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / math.sqrt(2),
}


def bell_ket(kind: str) -> np.ndarray:
    try:
        return _BELL_KETS[kind.lower()].astype(complex)
    except KeyError:
        raise ValueError(f"unknown Bell state {kind!r}; expected one of {sorted(_BELL_KETS)}") from None


def bell_state(kind: str) -> np.ndarray:
    """Projector onto one of the four two-qubit Bell states.

    ``kind`` is one of ``"phi+"``, ``"phi-"``, ``"psi+"``, ``"psi-"``.
    """
    return projector(bell_ket(kind))


def max_entangled(d: int) -> np.ndarray:
    """Projector onto ``sum_i |ii> / sqrt(d)``."""
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / math.sqrt(d)
    return projector(v)


def check_unit_trace(h: np.ndarray, tol: float = TRACE_TOL) -> np.ndarray:
    """Hermitize ``h`` and check its trace is one. Positivity is not required."""
    h = hermitize(h)
    tr = np.trace(h).real
    if abs(tr - 1.0) > tol:
        raise StateError(f"trace {tr!r} differs from 1 by more than {tol}")
    return h


def check_state(rho: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Validate a density matrix and return its Hermitian part."""
    rho = check_unit_trace(rho)
    lo = eigvalsh(rho)[0]
    if lo < -tol:
        raise StateError(f"not positive semidefinite: min eigenvalue {lo:.3e}")
    return rho


def is_state(rho: np.ndarray, tol: float = PSD_TOL) -> bool:
    try:
        check_state(rho, tol)
    except ValueError:
        return False
    return True


def random_pure_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_state(dim: int, rng: np.random.Generator, ancilla: int | None = None) -> np.ndarray:
    """Random mixed state from a Gaussian pure state on ``dim * ancilla``.

    The ancilla is traced out; ``ancilla=1`` gives pure states and the default
    (``ancilla = dim``) gives the Hilbert-Schmidt ensemble.
    """
    k = dim if ancilla is None else ancilla
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# entanglement
# ---------------------------------------------------------------------------


def _default_dims(h: np.ndarray) -> tuple[int, int]:
    n = h.shape[0]
    d = int(round(math.sqrt(n)))
    if d * d != n:
        raise DimensionError(f"cannot infer a bipartition for dimension {n}; pass dims")
    return d, d


def negativity(h: np.ndarray, dims: Sequence[int] | None = None, cut: int = 1) -> float:
    """Negativity ``(||h^{T_B}||_1 - 1) / 2`` across the cut ``dims[:cut] | dims[cut:]``.

    ``h`` only needs to be Hermitian with unit trace, so images of states
    under positive but not completely positive maps are accepted.
    """
    h = check_unit_trace(h)
    dims = tuple(dims) if dims is not None else _default_dims(h)
    if not 0 < cut < len(dims):
        raise ValueError(f"cut {cut} does not split dims {dims} into two non-empty groups")
    pt = partial_transpose(h, dims, range(cut, len(dims)))
    return (trace_norm(pt) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# contractive functions
# ---------------------------------------------------------------------------


def _same_shape(rho: np.ndarray, sigma: np.ndarray) -> None:
    if np.shape(rho) != np.shape(sigma):
        raise DimensionError(f"shape mismatch {np.shape(rho)} vs {np.shape(sigma)}")


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = hermitian_eig(rho)
    if w[0] < -PSD_TOL:
        raise StateError(f"not positive semidefinite: min eigenvalue {w[0]:.3e}")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _psd_power(rho: np.ndarray, p: float) -> np.ndarray:
    """Matrix power on the support; zero eigenvalues stay zero."""
    w, v = hermitian_eig(rho)
    wp = np.zeros_like(w)
    on = w > SUPPORT_TOL
    wp[on] = w[on] ** p
    return (v * wp) @ v.conj().T


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    _same_shape(rho, sigma)
    return 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma))


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Root fidelity ``||sqrt(rho) sqrt(sigma)||_1``."""
    _same_shape(rho, sigma)
    prod = _psd_sqrt(rho) @ _psd_sqrt(sigma)
    return float(np.sum(np.linalg.svd(prod, compute_uv=False)))


def infidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 1.0 - fidelity(rho, sigma)


def von_neumann_entropy(rho: np.ndarray) -> float:
    w = eigvalsh(rho)
    w = w[w > SUPPORT_TOL]
    return float(-np.sum(w * np.log2(w)))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _outside_support(rho: np.ndarray, sigma_w: np.ndarray, sigma_v: np.ndarray) -> bool:
    kernel = sigma_v[:, sigma_w <= SUPPORT_TOL]
    if kernel.shape[1] == 0:
        return False
    leak = np.einsum("ik,ij,jk->", kernel.conj(), rho, kernel).real
    return leak > PSD_TOL


def relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Quantum relative entropy; ``math.inf`` when supp(rho) is not in supp(sigma)."""
    _same_shape(rho, sigma)
    rho = hermitize(rho)
    sw, sv = hermitian_eig(sigma)
    if _outside_support(rho, sw, sv):
        return math.inf
    on = sw > SUPPORT_TOL
    weights = np.einsum("ik,ij,jk->k", sv[:, on].conj(), rho, sv[:, on]).real
    cross = float(np.sum(weights * np.log2(sw[on])))
    return -von_neumann_entropy(rho) - cross


def renyi_relative(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """Sandwiched Rényi relative entropy of order ``alpha >= 1/2`` (``alpha != 1``)."""
    if alpha < 0.5:
        raise ValueError(f"Renyi order must be >= 1/2, got {alpha}")
    if alpha == 1.0:
        raise ValueError("order 1 is the relative entropy; call relative_entropy")
    _same_shape(rho, sigma)
    rho = hermitize(rho)
    sigma = hermitize(sigma)
    if alpha > 1.0:
        sw, sv = hermitian_eig(sigma)
        if _outside_support(rho, sw, sv):
            return math.inf
    s = _psd_power(sigma, (1.0 - alpha) / (2.0 * alpha))
    inner = eigvalsh(s @ rho @ s)
    inner = np.clip(inner, 0.0, None)
    q = float(np.sum(inner**alpha))
    if q <= 0.0:
        return math.inf
    return math.log2(q) / (alpha - 1.0)


class Contractive(NamedTuple):
    name: str
    fn: Callable[[np.ndarray, np.ndarray], float]

    def __call__(self, rho: np.ndarray, sigma: np.ndarray) -> float:
        return self.fn(rho, sigma)


CONTRACTIVE_KINDS = ("trace_distance", "infidelity", "relative_entropy", "renyi")


def contractive_function(kind: str, alpha: float = 2.0) -> Contractive:
    """Look up a contractive function by name; ``alpha`` is the Rényi order."""
    if kind == "trace_distance":
        return Contractive(kind, trace_distance)
    if kind == "infidelity":
        return Contractive(kind, infidelity)
    if kind == "relative_entropy":
        return Contractive(kind, relative_entropy)
    if kind == "renyi":
        if alpha < 0.5 or alpha == 1.0:
            raise ValueError(f"invalid Renyi order {alpha}")
        return Contractive(f"renyi_{alpha:g}", lambda r, s: renyi_relative(r, s, alpha))
    raise ValueError(f"unknown contractive function {kind!r}; expected one of {CONTRACTIVE_KINDS}")


# ---------------------------------------------------------------------------
# Bloch vectors
# ---------------------------------------------------------------------------


def _check_qubit(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise DimensionError(f"expected a single-qubit operator, got shape {rho.shape}")
    return rho


def bloch(rho: np.ndarray) -> np.ndarray:
    """Bloch vector ``(Tr rho X, Tr rho Y, Tr rho Z)``."""
    rho = _check_qubit(rho)
    return np.array([np.trace(rho @ p).real for p in PAULIS[1:]])


def from_bloch(r: Sequence[float]) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return 0.5 * (I2 + r[0] * SX + r[1] * SY + r[2] * SZ)


_Y_MIRROR = np.diag([1.0, -1.0, 1.0])


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _mirror_rotation(r: np.ndarray, s: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Proper rotation agreeing with the y-mirror on ``r`` and ``s``.

    Composing the mirror with the reflection through a plane containing both
    vectors gives a rotation that fixes their images. When the vectors do not
    span a plane the free normal is chosen to maximise its y component, which
    gives the smallest rotation angle (trace of the product is -1 + 4 n_y^2).
    """
    n = np.cross(r, s)
    if np.linalg.norm(n) > tol * max(1.0, np.linalg.norm(r) * np.linalg.norm(s)):
        n = _unit(n)
    else:
        lead = r if np.linalg.norm(r) >= np.linalg.norm(s) else s
        if np.linalg.norm(lead) <= tol:
            return np.eye(3)
        a = _unit(lead)
        y = np.array([0.0, 1.0, 0.0])
        n = y - a * (a @ y)
        if np.linalg.norm(n) <= tol:
            # lead is along y: every normal gives angle pi, take one fixed choice
            n = np.cross(a, np.array([0.0, 0.0, 1.0]))
        n = _unit(n)
    plane_reflection = np.eye(3) - 2.0 * np.outer(n, n)
    return _Y_MIRROR @ plane_reflection


def so3_to_su2(rot: np.ndarray) -> np.ndarray:
    """Lift a rotation ``R`` to ``U`` with ``U (v.sigma) U^dag = (R v).sigma``."""
    x, y, z, w = Rotation.from_matrix(rot).as_quat()
    return w * I2 - 1j * (x * SX + y * SY + z * SZ)


def transpose_unitary(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Qubit unitary ``U`` with ``U rho U^dag = rho^T`` and ``U sigma U^dag = sigma^T``."""
    r, s = bloch(rho), bloch(sigma)
    return so3_to_su2(_mirror_rotation(r, s))
