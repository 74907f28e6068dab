"""Dense linear algebra for small Hermitian operators.

Matrices are plain ``numpy`` complex arrays. Composite systems are described
by a list of factor dimensions; factor 0 is the leftmost tensor factor and
composite indices are big-endian in that list.
"""
from __future__ import annotations

from functools import reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12


class NonHermitianError(ValueError):
    """Raised when an operator that must be Hermitian is not."""

    def __init__(self, asymmetry: float, tol: float):
        super().__init__(
            f"operator is not Hermitian: max|M - M^dag| = {asymmetry:.3e} > {tol:.1e}"
        )
        self.asymmetry = asymmetry


class DimensionError(ValueError):
    """Raised when a dimension list does not match an operator."""


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def asymmetry(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitize(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``(M + M^dag)/2`` after checking ``M`` is Hermitian.

    The tolerance scales with the largest entry once entries exceed one,
    since inverse maps blow up magnitudes (and rounding with them).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    asym = asymmetry(m)
    if asym > tol * scale:
        raise NonHermitianError(asym, tol * scale)
    return 0.5 * (m + m.conj().T)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    try:
        hermitize(m, tol)
    except ValueError:
        return False
    return True


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices, left to right."""
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (np.asarray(m) for m in mats))


def hermitian_eig(h: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    w, v = np.linalg.eigh(hermitize(h))
    return EigenSystem(w, v)


def eigvalsh(h: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(hermitize(h))


def trace_norm(h: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix, the sum of absolute eigenvalues."""
    return float(np.sum(np.abs(eigvalsh(h))))


def matrix_function(h: np.ndarray, fn) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = hermitian_eig(h)
    return (v * fn(w)) @ v.conj().T


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    m = np.asarray(m)
    n = int(np.prod(dims)) if dims else 1
    if m.ndim != 2 or m.shape != (n, n):
        raise DimensionError(f"dims {dims} (product {n}) do not match shape {m.shape}")
    if any(d < 1 for d in dims):
        raise DimensionError(f"invalid dims {dims}")
    return dims


def _as_index_set(idx: int | Iterable[int], n: int) -> list[int]:
    out = [idx] if isinstance(idx, (int, np.integer)) else list(idx)
    for i in out:
        if not 0 <= i < n:
            raise DimensionError(f"subsystem index {i} out of range for {n} factors")
    return sorted(set(int(i) for i in out))


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: int | Iterable[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``."""
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = _as_index_set(keep, n)
    t = np.asarray(m).reshape(dims + dims)
    # trace the highest factor first so lower axis numbers stay valid
    nleft = n
    for i in reversed(range(n)):
        if i in keep:
            continue
        t = np.trace(t, axis1=i, axis2=i + nleft)
        nleft -= 1
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d, d)


def partial_transpose(m: np.ndarray, dims: Sequence[int], subsystem: int | Iterable[int]) -> np.ndarray:
    """Transpose the listed tensor factors, leaving the others alone."""
    dims = _check_dims(m, dims)
    n = len(dims)
    sub = _as_index_set(subsystem, n)
    t = np.asarray(m).reshape(dims + dims)
    axes = list(range(2 * n))
    for i in sub:
        axes[i], axes[i + n] = axes[i + n], axes[i]
    return t.transpose(axes).reshape(m.shape)
