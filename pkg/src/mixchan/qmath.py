"""Dense complex linear algebra on small Hilbert spaces.

Everything downstream (channels, distinguishability, information flow) is
built on the operations here: trace norms, Kronecker products, partial
traces, Hermitian eigendecompositions, and unitary propagators. Matrices
are plain complex ``numpy`` arrays; density matrices get a thin validating
wrapper (:class:`QState`). Dimensions stay small (<= 64 in the built-in
scenarios), so dense O(d^3) routines are used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

# Exact-arithmetic identities (state invariants) are checked at 1e-12;
# spectral outputs and Hermiticity detection at 1e-10.
STATE_TOL = 1e-12
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class DimensionError(ValueError):
    """Operands have incompatible or invalid dimensions."""


class NotHermitianError(ValueError):
    """A matrix required to be Hermitian deviates beyond tolerance."""


class InvalidStateError(ValueError):
    """A matrix violates the density-matrix invariants."""


def as_matrix(x) -> np.ndarray:
    """Coerce to a 2-d complex array with finite entries."""
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(m).T


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return m.shape[0] == m.shape[1] and float(np.max(np.abs(m - dagger(m)))) <= tol


def require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    dev = float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0
    if dev > tol:
        raise NotHermitianError(f"matrix deviates from Hermiticity by {dev:.3e} (tol {tol:.0e})")
    return m


def trace_norm(x) -> float:
    """Sum of singular values of ``x``.

    Hermitian inputs (detected at tolerance 1e-10) take the cheaper
    |eigenvalue|-sum path; anything else falls back to a full SVD.
    """
    m = as_matrix(x)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"trace norm needs a square matrix, got shape {m.shape}")
    if is_hermitian(m):
        return float(np.sum(np.abs(np.linalg.eigvalsh(m))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def trace_norm_stack(xs: np.ndarray) -> np.ndarray:
    """Trace norms of a stack of Hermitian matrices, shape (..., d, d) -> (...)."""
    arr = np.asarray(xs, dtype=complex)
    dev = float(np.max(np.abs(arr - np.conj(arr.swapaxes(-1, -2))))) if arr.size else 0.0
    if dev > HERMITIAN_TOL:
        raise NotHermitianError(f"stack deviates from Hermiticity by {dev:.3e}")
    if arr.shape[-1] == 2:
        # closed-form eigenvalues of a 2x2 Hermitian matrix
        mean = 0.5 * np.real(arr[..., 0, 0] + arr[..., 1, 1])
        radius = np.sqrt(
            0.25 * np.real(arr[..., 0, 0] - arr[..., 1, 1]) ** 2
            + np.abs(arr[..., 0, 1]) ** 2
        )
        return np.abs(mean + radius) + np.abs(mean - radius)
    return np.sum(np.abs(np.linalg.eigvalsh(arr)), axis=-1)


def kron(a, b) -> np.ndarray:
    """Kronecker product with the left factor varying slowest."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    if not mats:
        raise ValueError("kron_all needs at least one factor")
    return reduce(np.kron, [as_matrix(m) for m in mats])


@dataclass(frozen=True)
class TensorLayout:
    """Ordered tensor-factor dimensions of a composite Hilbert space.

    The global ordering convention is system, environments, ancilla; all
    operator embeddings pad the remaining factors with identities.
    """

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"factor dimensions must be positive, got {self.factor_dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def n_factors(self) -> int:
        return len(self.factor_dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.factor_dims)

    def check(self, m: np.ndarray) -> None:
        if m.shape != (self.total_dim, self.total_dim):
            raise DimensionError(
                f"matrix shape {m.shape} inconsistent with layout {self.factor_dims} "
                f"(total dimension {self.total_dim})"
            )


def partial_trace(x, layout: TensorLayout, traced_factors: Iterable[int]) -> np.ndarray:
    """Trace out the given tensor factors, keeping the rest in their original order.

    Tracing every factor returns the 1x1 matrix [[Tr x]].
    """
    m = as_matrix(x)
    layout.check(m)
    traced = sorted(set(int(i) for i in traced_factors))
    if traced and (traced[0] < 0 or traced[-1] >= layout.n_factors):
        raise DimensionError(f"traced factors {traced} out of range for {layout.factor_dims}")
    dims = list(layout.factor_dims)
    t = m.reshape(dims + dims)
    n = len(dims)
    for ax in reversed(traced):
        t = np.trace(t, axis1=ax, axis2=ax + n)
        n -= 1
    kept = math.prod(d for i, d in enumerate(dims) if i not in traced)
    return t.reshape(kept, kept)


def embed_operator(op, layout: TensorLayout, op_factors: Sequence[int]) -> np.ndarray:
    """Embed an operator acting on the listed factors into the full space.

    ``op`` must act on the tensor product of the named factors in the order
    given by ``op_factors``; all remaining factors are padded with identities
    and the result is permuted into the layout's canonical factor order.
    """
    m = as_matrix(op)
    factors = [int(f) for f in op_factors]
    if len(set(factors)) != len(factors):
        raise DimensionError(f"duplicate factors in {op_factors}")
    if factors and (min(factors) < 0 or max(factors) >= layout.n_factors):
        raise DimensionError(f"factors {factors} out of range for {layout.factor_dims}")
    dims = layout.factor_dims
    op_dim = math.prod(dims[f] for f in factors)
    if m.shape != (op_dim, op_dim):
        raise DimensionError(f"operator shape {m.shape} does not match factors {factors} of {dims}")
    others = [i for i in range(layout.n_factors) if i not in factors]
    big = np.kron(m, np.eye(math.prod(dims[i] for i in others) if others else 1, dtype=complex))
    order = factors + others
    src_dims = [dims[i] for i in order]
    t = big.reshape(src_dims + src_dims)
    pos = [order.index(k) for k in range(layout.n_factors)]
    t = t.transpose(pos + [p + layout.n_factors for p in pos])
    return np.ascontiguousarray(t.reshape(layout.total_dim, layout.total_dim))


def hermitian_eig(x) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, real) and orthonormal eigenvector columns."""
    m = require_hermitian(x)
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def unitary_exp(h, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via eigendecomposition."""
    m = require_hermitian(h)
    w, v = np.linalg.eigh(m)
    phases = np.exp(-1.0j * w * t)
    return (v * phases) @ dagger(v)


@dataclass(frozen=True)
class QState:
    """Density matrix on a finite-dimensional Hilbert space.

    Validated on construction: Hermitian and unit trace within 1e-12,
    minimum eigenvalue >= -1e-10.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"state matrix must be square, got shape {m.shape}")
        dev = float(np.max(np.abs(m - dagger(m))))
        if dev > STATE_TOL:
            raise InvalidStateError(f"state deviates from Hermiticity by {dev:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError(f"state trace {tr} is not 1 within {STATE_TOL:.0e}")
        w_min = float(np.min(np.linalg.eigvalsh(m)))
        if w_min < -PSD_TOL:
            raise InvalidStateError(f"state has negative eigenvalue {w_min:.3e}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, ket) -> "QState":
        v = np.asarray(ket, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise InvalidStateError("zero ket")
        v = v / norm
        return cls(np.outer(v, np.conj(v)))

    @classmethod
    def from_bloch(cls, vec) -> "QState":
        r = np.asarray(vec, dtype=float).reshape(-1)
        if r.shape != (3,):
            raise InvalidStateError(f"Bloch vector needs 3 components, got {r.shape}")
        norm = float(np.linalg.norm(r))
        if norm > 1.0 + STATE_TOL:
            raise InvalidStateError(f"Bloch vector norm {norm} exceeds 1")
        m = 0.5 * (np.eye(2, dtype=complex) + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)
        return cls(m)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "QState":
        return cls(np.eye(dim, dtype=complex) / dim)


def bloch_pair(theta: float, phi: float) -> tuple[QState, QState]:
    """Antipodal (orthogonal) pure qubit pair along the Bloch direction (theta, phi)."""
    n = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    return QState.from_bloch(n), QState.from_bloch(-n)


# -- random sampling helpers (seeded np.random.Generator everywhere) --------

def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1.0j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (g + dagger(g))


def random_traceless_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    h = random_hermitian(rng, dim)
    return h - np.trace(h) / dim * np.eye(dim, dtype=complex)


def random_density(rng: np.random.Generator, dim: int) -> QState:
    g = rng.normal(size=(dim, dim)) + 1.0j * rng.normal(size=(dim, dim))
    m = g @ dagger(g)
    return QState(m / np.trace(m))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1.0j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_pure_pair(rng: np.random.Generator, dim: int) -> tuple[QState, QState]:
    """Orthogonal pure-state pair from a Haar-ish random frame."""
    u = random_unitary(rng, dim)
    return QState.from_ket(u[:, 0]), QState.from_ket(u[:, 1])
