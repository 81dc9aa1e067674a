"""Time-parameterized CPT channel families and their convex mixtures.

A :class:`ChannelFamily` is a one-parameter family of completely positive
trace-preserving linear maps t -> map on d x d matrices. Besides the basic
representations (analytic qubit dephasing, Hamiltonian conjugation, Kraus,
Liouville superoperator, system-environment coupling), this module builds

* ``mix``: the convex combination sum_i q_i map_i (a CPT map again),
* ``dilate``: the block-diagonal map on system (x) ancilla whose i-th
  ancilla block is q_i map_i, recording which component acted,
* ``microscopic_family``: the closed four-party realization that evolves
  system, component environments, and ancilla under a single Hamiltonian
  sum_i H_i (x) P_i and traces out the environments.

Families are immutable after construction and ``apply`` is pure, so
concurrent evaluation at different times is safe.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .qmath import (
    DimensionError,
    NotHermitianError,
    QState,
    TensorLayout,
    as_matrix,
    dagger,
    embed_operator,
    kron_all,
    partial_trace,
    require_hermitian,
)

WEIGHT_TOL = 1e-12


class ChannelFamily(abc.ABC):
    """One-parameter family of CPT maps acting on input_dim x input_dim matrices."""

    def __init__(self, input_dim: int, output_dim: int | None = None):
        self.input_dim = int(input_dim)
        self.output_dim = int(output_dim) if output_dim is not None else self.input_dim

    #: True when every map in the family is unitary conjugation (trace-norm preserving).
    is_unitary_family: bool = False

    @abc.abstractmethod
    def _apply(self, x: np.ndarray, t: float) -> np.ndarray:
        """Linear action on a validated input matrix."""

    def _propagate(self, x: np.ndarray, ts: np.ndarray) -> np.ndarray:
        out = np.empty((ts.size, self.output_dim, self.output_dim), dtype=complex)
        for k, t in enumerate(ts):
            out[k] = self._apply(x, float(t))
        return out

    def _check(self, x, t: float) -> np.ndarray:
        m = as_matrix(x)
        if m.shape != (self.input_dim, self.input_dim):
            raise DimensionError(
                f"input shape {m.shape} does not match family dimension {self.input_dim}"
            )
        if t < 0:
            raise ValueError(f"time must be non-negative, got {t}")
        return m

    def apply_matrix(self, x, t: float) -> np.ndarray:
        """Apply the time-t map to an arbitrary matrix (linear extension)."""
        return self._apply(self._check(x, t), float(t))

    def propagate(self, x, ts) -> np.ndarray:
        """Apply the family at every time in ``ts``; returns shape (len(ts), d_out, d_out)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if ts.size and float(ts.min()) < 0:
            raise ValueError("times must be non-negative")
        m = self._check(x, 0.0)
        return self._propagate(m, ts)

    def apply(self, rho: QState, t: float) -> QState:
        """Apply the time-t map to a state, validating the output."""
        return QState(self.apply_matrix(rho.matrix, t))


class DephasingSemigroup(ChannelFamily):
    """Qubit pure dephasing semigroup.

    Populations in the sigma_z eigenbasis are invariant; the <0|rho|1>
    coherence is multiplied by mu(t) = exp(-(gamma + i*lam) t) and its
    conjugate element by conj(mu(t)). gamma >= 0 is the decay rate, lam the
    rotation frequency (Hamiltonian part lam/2 * sigma_z).
    """

    def __init__(self, gamma: float, lam: float):
        if gamma < 0:
            raise ValueError(f"decay rate must be non-negative, got {gamma}")
        super().__init__(2)
        self.gamma = float(gamma)
        self.lam = float(lam)

    @property
    def is_unitary_family(self) -> bool:  # type: ignore[override]
        return self.gamma == 0.0

    def multiplier(self, t) -> np.ndarray | complex:
        return np.exp(-(self.gamma + 1.0j * self.lam) * np.asarray(t, dtype=float))

    def _apply(self, x, t):
        mu = complex(self.multiplier(t))
        out = x.astype(complex).copy()
        out[0, 1] *= mu
        out[1, 0] *= np.conj(mu)
        return out

    def _propagate(self, x, ts):
        mu = self.multiplier(ts)
        out = np.empty((ts.size, 2, 2), dtype=complex)
        out[:, 0, 0] = x[0, 0]
        out[:, 1, 1] = x[1, 1]
        out[:, 0, 1] = x[0, 1] * mu
        out[:, 1, 0] = x[1, 0] * np.conj(mu)
        return out

    def __repr__(self):
        return f"DephasingSemigroup(gamma={self.gamma}, lam={self.lam})"


class UnitaryFamily(ChannelFamily):
    """Conjugation by exp(-i H t) for a fixed Hermitian Hamiltonian."""

    is_unitary_family = True

    def __init__(self, hamiltonian):
        h = require_hermitian(hamiltonian)
        super().__init__(h.shape[0])
        self.hamiltonian = h
        self._w, self._v = np.linalg.eigh(h)

    def unitary(self, t: float) -> np.ndarray:
        phases = np.exp(-1.0j * self._w * float(t))
        return (self._v * phases) @ dagger(self._v)

    def _apply(self, x, t):
        u = self.unitary(t)
        return u @ x @ dagger(u)

    def _propagate(self, x, ts):
        phases = np.exp(-1.0j * np.outer(ts, self._w))
        u = np.einsum("ab,tb,cb->tac", self._v, phases, np.conj(self._v))
        return np.einsum("tab,bc,tdc->tad", u, x, np.conj(u))


class KrausFamily(ChannelFamily):
    """Family given by a callable t -> list of Kraus operators."""

    def __init__(self, dim: int, kraus_fn: Callable[[float], Sequence[np.ndarray]]):
        super().__init__(dim)
        self.kraus_fn = kraus_fn

    def _apply(self, x, t):
        out = np.zeros_like(x)
        for k in self.kraus_fn(t):
            k = as_matrix(k)
            out = out + k @ x @ dagger(k)
        return out


class LiouvilleFamily(ChannelFamily):
    """Family given by a callable t -> d^2 x d^2 superoperator on row-major vec(rho)."""

    def __init__(self, dim: int, superop_fn: Callable[[float], np.ndarray]):
        super().__init__(dim)
        self.superop_fn = superop_fn

    def _apply(self, x, t):
        d = self.input_dim
        s = as_matrix(self.superop_fn(t))
        if s.shape != (d * d, d * d):
            raise DimensionError(f"superoperator shape {s.shape}, expected {(d * d, d * d)}")
        return (s @ x.reshape(-1)).reshape(d, d)


def kraus_to_superop(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Row-major-vec superoperator sum_i K_i (x) conj(K_i) of a Kraus set."""
    ops = [as_matrix(k) for k in kraus]
    return sum(np.kron(k, np.conj(k)) for k in ops)


class HamiltonianDilationFamily(ChannelFamily):
    """System-environment coupling: rho -> Tr_E[exp(-iHt) (rho (x) env) exp(iHt)].

    ``hamiltonian`` acts on system (x) environment with the system first;
    ``env_state`` is the fixed environment preparation.
    """

    def __init__(self, hamiltonian, env_state: QState, system_dim: int):
        h = require_hermitian(hamiltonian)
        env = env_state.matrix
        system_dim = int(system_dim)
        if h.shape[0] % system_dim or h.shape[0] != system_dim * env.shape[0]:
            raise DimensionError(
                f"Hamiltonian dim {h.shape[0]} != system {system_dim} x environment {env.shape[0]}"
            )
        super().__init__(system_dim)
        self.hamiltonian = h
        self.env_state = env_state
        self.env_dim = env.shape[0]
        self._layout = TensorLayout((system_dim, self.env_dim))
        self._w, self._v = np.linalg.eigh(h)

    def _apply(self, x, t):
        u = (self._v * np.exp(-1.0j * self._w * t)) @ dagger(self._v)
        full = u @ np.kron(x, self.env_state.matrix) @ dagger(u)
        return partial_trace(full, self._layout, {1})

    def _propagate(self, x, ts):
        phases = np.exp(-1.0j * np.outer(ts, self._w))
        u = np.einsum("ab,tb,cb->tac", self._v, phases, np.conj(self._v))
        full = np.einsum("tab,bc,tdc->tad", u, np.kron(x, self.env_state.matrix), np.conj(u))
        d, e = self.input_dim, self.env_dim
        return np.einsum("tiaja->tij", full.reshape(ts.size, d, e, d, e))


@dataclass(frozen=True)
class MixtureSpec:
    """Probability weights q_i plus the component channel families."""

    weights: tuple[float, ...]
    components: tuple[ChannelFamily, ...]

    def __post_init__(self):
        weights = tuple(float(q) for q in self.weights)
        components = tuple(self.components)
        if not components:
            raise ValueError("mixture needs at least one component")
        if len(weights) != len(components):
            raise ValueError(f"{len(weights)} weights for {len(components)} components")
        if any(q < -WEIGHT_TOL for q in weights):
            raise ValueError(f"weights must be non-negative, got {weights}")
        if abs(sum(weights) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got sum {sum(weights)!r}")
        dims = {c.input_dim for c in components}
        if len(dims) != 1:
            raise DimensionError(f"components must share the system dimension, got {sorted(dims)}")
        if any(c.output_dim != c.input_dim for c in components):
            raise DimensionError("mixture components must preserve the system dimension")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def system_dim(self) -> int:
        return self.components[0].input_dim

    def ancilla_state(self) -> np.ndarray:
        """The fixed diagonal ancilla preparation sum_i q_i |i><i|."""
        return np.diag(np.asarray(self.weights, dtype=complex))


class MixedFamily(ChannelFamily):
    """Convex combination sum_i q_i map_i acting on the system alone."""

    def __init__(self, spec: MixtureSpec):
        super().__init__(spec.system_dim)
        self.spec = spec

    def _apply(self, x, t):
        out = np.zeros_like(x)
        for q, comp in zip(self.spec.weights, self.spec.components):
            out = out + q * comp._apply(x, t)
        return out

    def _propagate(self, x, ts):
        out = np.zeros((ts.size, self.output_dim, self.output_dim), dtype=complex)
        for q, comp in zip(self.spec.weights, self.spec.components):
            out += q * comp._propagate(x, ts)
        return out


class DilatedFamily(ChannelFamily):
    """Map to system (x) ancilla with ancilla block i equal to q_i map_i.

    The output is block diagonal in the ancilla basis; the ancilla marginal
    is the constant state sum_i q_i |i><i| and the system marginal recovers
    the plain mixture.
    """

    def __init__(self, spec: MixtureSpec):
        super().__init__(spec.system_dim, spec.system_dim * spec.n)
        self.spec = spec
        self.ancilla_dim = spec.n
        self.layout = TensorLayout((spec.system_dim, spec.n))

    def _apply(self, x, t):
        n = self.ancilla_dim
        out = np.zeros((self.output_dim, self.output_dim), dtype=complex)
        for i, (q, comp) in enumerate(zip(self.spec.weights, self.spec.components)):
            out[i::n, i::n] = q * comp._apply(x, t)
        return out

    def _propagate(self, x, ts):
        n = self.ancilla_dim
        out = np.zeros((ts.size, self.output_dim, self.output_dim), dtype=complex)
        for i, (q, comp) in enumerate(zip(self.spec.weights, self.spec.components)):
            out[:, i::n, i::n] = q * comp._propagate(x, ts)
        return out


def mix(spec: MixtureSpec) -> MixedFamily:
    """Convex mixture of the component families."""
    return MixedFamily(spec)


def dilate(spec: MixtureSpec) -> DilatedFamily:
    """Ancilla dilation of the mixture (records which component acted)."""
    return DilatedFamily(spec)


@dataclass(frozen=True)
class MicroscopicModel:
    """Closed four-party model: system, one environment per component, ancilla.

    ``hamiltonians[i]`` is Hermitian on system (x) environment_i (system
    first); ``env_states[i]`` the fixed preparation of environment i; the
    ancilla starts in the diagonal state with the mixture weights.
    """

    system_dim: int
    env_dims: tuple[int, ...]
    hamiltonians: tuple[np.ndarray, ...]
    env_states: tuple[QState, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        n = len(self.weights)
        if n == 0:
            raise ValueError("model needs at least one component")
        if not (len(self.env_dims) == len(self.hamiltonians) == len(self.env_states) == n):
            raise ValueError("env_dims, hamiltonians, env_states, weights must have equal length")
        if any(q < -WEIGHT_TOL for q in self.weights) or abs(sum(self.weights) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must be a probability distribution, got {self.weights}")
        hams = []
        for i, h in enumerate(self.hamiltonians):
            h = require_hermitian(h)
            expected = self.system_dim * self.env_dims[i]
            if h.shape[0] != expected:
                raise DimensionError(
                    f"hamiltonian {i} has dim {h.shape[0]}, expected {expected}"
                )
            if self.env_states[i].dim != self.env_dims[i]:
                raise DimensionError(
                    f"environment state {i} has dim {self.env_states[i].dim}, "
                    f"expected {self.env_dims[i]}"
                )
            hams.append(h)
        object.__setattr__(self, "env_dims", tuple(int(d) for d in self.env_dims))
        object.__setattr__(self, "hamiltonians", tuple(hams))
        object.__setattr__(self, "env_states", tuple(self.env_states))
        object.__setattr__(self, "weights", tuple(float(q) for q in self.weights))

    @property
    def n(self) -> int:
        return len(self.weights)

    def layout(self) -> TensorLayout:
        """Factor ordering: system, environments in component order, ancilla."""
        return TensorLayout((self.system_dim, *self.env_dims, self.n))

    def ancilla_state(self) -> np.ndarray:
        return np.diag(np.asarray(self.weights, dtype=complex))


def total_hamiltonian(model: MicroscopicModel) -> np.ndarray:
    """sum_i H_i (x) |i><i| embedded in the full system-environments-ancilla space."""
    layout = model.layout()
    n = model.n
    h_full = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
    for i in range(n):
        proj = np.zeros((n, n), dtype=complex)
        proj[i, i] = 1.0
        term = np.kron(model.hamiltonians[i], proj)
        h_full += embed_operator(term, layout, (0, i + 1, layout.n_factors - 1))
    return h_full


class MicroscopicFamily(ChannelFamily):
    """Unitary evolution of the full model, environments traced out.

    Maps a system matrix to a system (x) ancilla matrix; equals the dilation
    of the component families realized by the individual couplings.
    """

    def __init__(self, model: MicroscopicModel, dim_cap: int = 256):
        layout = model.layout()
        if layout.total_dim > dim_cap:
            raise DimensionError(
                f"total dimension {layout.total_dim} exceeds the cap {dim_cap}"
            )
        super().__init__(model.system_dim, model.system_dim * model.n)
        self.model = model
        self.layout = layout
        self._env_block = kron_all(
            [s.matrix for s in model.env_states] + [model.ancilla_state()]
        )
        self._w, self._v = np.linalg.eigh(total_hamiltonian(model))
        self._traced = tuple(range(1, 1 + model.n))

    def _apply(self, x, t):
        u = (self._v * np.exp(-1.0j * self._w * t)) @ dagger(self._v)
        full = u @ np.kron(x, self._env_block) @ dagger(u)
        return partial_trace(full, self.layout, self._traced)

    def _propagate(self, x, ts):
        phases = np.exp(-1.0j * np.outer(ts, self._w))
        u = np.einsum("ab,tb,cb->tac", self._v, phases, np.conj(self._v))
        init = np.kron(x, self._env_block)
        full = np.einsum("tab,bc,tdc->tad", u, init, np.conj(u))
        out = np.empty((ts.size, self.output_dim, self.output_dim), dtype=complex)
        for k in range(ts.size):
            out[k] = partial_trace(full[k], self.layout, self._traced)
        return out


def microscopic_family(model: MicroscopicModel, dim_cap: int = 256) -> MicroscopicFamily:
    """Build the four-party realization of the model (total dimension <= dim_cap)."""
    return MicroscopicFamily(model, dim_cap=dim_cap)


def choi_matrix(family: ChannelFamily, t: float) -> np.ndarray:
    """Choi matrix: the family applied to one factor of the unnormalized
    maximally entangled state, output factor first."""
    d = family.input_dim
    dout = family.output_dim
    c = np.zeros((dout * d, dout * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e_ij = np.zeros((d, d), dtype=complex)
            e_ij[i, j] = 1.0
            c += np.kron(family.apply_matrix(e_ij, t), e_ij)
    return c


@dataclass(frozen=True)
class CPTCheck:
    t: float
    trace_residual: float
    min_choi_eigenvalue: float

    def ok(self, tp_tol: float = 1e-10, cp_tol: float = 1e-9) -> bool:
        return self.trace_residual <= tp_tol and self.min_choi_eigenvalue >= -cp_tol


@dataclass(frozen=True)
class CPTReport:
    """Per-time Choi positivity and trace-preservation residuals."""

    checks: tuple[CPTCheck, ...]
    tp_tol: float = 1e-10
    cp_tol: float = 1e-9

    @property
    def max_trace_residual(self) -> float:
        return max(c.trace_residual for c in self.checks)

    @property
    def min_choi_eigenvalue(self) -> float:
        return min(c.min_choi_eigenvalue for c in self.checks)

    @property
    def ok(self) -> bool:
        return all(c.ok(self.tp_tol, self.cp_tol) for c in self.checks)


def verify_cpt(
    family: ChannelFamily,
    times: Sequence[float],
    tp_tol: float = 1e-10,
    cp_tol: float = 1e-9,
) -> CPTReport:
    """Sample the Choi matrix over ``times`` and report CPT residuals."""
    d = family.input_dim
    checks = []
    for t in times:
        c = choi_matrix(family, float(t))
        marginal = partial_trace(c, TensorLayout((family.output_dim, d)), {0})
        residual = float(np.max(np.abs(marginal - np.eye(d))))
        herm_dev = float(np.max(np.abs(c - dagger(c))))
        min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (c + dagger(c)))))
        # a non-Hermitian Choi is as fatal as a negative eigenvalue
        if herm_dev > 1e-10:
            min_eig = -np.inf
        checks.append(CPTCheck(t=float(t), trace_residual=residual, min_choi_eigenvalue=min_eig))
    return CPTReport(checks=tuple(checks), tp_tol=tp_tol, cp_tol=cp_tol)
