"""Internal/external/total information decomposition and correlation bounds.

For a mixture and a preparation pair, the internal information is the
distinguishability through the system alone, the total information the
distinguishability through system plus ancilla (the dilation), and the
external information their difference: what the ancilla record adds. The
external information is bounded by the summed trace distances between each
dilated state and the product of its marginals, a measure of the (purely
classical) system-ancilla correlations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelFamily, MixtureSpec, dilate, mix
from .distinguish import HelstromEnsemble, trace_distance
from .nonmarkov import TimeGrid, derivative_series
from .qmath import DimensionError, QState, trace_norm, trace_norm_stack

BOUND_TOL = 1e-10
SERIES_TOL = 1e-12


@dataclass(frozen=True)
class InfoFlowSeries:
    """Sampled information-flow quantities on a common grid.

    Invariants checked on construction: i_tot = i_int + i_ext (definition),
    i_ext >= 0 with i_ext(0) = 0, and i_ext below the correlation bound.
    """

    grid: TimeGrid
    i_int: np.ndarray
    i_ext: np.ndarray
    i_tot: np.ndarray
    corr_bound: np.ndarray

    def __post_init__(self):
        n = self.grid.n
        arrays = {}
        for name in ("i_int", "i_ext", "i_tot", "corr_bound"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({n},)")
            arr = arr.copy()
            arr.setflags(write=False)
            arrays[name] = arr
        dev = float(np.max(np.abs(arrays["i_tot"] - arrays["i_int"] - arrays["i_ext"])))
        if dev > SERIES_TOL:
            raise ValueError(f"i_tot != i_int + i_ext, max deviation {dev:.3e}")
        if float(np.min(arrays["i_ext"])) < -SERIES_TOL:
            raise ValueError(f"i_ext must be non-negative, min {np.min(arrays['i_ext']):.3e}")
        if self.grid.t_start == 0.0 and arrays["i_ext"][0] > SERIES_TOL:
            raise ValueError(f"i_ext(0) must vanish, got {arrays['i_ext'][0]:.3e}")
        excess = float(np.max(arrays["i_ext"] - arrays["corr_bound"]))
        if excess > BOUND_TOL:
            raise ValueError(f"i_ext exceeds the correlation bound by {excess:.3e}")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)


def _product_with_ancilla(system_stack: np.ndarray, ancilla: np.ndarray) -> np.ndarray:
    t, d, _ = system_stack.shape
    n = ancilla.shape[0]
    prod = np.einsum("tab,cd->tacbd", system_stack, ancilla)
    return prod.reshape(t, d * n, d * n)


def _info_flow(spec: MixtureSpec, ensemble: HelstromEnsemble, grid: TimeGrid) -> InfoFlowSeries:
    if ensemble.dim != spec.system_dim:
        raise DimensionError(
            f"preparation dimension {ensemble.dim} != system dimension {spec.system_dim}"
        )
    mixed = mix(spec)
    dilated = dilate(spec)
    ts = grid.points
    delta = ensemble.delta()

    i_int = np.asarray(trace_norm_stack(mixed.propagate(delta, ts)), dtype=float)
    i_tot = np.asarray(trace_norm_stack(dilated.propagate(delta, ts)), dtype=float)
    i_ext = i_tot - i_int

    ancilla = spec.ancilla_state()
    bound = np.zeros_like(i_int)
    for weight, rho in ((ensemble.p1, ensemble.rho1), (ensemble.p2, ensemble.rho2)):
        joint = dilated.propagate(rho.matrix, ts)
        product = _product_with_ancilla(mixed.propagate(rho.matrix, ts), ancilla)
        bound += weight * np.asarray(trace_norm_stack(joint - product), dtype=float)

    return InfoFlowSeries(grid=grid, i_int=i_int, i_ext=i_ext, i_tot=i_tot, corr_bound=bound)


def info_flow(spec: MixtureSpec, pair: tuple[QState, QState], grid: TimeGrid) -> InfoFlowSeries:
    """Equiprobable information flow: i_int = half the trace norm of the
    evolved pair difference under the mixture, i_tot the same under the
    dilation, i_ext the difference, and the system-ancilla correlation bound
    summed over both preparations."""
    return _info_flow(spec, HelstromEnsemble.equal(pair[0], pair[1]), grid)


def info_flow_weighted(
    spec: MixtureSpec, ensemble: HelstromEnsemble, grid: TimeGrid
) -> InfoFlowSeries:
    """Information flow for unequal preparation probabilities: series of
    ||map_t[p1 rho1 - p2 rho2]||_1 with the probability-weighted correlation
    bound."""
    return _info_flow(spec, ensemble, grid)


def correlation_bound(spec: MixtureSpec, rho: QState, t: float) -> float:
    """Trace distance between the dilated state and the product of its
    marginals; zero at t = 0 and a measure of system-ancilla correlations."""
    if rho.dim != spec.system_dim:
        raise DimensionError(f"state dimension {rho.dim} != system dimension {spec.system_dim}")
    joint = dilate(spec).apply_matrix(rho.matrix, t)
    product = np.kron(mix(spec).apply_matrix(rho.matrix, t), spec.ancilla_state())
    return 0.5 * trace_norm(joint - product)


@dataclass(frozen=True)
class MarginalsLemmaReport:
    """Both sides of the marginals bound for a classically correlated state."""

    n: int
    lhs: float
    rhs: float
    bound_ok: bool
    equality_ok: bool | None  # None unless n == 2, where the bound saturates


def marginals_lemma_check(
    weights, states, equality_tol: float = 1e-12
) -> MarginalsLemmaReport:
    """Compare D(rho_SA, rho_S x rho_A) against twice the weighted pairwise
    trace distances, for rho_SA = sum_i q_i rho_i (x) |i><i|."""
    q = [float(w) for w in weights]
    states = list(states)
    if len(q) != len(states) or not states:
        raise ValueError("need one weight per state")
    if any(w < -1e-12 for w in q) or abs(sum(q) - 1.0) > 1e-12:
        raise ValueError(f"weights must be a probability distribution, got {q}")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionError(f"states must share a dimension, got {sorted(dims)}")

    n = len(states)
    d = states[0].dim
    joint = np.zeros((d * n, d * n), dtype=complex)
    marginal_s = np.zeros((d, d), dtype=complex)
    for i, (w, s) in enumerate(zip(q, states)):
        proj = np.zeros((n, n), dtype=complex)
        proj[i, i] = 1.0
        joint += w * np.kron(s.matrix, proj)
        marginal_s += w * s.matrix
    marginal_a = np.diag(np.asarray(q, dtype=complex))

    lhs = 0.5 * trace_norm(joint - np.kron(marginal_s, marginal_a))
    rhs = 2.0 * sum(
        q[i] * q[j] * trace_distance(states[i], states[j])
        for i in range(n)
        for j in range(i)
    )
    equality_ok = abs(lhs - rhs) <= equality_tol if n == 2 else None
    return MarginalsLemmaReport(
        n=n,
        lhs=lhs,
        rhs=rhs,
        bound_ok=lhs <= rhs + BOUND_TOL,
        equality_ok=equality_ok,
    )


@dataclass(frozen=True)
class FlowBalanceReport:
    """Sign structure of the internal/external information rates.

    When every component is Markovian on the grid, the total-information
    rate must be non-positive everywhere; at points of internal-information
    backflow the external rate must be negative (the gain comes out of the
    ancilla record). For all-unitary components the total information is
    constant, so the two rates balance exactly.
    """

    precondition_ok: bool
    message: str
    max_total_rate: float | None = None
    total_rate_ok: bool | None = None
    total_constant: bool | None = None
    backflow_times: tuple[float, ...] = ()
    backflow_consistent: bool | None = None

    @property
    def ok(self) -> bool:
        if not self.precondition_ok:
            return False
        checks = [self.total_rate_ok, self.backflow_consistent]
        if self.total_constant is not None:
            checks.append(self.total_constant)
        return all(c is not False for c in checks)


def flow_balance_check(
    spec: MixtureSpec,
    pair: tuple[QState, QState],
    grid: TimeGrid,
    rate_tol: float = 1e-8,
    monotone_tol: float = 1e-10,
) -> FlowBalanceReport:
    """Verify the flow-balance inequality for Markovian components.

    Precondition (reported, not raised): every component's distinguishability
    series for this pair is monotone non-increasing on the grid.
    """
    rho1, rho2 = pair
    delta = 0.5 * (rho1.matrix - rho2.matrix)
    for k, comp in enumerate(spec.components):
        series = np.asarray(trace_norm_stack(comp.propagate(delta, grid.points)), dtype=float)
        worst = float(np.max(np.diff(series)))
        if worst > monotone_tol:
            return FlowBalanceReport(
                precondition_ok=False,
                message=(
                    f"component {k} is not Markovian on this grid "
                    f"(distinguishability rises by {worst:.3e})"
                ),
            )

    series = info_flow(spec, pair, grid)
    d_int = derivative_series(series.i_int, grid)
    d_tot = derivative_series(series.i_tot, grid)
    interior = slice(1, -1)

    max_total_rate = float(np.max(d_tot[interior]))
    total_rate_ok = max_total_rate <= rate_tol

    all_unitary = all(c.is_unitary_family for c in spec.components)
    total_constant = None
    if all_unitary:
        total_constant = bool(
            np.max(np.abs(series.i_tot - series.i_tot[0])) <= 1e-10
        )

    backflow = np.zeros_like(d_int, dtype=bool)
    backflow[interior] = d_int[interior] > rate_tol
    backflow_times = tuple(float(t) for t in grid.points[backflow])
    d_ext = d_tot - d_int
    backflow_consistent = bool(np.all(d_ext[backflow] < 0.0)) if backflow.any() else True

    return FlowBalanceReport(
        precondition_ok=True,
        message="ok",
        max_total_rate=max_total_rate,
        total_rate_ok=total_rate_ok,
        total_constant=total_constant,
        backflow_times=backflow_times,
        backflow_consistent=backflow_consistent,
    )
