"""Randomized and analytic verification suites behind `mixchan verify`.

Every suite runs with a fixed default seed and reports one named check per
property, with the worst observed residual in the detail string. The suites
mirror the structural identities the library is built on: complete
positivity of every built-in family, weighted trace-norm additivity of the
dilation, subadditivity of the backflow measure, the marginals bound for
classically correlated states, the information-flow bounds, the equivalence
of the four-party realization with the block dilation, and the Monte Carlo
discrimination oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    HamiltonianDilationFamily,
    MicroscopicModel,
    MixtureSpec,
    DephasingSemigroup,
    dilate,
    microscopic_family,
    mix,
    total_hamiltonian,
    verify_cpt,
)
from .distinguish import HelstromEnsemble, monte_carlo_discriminate
from .infoflow import info_flow, marginals_lemma_check
from .nonmarkov import SearchConfig, TimeGrid, verify_subadditivity
from .presets import PRESETS
from .qmath import (
    QState,
    embed_operator,
    random_density,
    random_hermitian,
    random_traceless_hermitian,
    trace_norm_stack,
    unitary_exp,
)

DEFAULT_SEED = 20240817

SUITE_NAMES = (
    "cpt",
    "additivity",
    "subadditivity",
    "lemma",
    "bounds",
    "microscopic",
    "montecarlo",
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    checks: tuple[CheckResult, ...]

    @property
    def n_passed(self) -> int:
        return sum(c.ok for c in self.checks)

    @property
    def n_failed(self) -> int:
        return len(self.checks) - self.n_passed

    @property
    def ok(self) -> bool:
        return self.n_failed == 0


def _random_dephasing_spec(
    rng: np.random.Generator, unitary: bool = False, allow_nested: bool = False
) -> MixtureSpec:
    def component():
        if allow_nested and rng.random() < 0.5:
            # a mixture is itself a valid (generally non-Markovian) component
            return mix(_random_dephasing_spec(rng, unitary=unitary))
        gamma = 0.0 if unitary else float(rng.uniform(0.0, 1.0))
        lam = float(rng.uniform(-2.0 * math.pi, 2.0 * math.pi))
        return DephasingSemigroup(gamma, lam)

    q1 = float(rng.uniform(0.0, 1.0))
    return MixtureSpec(weights=(q1, 1.0 - q1), components=(component(), component()))


def _builtin_families():
    for name in sorted(PRESETS):
        scenario = PRESETS[name]
        spec = scenario.mixture_spec()
        for i, comp in enumerate(spec.components):
            yield f"{name}/component-{i}", comp
        yield f"{name}/mixture", mix(spec)
        yield f"{name}/dilation", dilate(spec)


def suite_cpt(seed: int = DEFAULT_SEED) -> SuiteResult:
    """Choi positivity and trace preservation for every built-in family."""
    rng = np.random.default_rng(seed)
    times = np.sort(rng.uniform(0.0, 6.0, size=20))
    checks = []
    for label, family in _builtin_families():
        report = verify_cpt(family, times)
        checks.append(
            CheckResult(
                name=f"cpt/{label}",
                ok=report.ok,
                detail=(
                    f"min Choi eigenvalue {report.min_choi_eigenvalue:.3e}, "
                    f"max trace residual {report.max_trace_residual:.3e}"
                ),
            )
        )
    return SuiteResult("cpt", tuple(checks))


def suite_additivity(seed: int = DEFAULT_SEED, draws: int = 200) -> SuiteResult:
    """Weighted trace-norm additivity of the dilation on random inputs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    for _ in range(draws):
        spec = _random_dephasing_spec(rng)
        x = random_traceless_hermitian(rng, 2)
        t = float(rng.uniform(0.0, 6.0))
        total = float(trace_norm_stack(dilate(spec).propagate(x, [t]))[0])
        weighted = sum(
            q * float(trace_norm_stack(c.propagate(x, [t]))[0])
            for q, c in zip(spec.weights, spec.components)
        )
        residual = abs(total - weighted)
        worst = max(worst, residual)
        failures += residual > 1e-10
    return SuiteResult(
        "additivity",
        (
            CheckResult(
                name=f"additivity/random-mixtures-x{draws}",
                ok=failures == 0,
                detail=f"max residual {worst:.3e} (tol 1e-10), {failures} failures",
            ),
        ),
    )


def suite_subadditivity(seed: int = DEFAULT_SEED, draws: int = 100) -> SuiteResult:
    """Measure subadditivity under dilation, plus Markovian closure."""
    rng = np.random.default_rng(seed)
    grid = TimeGrid.uniform(0.0, 12.0, 4e-3)
    search = SearchConfig(
        seed=seed, polar_points=13, azimuth_points=4, refine_iters=24,
        validate_unrestricted=False,
    )
    worst_slack = math.inf
    violations = 0
    markov_worst = 0.0
    markov_failures = 0
    n_markov = 0
    for k in range(draws):
        spec = _random_dephasing_spec(rng, allow_nested=(k % 2 == 1))
        report = verify_subadditivity(spec, grid, search)
        worst_slack = min(worst_slack, report.slack)
        violations += not report.ok
        if all(isinstance(c, DephasingSemigroup) for c in spec.components):
            n_markov += 1
            markov_worst = max(markov_worst, report.dilated_value)
            markov_failures += report.dilated_value > 1e-6
    checks = (
        CheckResult(
            name=f"subadditivity/random-mixtures-x{draws}",
            ok=violations == 0,
            detail=f"min slack {worst_slack:.3e}, {violations} violations",
        ),
        CheckResult(
            name=f"subadditivity/markovian-closure-x{n_markov}",
            ok=markov_failures == 0,
            detail=(
                f"max dilated measure over semigroup-only draws {markov_worst:.3e} "
                f"(tol 1e-6), {markov_failures} failures"
            ),
        ),
    )
    return SuiteResult("subadditivity", checks)


def suite_lemma(seed: int = DEFAULT_SEED, draws: int = 500) -> SuiteResult:
    """Marginals bound: equality at n = 2, inequality at n in {3, 4}."""
    rng = np.random.default_rng(seed)
    eq_worst = 0.0
    eq_failures = 0
    for _ in range(draws):
        q1 = float(rng.uniform(0.0, 1.0))
        report = marginals_lemma_check(
            (q1, 1.0 - q1), (random_density(rng, 2), random_density(rng, 2))
        )
        eq_worst = max(eq_worst, abs(report.lhs - report.rhs))
        eq_failures += not (report.bound_ok and report.equality_ok)
    bound_failures = 0
    worst_excess = -math.inf
    for _ in range(draws):
        n = int(rng.integers(3, 5))
        q = rng.dirichlet(np.ones(n))
        report = marginals_lemma_check(q, tuple(random_density(rng, 2) for _ in range(n)))
        worst_excess = max(worst_excess, report.lhs - report.rhs)
        bound_failures += not report.bound_ok
    checks = (
        CheckResult(
            name=f"lemma/two-component-equality-x{draws}",
            ok=eq_failures == 0,
            detail=f"max |lhs - rhs| {eq_worst:.3e} (tol 1e-12), {eq_failures} failures",
        ),
        CheckResult(
            name=f"lemma/multi-component-bound-x{draws}",
            ok=bound_failures == 0,
            detail=f"max lhs - rhs {worst_excess:.3e} (must be <= 0), {bound_failures} failures",
        ),
    )
    return SuiteResult("lemma", checks)


def suite_bounds(seed: int = DEFAULT_SEED) -> SuiteResult:
    """Information-flow bounds on the built-in dephasing scenarios."""
    checks = []
    for name in ("worked-example", "random-unitary", "single-semigroup"):
        scenario = PRESETS[name]
        spec = scenario.mixture_spec()
        grid = TimeGrid.uniform(0.0, 6.0, 5e-3).with_points(scenario.extra_grid_points)
        flow = info_flow(spec, scenario.pair, grid)
        excess = float(np.max(flow.i_ext - flow.corr_bound))
        checks.append(
            CheckResult(
                name=f"bounds/external-vs-correlations/{name}",
                ok=excess <= 1e-10 and float(np.min(flow.i_ext)) >= -1e-12,
                detail=f"max I_ext - bound {excess:.3e}, I_ext(0) {flow.i_ext[0]:.3e}",
            )
        )
    # the worked mixture saturates the bound whenever the two components'
    # rotations differ by a full half turn (t = 0, 2, 4, ...)
    scenario = PRESETS["worked-example"]
    spec = scenario.mixture_spec()
    grid = TimeGrid(np.array([0.0, 2.0, 4.0, 6.0]))
    flow = info_flow(spec, scenario.pair, grid)
    gap = float(np.max(np.abs(flow.corr_bound - flow.i_ext)))
    checks.append(
        CheckResult(
            name="bounds/tightness-at-half-turns/worked-example",
            ok=gap <= 1e-10,
            detail=f"max |bound - I_ext| at t in {{0,2,4,6}}: {gap:.3e}",
        )
    )
    return SuiteResult("bounds", tuple(checks))


def _random_microscopic_model(rng: np.random.Generator) -> MicroscopicModel:
    q1 = float(rng.uniform(0.0, 1.0))
    return MicroscopicModel(
        system_dim=2,
        env_dims=(2, 2),
        hamiltonians=(random_hermitian(rng, 4), random_hermitian(rng, 4)),
        env_states=(random_density(rng, 2), random_density(rng, 2)),
        weights=(q1, 1.0 - q1),
    )


def suite_microscopic(seed: int = DEFAULT_SEED, draws: int = 50) -> SuiteResult:
    """Four-party realization vs block dilation, plus propagator factorization."""
    rng = np.random.default_rng(seed)
    worst_joint = 0.0
    worst_marginal = 0.0
    worst_unitary = 0.0
    for _ in range(draws):
        model = _random_microscopic_model(rng)
        micro = microscopic_family(model)
        components = tuple(
            HamiltonianDilationFamily(h, env, model.system_dim)
            for h, env in zip(model.hamiltonians, model.env_states)
        )
        spec = MixtureSpec(weights=model.weights, components=components)
        dilated = dilate(spec)
        mixed = mix(spec)
        rho = random_density(rng, 2).matrix
        times = rng.uniform(0.0, 5.0, size=20)

        joint_micro = micro.propagate(rho, times)
        joint_dilated = dilated.propagate(rho, times)
        worst_joint = max(worst_joint, float(np.max(np.abs(joint_micro - joint_dilated))))

        blocks = joint_micro.reshape(times.size, 2, model.n, 2, model.n)
        system_marginal = np.einsum("tiaja->tij", blocks)
        mixed_out = mixed.propagate(rho, times)
        worst_marginal = max(worst_marginal, float(np.max(np.abs(system_marginal - mixed_out))))

        layout = model.layout()
        h_full = total_hamiltonian(model)
        t_check = float(rng.uniform(0.0, 5.0))
        u_full = unitary_exp(h_full, t_check)
        u_product = np.eye(layout.total_dim, dtype=complex)
        for i in range(model.n):
            proj = np.zeros((model.n, model.n), dtype=complex)
            proj[i, i] = 1.0
            term = embed_operator(
                np.kron(model.hamiltonians[i], proj), layout, (0, i + 1, layout.n_factors - 1)
            )
            u_product = u_product @ unitary_exp(term, t_check)
        worst_unitary = max(worst_unitary, float(np.max(np.abs(u_full - u_product))))

    checks = (
        CheckResult(
            name=f"microscopic/dilation-equivalence-x{draws}",
            ok=worst_joint <= 1e-10,
            detail=f"max entrywise deviation {worst_joint:.3e} (tol 1e-10)",
        ),
        CheckResult(
            name=f"microscopic/system-marginal-x{draws}",
            ok=worst_marginal <= 1e-10,
            detail=f"max deviation from the mixture {worst_marginal:.3e} (tol 1e-10)",
        ),
        CheckResult(
            name=f"microscopic/propagator-factorization-x{draws}",
            ok=worst_unitary <= 1e-10,
            detail=f"max deviation {worst_unitary:.3e} (tol 1e-10)",
        ),
    )
    return SuiteResult("microscopic", checks)


def suite_montecarlo(seed: int = DEFAULT_SEED) -> SuiteResult:
    """Discrimination oracle against the analytic optimum."""
    scenario = PRESETS["worked-example"]
    family = mix(scenario.mixture_spec())
    ensemble = HelstromEnsemble.equal(*scenario.pair)
    checks = []
    for trials in (10**3, 10**4, 10**5):
        result = monte_carlo_discriminate(ensemble, family, 1.0, trials, seed)
        bound = 4.0 * math.sqrt(result.analytic_pmax * (1.0 - result.analytic_pmax) / trials)
        err = abs(result.empirical_rate - result.analytic_pmax)
        checks.append(
            CheckResult(
                name=f"montecarlo/trials-{trials}",
                ok=err <= bound,
                detail=f"|empirical - optimal| {err:.3e} <= 4*sigma {bound:.3e}",
            )
        )
    for t in (0.5, 1.0, 2.0, 3.0):
        result = monte_carlo_discriminate(ensemble, family, t, 10**5, seed)
        bound = 4.0 * math.sqrt(result.analytic_pmax * (1.0 - result.analytic_pmax) / 10**5)
        err = abs(result.empirical_rate - result.analytic_pmax)
        checks.append(
            CheckResult(
                name=f"montecarlo/t-{t}",
                ok=err <= bound,
                detail=f"|empirical - optimal| {err:.3e} <= 4*sigma {bound:.3e}",
            )
        )
    return SuiteResult("montecarlo", tuple(checks))


_SUITES = {
    "cpt": suite_cpt,
    "additivity": suite_additivity,
    "subadditivity": suite_subadditivity,
    "lemma": suite_lemma,
    "bounds": suite_bounds,
    "microscopic": suite_microscopic,
    "montecarlo": suite_montecarlo,
}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    """Run one named suite, or all of them."""
    if name == "all":
        return [fn(seed) for fn in _SUITES.values()]
    if name not in _SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join((*SUITE_NAMES, 'all'))}")
    return [_SUITES[name](seed)]
