"""Built-in scenarios, compiled in so reproduction needs no config files.

Each preset pins a mixture with a known closed-form behavior; the
``describes`` string states the curves it reproduces and is echoed into the
JSON summary of every run.
"""

from __future__ import annotations

import math

import numpy as np

from .qmath import SIGMA_X, SIGMA_Z, QState
from .scenario import ComponentConfig, Scenario

_EQUATORIAL_PAIR = (QState.from_bloch([0.0, 1.0, 0.0]), QState.from_bloch([0.0, -1.0, 0.0]))


def _dephasing(gamma: float, lam: float) -> ComponentConfig:
    return ComponentConfig(kind="dephasing", gamma=gamma, lam=lam)


WORKED_EXAMPLE = Scenario(
    name="worked-example",
    weights=(0.5, 0.5),
    components=(_dephasing(1.0 / 3.0, math.pi / 2.0), _dephasing(1.0 / 3.0, 0.0)),
    p1=0.5,
    pair=_EQUATORIAL_PAIR,
    grid_start=0.0,
    grid_end=6.0,
    grid_step=1e-3,
    extra_grid_points=(2.0,),  # coherence zero: the distinguishability kink
    seed=20240,
    outputs=("csv",),
    describes=(
        "Equal mixture of two pure-dephasing semigroups (gamma=1/3, rotation "
        "frequencies pi/2 and 0) on the equatorial orthogonal pair; closed forms "
        "I_int(t)=exp(-t/3)|cos(pi t/4)|, I_tot(t)=exp(-t/3), "
        "corr_bound(t)=exp(-t/3)|sin(pi t/4)|; distinguishability revives after t=2."
    ),
)

RANDOM_UNITARY = Scenario(
    name="random-unitary",
    weights=(0.5, 0.5),
    components=(_dephasing(0.0, 2.0 * math.pi), _dephasing(0.0, 0.0)),
    p1=0.5,
    pair=_EQUATORIAL_PAIR,
    grid_start=0.0,
    grid_end=6.0,
    grid_step=1e-3,
    extra_grid_points=(),
    seed=20241,
    outputs=("csv",),
    describes=(
        "Equal mixture of two unitary rotations (zero damping, frequencies 2*pi "
        "and 0): a random unitary map with I_int(t)=|cos(pi t)|, constant total "
        "information, and strictly positive backflow measure."
    ),
)

SINGLE_SEMIGROUP = Scenario(
    name="single-semigroup",
    weights=(1.0,),
    components=(_dephasing(1.0 / 3.0, math.pi / 2.0),),
    p1=0.5,
    pair=_EQUATORIAL_PAIR,
    grid_start=0.0,
    grid_end=6.0,
    grid_step=1e-3,
    extra_grid_points=(),
    seed=20242,
    outputs=("csv",),
    describes=(
        "One pure-dephasing semigroup (gamma=1/3): monotone distinguishability "
        "exp(-t/3), zero backflow measure; the degenerate n=1 mixture."
    ),
)

_H_COUPLING_1 = 0.8 * np.kron(SIGMA_X, SIGMA_X)
_H_COUPLING_2 = 1.1 * np.kron(SIGMA_Z, SIGMA_X)

MICROSCOPIC_DEMO = Scenario(
    name="microscopic-demo",
    weights=(0.5, 0.5),
    components=(
        ComponentConfig(kind="microscopic", hamiltonian=_H_COUPLING_1, env_dim=2),
        ComponentConfig(kind="microscopic", hamiltonian=_H_COUPLING_2, env_dim=2),
    ),
    p1=0.5,
    pair=_EQUATORIAL_PAIR,
    grid_start=0.0,
    grid_end=6.0,
    grid_step=2e-3,
    extra_grid_points=(),
    seed=20243,
    outputs=("csv",),
    describes=(
        "Two system-environment couplings (qubit environments in the ground "
        "state) mixed with equal weights: exercises the unitary-dilation "
        "representation; the block dilation equals the closed four-party model."
    ),
)

PRESETS: dict[str, Scenario] = {
    s.name: s
    for s in (WORKED_EXAMPLE, RANDOM_UNITARY, SINGLE_SEMIGROUP, MICROSCOPIC_DEMO)
}


def get_preset(name: str) -> Scenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None


def list_presets() -> list[tuple[str, str]]:
    return [(name, PRESETS[name].describes) for name in sorted(PRESETS)]
