"""Scenario configuration: parsing, validation, and channel construction.

A scenario is a single YAML (or JSON, which YAML subsumes) document:

    scenario: {name: my-run}
    mixture:
      weights: [0.5, 0.5]
      components:
        - {kind: dephasing, gamma: 0.333, lambda: 1.571}
        - {kind: dephasing, gamma: 0.333, lambda: 0.0}
    ensemble:
      p1: 0.5
      pair: [{bloch: [0, 1, 0]}, {bloch: [0, -1, 0]}]
    grid: {start: 0.0, end: 6.0, step: 0.001}
    seed: 20240
    outputs: [csv]

Component kinds: ``dephasing`` (gamma, lambda), ``unitary`` (hamiltonian),
``microscopic`` (hamiltonian on system x environment plus env_dim; the
environment starts in the ground state). Complex matrices are nested
row-major lists of [re, im] pairs. Preparations are Bloch vectors or
explicit matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .channels import (
    ChannelFamily,
    DephasingSemigroup,
    HamiltonianDilationFamily,
    MixtureSpec,
    UnitaryFamily,
)
from .distinguish import HelstromEnsemble
from .nonmarkov import TimeGrid
from .qmath import InvalidStateError, QState

KNOWN_OUTPUTS = ("csv", "json")


class ConfigError(ValueError):
    """A scenario config failed to parse or validate."""


def complex_matrix_from_pairs(data, where: str) -> np.ndarray:
    """Parse a row-major nested list of [re, im] pairs into a complex matrix."""
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected nested [re, im] lists ({exc})") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(
            f"{where}: expected a square matrix of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1.0j * arr[..., 1]


def complex_matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(np.real(v)), float(np.imag(v))] for v in row] for row in np.asarray(m)]


@dataclass(frozen=True)
class ComponentConfig:
    """One mixture component as it appears in a config file."""

    kind: str
    gamma: float | None = None
    lam: float | None = None
    hamiltonian: np.ndarray | None = None
    env_dim: int | None = None

    def build(self) -> ChannelFamily:
        if self.kind == "dephasing":
            return DephasingSemigroup(self.gamma or 0.0, self.lam or 0.0)
        if self.kind == "unitary":
            return UnitaryFamily(self.hamiltonian)
        if self.kind == "microscopic":
            env_dim = int(self.env_dim or 0)
            system_dim = self.hamiltonian.shape[0] // env_dim
            ground = np.zeros((env_dim, env_dim), dtype=complex)
            ground[0, 0] = 1.0
            return HamiltonianDilationFamily(self.hamiltonian, QState(ground), system_dim)
        raise ConfigError(f"unknown component kind {self.kind!r}")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.gamma is not None:
            out["gamma"] = self.gamma
        if self.lam is not None:
            out["lambda"] = self.lam
        if self.hamiltonian is not None:
            out["hamiltonian"] = complex_matrix_to_pairs(self.hamiltonian)
        if self.env_dim is not None:
            out["env_dim"] = self.env_dim
        return out


@dataclass(frozen=True)
class Scenario:
    """A fully validated run description."""

    name: str
    weights: tuple[float, ...]
    components: tuple[ComponentConfig, ...]
    p1: float
    pair: tuple[QState, QState]
    grid_start: float
    grid_end: float
    grid_step: float
    seed: int
    outputs: tuple[str, ...] = ("csv",)
    extra_grid_points: tuple[float, ...] = ()
    describes: str = ""

    def mixture_spec(self) -> MixtureSpec:
        return MixtureSpec(
            weights=self.weights,
            components=tuple(c.build() for c in self.components),
        )

    def ensemble(self) -> HelstromEnsemble:
        return HelstromEnsemble(self.p1, 1.0 - self.p1, self.pair[0], self.pair[1])

    def grid(self) -> TimeGrid:
        grid = TimeGrid.uniform(self.grid_start, self.grid_end, self.grid_step)
        extras = [t for t in self.extra_grid_points if self.grid_start <= t <= self.grid_end]
        return grid.with_points(extras) if extras else grid

    def to_config_dict(self) -> dict:
        return {
            "scenario": {"name": self.name},
            "mixture": {
                "weights": list(self.weights),
                "components": [c.to_dict() for c in self.components],
            },
            "ensemble": {
                "p1": self.p1,
                "pair": [{"matrix": complex_matrix_to_pairs(s.matrix)} for s in self.pair],
            },
            "grid": {
                "start": self.grid_start,
                "end": self.grid_end,
                "step": self.grid_step,
                **({"extra_points": list(self.extra_grid_points)} if self.extra_grid_points else {}),
            },
            "seed": self.seed,
            "outputs": list(self.outputs),
        }


def _require(mapping: dict, key: str, where: str):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return mapping[key]


def _as_float(value, where: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected a number, got {value!r}") from exc


def _parse_component(data, where: str) -> ComponentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: component must be a mapping, got {type(data).__name__}")
    kind = str(_require(data, "kind", where))
    gamma = _as_float(data["gamma"], f"{where}.gamma") if "gamma" in data else None
    lam = _as_float(data["lambda"], f"{where}.lambda") if "lambda" in data else None
    hamiltonian = (
        complex_matrix_from_pairs(data["hamiltonian"], f"{where}.hamiltonian")
        if "hamiltonian" in data
        else None
    )
    env_dim = int(data["env_dim"]) if "env_dim" in data else None

    if kind == "dephasing":
        if gamma is None:
            raise ConfigError(f"{where}: dephasing component needs 'gamma'")
    elif kind == "unitary":
        if hamiltonian is None:
            raise ConfigError(f"{where}: unitary component needs 'hamiltonian'")
    elif kind == "microscopic":
        if hamiltonian is None or env_dim is None:
            raise ConfigError(f"{where}: microscopic component needs 'hamiltonian' and 'env_dim'")
        if env_dim < 1 or hamiltonian.shape[0] % env_dim:
            raise ConfigError(
                f"{where}: env_dim {env_dim} does not divide the Hamiltonian dimension "
                f"{hamiltonian.shape[0]}"
            )
    else:
        raise ConfigError(f"{where}: unknown component kind {kind!r}")
    return ComponentConfig(
        kind=kind, gamma=gamma, lam=lam, hamiltonian=hamiltonian, env_dim=env_dim
    )


def _parse_state(data, where: str) -> QState:
    if not isinstance(data, dict) or len(data) != 1:
        raise ConfigError(f"{where}: expected a single-key mapping 'bloch' or 'matrix'")
    try:
        if "bloch" in data:
            return QState.from_bloch(data["bloch"])
        if "matrix" in data:
            return QState(complex_matrix_from_pairs(data["matrix"], where))
    except InvalidStateError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: expected key 'bloch' or 'matrix', got {sorted(data)}")


def scenario_from_dict(data: dict) -> Scenario:
    """Validate a parsed config mapping into a Scenario."""
    if not isinstance(data, dict):
        raise ConfigError(f"top level: expected a mapping, got {type(data).__name__}")
    name = str(_require(_require(data, "scenario", "top level"), "name", "scenario"))

    mixture = _require(data, "mixture", "top level")
    weights = _require(mixture, "weights", "mixture")
    if not isinstance(weights, (list, tuple)) or not weights:
        raise ConfigError("mixture.weights: expected a non-empty list")
    weights = tuple(_as_float(w, "mixture.weights") for w in weights)
    raw_components = _require(mixture, "components", "mixture")
    if not isinstance(raw_components, (list, tuple)) or not raw_components:
        raise ConfigError("mixture.components: expected a non-empty list")
    components = tuple(
        _parse_component(c, f"mixture.components[{i}]") for i, c in enumerate(raw_components)
    )
    if len(weights) != len(components):
        raise ConfigError(
            f"mixture: {len(weights)} weights for {len(components)} components"
        )

    ens = _require(data, "ensemble", "top level")
    p1 = _as_float(ens.get("p1", 0.5), "ensemble.p1")
    if not 0.0 <= p1 <= 1.0:
        raise ConfigError(f"ensemble.p1: must lie in [0, 1], got {p1}")
    raw_pair = _require(ens, "pair", "ensemble")
    if not isinstance(raw_pair, (list, tuple)) or len(raw_pair) != 2:
        raise ConfigError("ensemble.pair: expected exactly 2 state specifications")
    pair = tuple(_parse_state(s, f"ensemble.pair[{i}]") for i, s in enumerate(raw_pair))

    grid = _require(data, "grid", "top level")
    start = _as_float(_require(grid, "start", "grid"), "grid.start")
    end = _as_float(_require(grid, "end", "grid"), "grid.end")
    step = _as_float(_require(grid, "step", "grid"), "grid.step")
    if start < 0 or end <= start or step <= 0:
        raise ConfigError(f"grid: need 0 <= start < end and step > 0, got {start}, {end}, {step}")
    extra = tuple(
        _as_float(t, "grid.extra_points") for t in grid.get("extra_points", [])
    )

    seed = int(data.get("seed", 0))
    outputs = data.get("outputs", ["csv"])
    if outputs is None:
        outputs = []
    if not isinstance(outputs, (list, tuple)):
        raise ConfigError(f"outputs: expected a list, got {type(outputs).__name__}")
    outputs = tuple(str(o) for o in outputs)
    unknown = [o for o in outputs if o not in KNOWN_OUTPUTS]
    if unknown:
        raise ConfigError(f"outputs: unknown artifact(s) {unknown}, known: {list(KNOWN_OUTPUTS)}")

    scenario = Scenario(
        name=name,
        weights=weights,
        components=components,
        p1=p1,
        pair=pair,
        grid_start=start,
        grid_end=end,
        grid_step=step,
        seed=seed,
        outputs=outputs,
        extra_grid_points=extra,
    )
    try:
        scenario.mixture_spec()
        scenario.ensemble()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"config does not build: {exc}") from exc
    return scenario


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario config file."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ConfigError(
                f"{path}: line {mark.line + 1}, column {mark.column + 1}: {exc}"
            ) from exc
        raise ConfigError(f"{path}: {exc}") from exc
    if data is None:
        raise ConfigError(f"{path}: empty config")
    return scenario_from_dict(data)
