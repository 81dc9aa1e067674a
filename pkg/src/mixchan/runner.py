"""Scenario execution: series computation, verdicts, CSV and JSON emission.

The CSV carries the sampled series (t, D_mix, sigma, I_int, I_ext, I_tot,
corr_bound) with 12 significant digits; the JSON summary carries measure
values, inequality verdicts, a config echo, and the version string. Both
are byte-deterministic for a fixed scenario and seed.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._version import __version__
from .channels import dilate, mix, verify_cpt
from .infoflow import info_flow
from .nonmarkov import (
    SearchConfig,
    TimeGrid,
    derivative_series,
    distinguishability_series,
    nm_measure,
    nm_measure_optimized,
)
from .qmath import SIGMA_X, SIGMA_Y, SIGMA_Z, trace_norm_stack
from .scenario import Scenario

CSV_COLUMNS = ("t", "D_mix", "sigma", "I_int", "I_ext", "I_tot", "corr_bound")

ADDITIVITY_TOL = 1e-10
MARGINAL_TOL = 1e-12
BLOCK_TOL = 1e-14
EXT_BOUND_TOL = 1e-10
EXT_NONNEG_TOL = 1e-12
SUBADDITIVITY_TOL = 1e-6
CHOI_EIG_TOL = 1e-9
CHOI_TP_TOL = 1e-10


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    summary: dict
    csv_path: Path | None
    json_path: Path
    ok: bool


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _git_describe() -> str | None:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).parent,
        )
    except (OSError, subprocess.TimeoutExpired):
        return None
    return out.stdout.strip() or None if out.returncode == 0 else None


def _bloch(matrix: np.ndarray) -> list[float]:
    return [float(np.real(np.trace(matrix @ s))) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]


def _sampled_indices(n: int, count: int = 20) -> np.ndarray:
    return np.unique(np.linspace(0, n - 1, min(count, n)).astype(int))


def compute_summary(scenario: Scenario) -> tuple[dict, dict[str, np.ndarray]]:
    """Evaluate all series and verdicts for a scenario.

    Returns the JSON-ready summary and the raw series for CSV emission.
    """
    spec = scenario.mixture_spec()
    ensemble = scenario.ensemble()
    grid = scenario.grid()
    ts = grid.points
    mixed = mix(spec)
    dilated = dilate(spec)

    # D_mix honors the preparation probabilities; the information columns
    # keep the equiprobable definitions and coincide with D_mix at p1 = 1/2
    d_mix = distinguishability_series(mixed, ensemble, grid)
    sigma = derivative_series(d_mix, grid)
    flow = info_flow(spec, (ensemble.rho1, ensemble.rho2), grid)

    series = {
        "t": ts,
        "D_mix": d_mix,
        "sigma": sigma,
        "I_int": flow.i_int,
        "I_ext": flow.i_ext,
        "I_tot": flow.i_tot,
        "corr_bound": flow.corr_bound,
    }

    verdicts: dict[str, dict] = {}

    # weighted trace-norm additivity of the dilation, on the pair difference
    x = ensemble.rho1.matrix - ensemble.rho2.matrix
    total = np.asarray(trace_norm_stack(dilated.propagate(x, ts)), dtype=float)
    weighted = np.zeros_like(total)
    for q, comp in zip(spec.weights, spec.components):
        weighted += q * np.asarray(trace_norm_stack(comp.propagate(x, ts)), dtype=float)
    additivity_residual = float(np.max(np.abs(total - weighted)))
    verdicts["trace_norm_additivity"] = {
        "ok": additivity_residual <= ADDITIVITY_TOL,
        "max_residual": additivity_residual,
        "tolerance": ADDITIVITY_TOL,
    }

    # constant ancilla marginal and ancilla-block orthogonality, spot checked
    sample = _sampled_indices(grid.n)
    ancilla = spec.ancilla_state()
    n_comp = spec.n
    d_sys = spec.system_dim
    marginal_dev = 0.0
    block_dev = 0.0
    for rho in (ensemble.rho1, ensemble.rho2):
        joint = dilated.propagate(rho.matrix, ts[sample])
        blocks = joint.reshape(len(sample), d_sys, n_comp, d_sys, n_comp)
        marginal = np.einsum("taiaj->tij", blocks)
        marginal_dev = max(marginal_dev, float(np.max(np.abs(marginal - ancilla))))
        off = blocks.copy()
        for i in range(n_comp):
            off[:, :, i, :, i] = 0.0
        block_dev = max(block_dev, float(np.max(np.abs(off))))
    verdicts["ancilla_marginal_constant"] = {
        "ok": marginal_dev <= MARGINAL_TOL,
        "max_deviation": marginal_dev,
        "tolerance": MARGINAL_TOL,
    }
    verdicts["ancilla_block_orthogonality"] = {
        "ok": block_dev <= BLOCK_TOL,
        "max_off_block": block_dev,
        "tolerance": BLOCK_TOL,
    }

    ext_excess = float(np.max(flow.i_ext - flow.corr_bound))
    verdicts["external_information_bound"] = {
        "ok": ext_excess <= EXT_BOUND_TOL,
        "max_excess": ext_excess,
        "tolerance": EXT_BOUND_TOL,
    }
    ext_min = float(np.min(flow.i_ext))
    verdicts["external_information_nonnegative"] = {
        "ok": ext_min >= -EXT_NONNEG_TOL and flow.i_ext[0] <= EXT_NONNEG_TOL,
        "min_value": ext_min,
        "initial_value": float(flow.i_ext[0]),
        "tolerance": EXT_NONNEG_TOL,
    }

    # measure of the mixture: fixed preparations and optimized
    fixed = nm_measure(mixed, ensemble, grid)
    search = SearchConfig(seed=scenario.seed, validate_unrestricted=False)
    optimized = nm_measure_optimized(mixed, grid, search)
    opt_components = tuple(
        nm_measure_optimized(comp, grid, search).value for comp in spec.components
    )
    dilated_opt = nm_measure_optimized(dilated, grid, search).value
    weighted_sum = float(sum(q * v for q, v in zip(spec.weights, opt_components)))
    verdicts["measure_subadditivity"] = {
        "ok": dilated_opt <= weighted_sum + SUBADDITIVITY_TOL,
        "dilated_value": dilated_opt,
        "weighted_component_sum": weighted_sum,
        "tolerance": SUBADDITIVITY_TOL,
    }

    choi_times = ts[_sampled_indices(grid.n)]
    cpt_mixed = verify_cpt(mixed, choi_times, tp_tol=CHOI_TP_TOL, cp_tol=CHOI_EIG_TOL)
    cpt_dilated = verify_cpt(dilated, choi_times, tp_tol=CHOI_TP_TOL, cp_tol=CHOI_EIG_TOL)
    verdicts["cpt_sampled"] = {
        "ok": cpt_mixed.ok and cpt_dilated.ok,
        "min_choi_eigenvalue": min(cpt_mixed.min_choi_eigenvalue, cpt_dilated.min_choi_eigenvalue),
        "max_trace_residual": max(cpt_mixed.max_trace_residual, cpt_dilated.max_trace_residual),
        "eigenvalue_tolerance": CHOI_EIG_TOL,
        "trace_tolerance": CHOI_TP_TOL,
    }

    gammas = [c.gamma for c in scenario.components if c.kind == "dephasing"]
    envelope = (
        float(np.exp(-min(gammas) * grid.t_end))
        if gammas and len(gammas) == len(scenario.components)
        else None
    )

    summary = {
        "name": scenario.name,
        "describes": scenario.describes,
        "version": __version__,
        "git_describe": _git_describe(),
        "config": scenario.to_config_dict(),
        "grid": {
            "start": grid.t_start,
            "end": grid.t_end,
            "step": scenario.grid_step,
            "points": grid.n,
        },
        "measure": {
            "fixed_pair_value": fixed.value,
            "optimized_value": optimized.value,
            "optimized_pair_bloch": [
                _bloch(optimized.optimal_pair[0].matrix),
                _bloch(optimized.optimal_pair[1].matrix),
            ],
            "search_mode": optimized.search_mode,
            "positive_intervals": [list(iv) for iv in optimized.positive_intervals],
            "horizon": grid.t_end,
            "truncation_envelope": envelope,
        },
        "verdicts": verdicts,
    }
    return summary, series


def write_csv(path: Path, series: dict[str, np.ndarray]) -> None:
    lines = [",".join(CSV_COLUMNS)]
    columns = [series[c] for c in CSV_COLUMNS]
    for row in zip(*columns):
        lines.append(",".join(_fmt(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", newline="")


def run_scenario(
    scenario: Scenario,
    out_dir: Path | str = ".",
    output_format: str | None = None,
) -> RunResult:
    """Execute a scenario and write its artifacts.

    ``output_format`` overrides the scenario's outputs: "csv" or "both"
    force the time-series CSV, "json" suppresses it. The JSON summary is
    always written.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary, series = compute_summary(scenario)

    if output_format is None:
        want_csv = "csv" in scenario.outputs
    elif output_format in ("csv", "both"):
        want_csv = True
    elif output_format == "json":
        want_csv = False
    else:
        raise ValueError(f"unknown output format {output_format!r}")

    csv_path = None
    if want_csv:
        csv_path = out_dir / f"{scenario.name}.csv"
        write_csv(csv_path, series)
    summary["outputs"] = {"csv": str(csv_path) if csv_path else None}

    ok = all(v["ok"] for v in summary["verdicts"].values())
    summary["ok"] = ok
    json_path = out_dir / f"{scenario.name}.json"
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return RunResult(
        scenario=scenario, summary=summary, csv_path=csv_path, json_path=json_path, ok=ok
    )
