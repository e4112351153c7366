"""Experiment harness: single runs, paired sweeps, and the enumeration oracle.

Sweeps always run both methods per point with shared seeds so the
comparison is paired; the twin-count sweep stays nested because placement
draws are consumed per point. The oracle scores every possible cell
assignment with the exact same mass/association/objective pipeline the
solvers use, giving an independent global optimum for small instances.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .baseline import snr_solve
from .errors import ConfigError, SearchSpaceTooLarge
from .scenario import apply_overrides, build_scenario, density_sigma, normalize_config
from .solver import (
    PartitionState,
    Scenario,
    SolveReport,
    associate_and_budget,
    evaluate_objective,
    region_times,
    solve,
    update_masses,
)

log = logging.getLogger(__name__)

ORACLE_LIMIT = 5**8


@dataclass(frozen=True)
class MetricsRecord:
    """One solved scenario, flattened for export."""

    method: str
    dt_count: int
    sigma: float
    avg_sub_sync_time: float
    iterations: int
    violation_mass: float
    masses: tuple[float, ...]
    region_times: tuple[float, ...]
    render_cycles: tuple[float, ...]
    dt_counts: tuple[int, ...]
    regional_dt_density: float
    infeasible_count: int


def run_scenario(cfg: dict) -> MetricsRecord:
    """Build the scenario, dispatch on cfg['method'], and flatten."""
    cfg = normalize_config(cfg)
    scenario = build_scenario(cfg)
    state, report = _dispatch(scenario, cfg["method"])
    return make_record(cfg["method"], scenario, state, report, density_sigma(cfg))


def _dispatch(scenario: Scenario, method: str):
    if method == "ot":
        return solve(scenario)
    if method == "snr":
        return snr_solve(scenario)
    raise ConfigError(f"unknown method {method!r}")


def make_record(method, scenario, state, report, sigma) -> MetricsRecord:
    times = region_times(state.assignment, state.masses, state.render_cycles, scenario)
    counts = _dt_counts(state, scenario.n_servers)
    return MetricsRecord(
        method=method,
        dt_count=len(scenario.dts),
        sigma=sigma,
        avg_sub_sync_time=float(times.mean()),
        iterations=report.iterations,
        violation_mass=report.fixed_point_violation_mass,
        masses=tuple(float(a) for a in state.masses),
        region_times=tuple(float(t) for t in times),
        render_cycles=tuple(float(p) for p in state.render_cycles),
        dt_counts=counts,
        regional_dt_density=regional_dt_density(state, scenario),
        infeasible_count=len(report.infeasible_dts),
    )


def _dt_counts(state: PartitionState, n_servers: int) -> tuple[int, ...]:
    if state.dt_assignment.size == 0:
        return tuple(0 for _ in range(n_servers))
    served = state.dt_assignment[state.dt_assignment >= 0]
    return tuple(int(c) for c in np.bincount(served, minlength=n_servers))


def regional_dt_density(state: PartitionState, scenario: Scenario) -> float:
    """Mean over servers of served twins per km^2 of owned region.

    Servers owning no cells are skipped; with no twins the density is 0.
    """
    counts = np.asarray(_dt_counts(state, scenario.n_servers), dtype=float)
    cells = np.bincount(state.assignment, minlength=scenario.n_servers)
    areas_km2 = cells * scenario.grid.cell_volume / 1e6
    owned = areas_km2 > 0
    if not owned.any():
        return 0.0
    return float(np.mean(counts[owned] / areas_km2[owned]))


def sweep_dts(cfg: dict, dt_counts) -> list[MetricsRecord]:
    """One record per twin count per method, shared seeds throughout."""
    if not list(dt_counts):
        raise ConfigError("twin-count sweep needs at least one value")
    records = []
    for k in dt_counts:
        point = apply_overrides(cfg, [f"dts.count={int(k)}"])
        for method in ("ot", "snr"):
            records.append(run_scenario({**point, "method": method}))
    return records


def sweep_sigma(cfg: dict, sigmas) -> list[MetricsRecord]:
    """One record per sensing-hotspot spread per method, shared seeds."""
    if not list(sigmas):
        raise ConfigError("sigma sweep needs at least one value")
    cfg = normalize_config(cfg)
    dist = cfg["sensing"]["distribution"]
    if dist.get("kind") != "truncated-gaussian":
        raise ConfigError("sigma sweep requires a truncated-gaussian sensing distribution")
    ndim = len(cfg["zone"]["extent_m"])
    records = []
    for sigma in sigmas:
        std = [float(sigma)] * ndim
        point = apply_overrides(cfg, [f"sensing.distribution.std_m={std}"])
        for method in ("ot", "snr"):
            records.append(run_scenario({**point, "method": method}))
    return records


def brute_force_oracle(cfg_or_scenario, limit: int = ORACLE_LIMIT):
    """Global optimum by exhaustive enumeration of cell assignments.

    Every candidate is scored through the same update_masses /
    associate_and_budget / evaluate_objective pipeline as the solvers.
    Only viable for tiny grids; anything past ``limit`` assignments raises.
    """
    scenario = (
        cfg_or_scenario
        if isinstance(cfg_or_scenario, Scenario)
        else build_scenario(cfg_or_scenario)
    )
    n_cells = scenario.grid.n_cells
    n_servers = scenario.n_servers
    total = n_servers**n_cells
    if total > limit:
        raise SearchSpaceTooLarge(
            f"{n_servers}^{n_cells} = {total} assignments exceeds the cap of {limit}"
        )
    best_objective = np.inf
    best_assignment = None
    opts = scenario.options
    for combo in itertools.product(range(n_servers), repeat=n_cells):
        assignment = np.asarray(combo, dtype=int)
        masses = update_masses(
            scenario.grid, assignment, scenario.sensing, n_servers, opts.alpha_floor
        )
        twin_cycles, render, dt_assignment, _ = associate_and_budget(
            assignment, scenario.grid, scenario.dts, scenario.servers,
            scenario.radio, scenario.channel, opts,
        )
        state = PartitionState(assignment, masses, render, twin_cycles, dt_assignment, 0, np.nan)
        objective = evaluate_objective(state, scenario)
        if objective < best_objective:
            best_objective = objective
            best_assignment = assignment
    return best_assignment, float(best_objective)


# --- CSV export --------------------------------------------------------------

def csv_header(n_servers: int) -> list[str]:
    cols = ["method", "K", "sigma_m", "avg_sub_sync_s", "iterations", "violation_mass"]
    for b in range(n_servers):
        cols += [f"alpha_{b}", f"T_b_s_{b}", f"psi_b_hz_{b}", f"dt_count_{b}"]
    cols.append("regional_dt_density")
    return cols


def record_row(record: MetricsRecord) -> list:
    row = [
        record.method,
        record.dt_count,
        record.sigma,
        record.avg_sub_sync_time,
        record.iterations,
        record.violation_mass,
    ]
    for b in range(len(record.masses)):
        row += [
            record.masses[b],
            record.region_times[b],
            record.render_cycles[b],
            record.dt_counts[b],
        ]
    row.append(record.regional_dt_density)
    return row


def write_records(records, out) -> None:
    """CSV with a fixed, documented column order; ``out`` is a writable
    text stream."""
    records = list(records)
    if not records:
        return
    writer = csv.writer(out)
    writer.writerow(csv_header(len(records[0].masses)))
    for record in records:
        writer.writerow(record_row(record))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


def dump_partition(cfg: dict, method: str | None = None):
    """Cell-by-cell partition rows: coordinates, owner, sensor density."""
    cfg = normalize_config(cfg)
    scenario = build_scenario(cfg)
    state, _ = _dispatch(scenario, method or cfg["method"])
    header = [f"cell_{axis}" for axis in "xyz"[: scenario.grid.ndim]]
    header += ["server_id", "g_value"]
    rows = [header]
    for i in range(scenario.grid.n_cells):
        rows.append(
            [*(float(c) for c in scenario.grid.centers[i]),
             int(state.assignment[i]),
             float(scenario.sensing.values[i])]
        )
    return rows


def log_oracle_gap(seed, ot_objective, oracle_objective, ratio_cap=1.10) -> bool:
    """True when the solver is within the cap of the oracle optimum; logs
    any miss with both objectives."""
    ok = ot_objective <= ratio_cap * oracle_objective
    if not ok:
        log.warning(
            "seed %s: solver objective %.6g exceeds %.2f x oracle optimum %.6g",
            seed, ot_objective, ratio_cap, oracle_objective,
        )
    return ok
