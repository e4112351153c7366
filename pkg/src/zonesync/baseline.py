"""Best-channel association baseline.

Cells and twins go to the base station with the strongest channel,
ignoring load, sensor mass, and compute budgets. Association is ranked by
received power over the noise density (bandwidth-free), so with a common
path-loss model it reduces to the nearest-server diagram; heterogeneous
reference gains shift the boundaries toward the weaker station. The
resulting allocation is scored with exactly the same machinery as the
fixed-point solver so the two methods are comparable.
"""

from __future__ import annotations

import numpy as np

from .channel import path_gain
from .solver import (
    PartitionState,
    Scenario,
    SolveReport,
    associate_and_budget,
    evaluate_objective,
    update_masses,
    verify_fixed_point,
)


def snr_assign(grid, servers, radio, model) -> np.ndarray:
    """Per-cell index of the server with the best channel (ties to the
    lowest id). Independent of masses, compute, and the twin fleet."""
    gains = np.stack(
        [path_gain(grid.centers, s.position, model) for s in servers], axis=1
    )
    snr_per_hz = gains * radio.sensor_tx_power / radio.noise_spectral_density
    return np.argmax(snr_per_hz, axis=1)


def snr_solve(scenario: Scenario):
    """Single-pass baseline: best-channel partition, twin association,
    compute split, and the shared objective. No iteration."""
    assignment = snr_assign(
        scenario.grid, scenario.servers, scenario.radio, scenario.channel
    )
    masses = update_masses(
        scenario.grid,
        assignment,
        scenario.sensing,
        scenario.n_servers,
        scenario.options.alpha_floor,
    )
    twin_cycles, render, dt_assignment, infeasible = associate_and_budget(
        assignment,
        scenario.grid,
        scenario.dts,
        scenario.servers,
        scenario.radio,
        scenario.channel,
        scenario.options,
    )
    state = PartitionState(
        assignment, masses, render, twin_cycles, dt_assignment, 0, np.nan
    )
    objective = evaluate_objective(state, scenario)
    state = PartitionState(
        assignment, masses, render, twin_cycles, dt_assignment, 0, objective
    )
    violation = verify_fixed_point(state, scenario)
    report = SolveReport(True, 0, [objective], violation, infeasible)
    return state, report
