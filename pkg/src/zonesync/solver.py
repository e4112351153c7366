"""Mass-weighted fixed-point partitioner with twin compute allocation.

The zone is split across servers by transporting the sensor density onto
them: each cell goes to the server minimizing region_mass * unit_cost,
and the region masses that define those weights are recomputed from the
partition itself. Iterating that map interleaved with twin association
(twins join the server owning their cell, each allocated exactly the
cycles that make its deadline tight, the remainder rendering the region)
drives the average region sync time down until the partition stops
moving.

Weighting costs by the region's own mass is what balances load: a heavy
region inflates its server's weights, shedding boundary cells to lighter
neighbors, so the converged partition equalizes mass-weighted costs along
boundaries instead of carving the zone by distance alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelModel, RadioParams, dt_rate
from .errors import ComputeExhausted, InfeasibleDeadline, NoRenderBudget
from .geometry import DensityField, ZoneGrid
from .sync import (
    MetaverseParams,
    region_sync_time,
    render_cost_matrix,
    upload_cost_matrix,
)

UNSERVED = -1


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the fixed-point loop and its feasibility policies.

    damping blends the previous mass vector into the update (1.0 = pure
    replacement, which limit-cycles on almost any multi-server scenario
    because the weighted map overreacts to mass swings; 0.5 is a robust
    default). alpha_floor keeps every region weight positive so no server
    degenerates to zero weight and swallows the zone next pass.
    infeasible_policy/exhausted_policy choose between reporting twins that
    cannot be served ("report"/"drop") and aborting ("strict").

    The loop exits on any of: an exact fixed point (partition unchanged
    and masses drifted less than settle_eps); a revisited partition at
    mass drift below cycle_eps, which is the few-cell boundary flicker a
    discrete grid sustains forever when a region boundary runs along a
    grid line; or relative objective change below tol for steady_window
    consecutive iterations.
    """

    tol: float = 1e-6
    max_iter: int = 500
    damping: float = 0.5
    alpha_floor: float = 1e-6
    infeasible_policy: str = "report"
    exhausted_policy: str = "drop"
    settle_eps: float = 1e-13
    steady_window: int = 3
    cycle_eps: float = 1e-2

    def __post_init__(self):
        if not 0 < self.damping <= 1:
            raise ValueError("damping must be in (0, 1]")
        if self.infeasible_policy not in ("report", "strict"):
            raise ValueError(f"unknown infeasible policy {self.infeasible_policy!r}")
        if self.exhausted_policy not in ("drop", "strict"):
            raise ValueError(f"unknown exhausted policy {self.exhausted_policy!r}")


@dataclass(frozen=True)
class PartitionState:
    """One full allocation: cell ownership, region masses, compute split.

    twin_cycles[k] is the compute dedicated to twin k on its server
    (0 when unserved); render_cycles[b] is what remains for rendering,
    so render_cycles[b] + sum of its twins' cycles equals the budget.
    """

    assignment: np.ndarray = field(repr=False)
    masses: np.ndarray
    render_cycles: np.ndarray
    twin_cycles: np.ndarray = field(repr=False)
    dt_assignment: np.ndarray = field(repr=False)
    iteration: int
    objective: float


@dataclass(frozen=True)
class SolveReport:
    converged: bool
    iterations: int
    objective_history: list[float]
    fixed_point_violation_mass: float
    infeasible_dts: list[int]


@dataclass(frozen=True)
class Scenario:
    """Everything a solve needs, units already normalized (m, W, Hz, s)."""

    grid: ZoneGrid
    sensing: DensityField
    servers: list
    dts: list
    radio: RadioParams
    channel: ChannelModel
    metaverse: MetaverseParams
    options: SolverOptions = SolverOptions()
    pt_field: DensityField | None = None
    seed: int = 0

    @property
    def n_servers(self) -> int:
        return len(self.servers)

    def budgets(self) -> np.ndarray:
        return np.array([s.compute_budget for s in self.servers])

    def with_options(self, options: SolverOptions) -> "Scenario":
        return replace(self, options=options)


def assign_cells(grid, servers, masses, render_cycles, radio, model, params):
    """Send every cell to the server with least mass * unit_cost; ties go
    to the lowest server id."""
    masses = np.asarray(masses, dtype=float)
    if np.any(masses <= 0):
        raise ValueError("region masses must be positive to weight the map")
    costs = upload_cost_matrix(grid, servers, radio, model, params)
    costs = costs + render_cost_matrix(grid, render_cycles, params)
    return np.argmin(costs * masses[None, :], axis=1)


def update_masses(grid, assignment, g: DensityField, n_servers, alpha_floor=1e-6):
    """Integrate the sensor density over each region, then clamp every
    mass to the floor and renormalize to the unit simplex."""
    raw = np.bincount(assignment, weights=g.values, minlength=n_servers)
    raw = raw * grid.cell_volume
    if alpha_floor <= 0:
        return raw
    clipped = np.maximum(raw, alpha_floor)
    return clipped / clipped.sum()


def allocate_dt_compute(dt, server, radio, model) -> float:
    """Cycles/s making the twin's deadline exactly tight.

    Solves upload + execute = 1/intensity for the compute term; feasible
    only when the uplink alone beats the deadline (rate > intensity *
    data_size).
    """
    rate = dt_rate(dt.position, server, dt, radio, model)
    deadline_rate = dt.sync_intensity * dt.data_size
    slack = 1.0 / deadline_rate - 1.0 / rate if rate > 0 else -np.inf
    if slack <= 0:
        raise InfeasibleDeadline(dt.id, server.id, rate, deadline_rate)
    return dt.twin_complexity / slack


def associate_and_budget(assignment, grid, dts, servers, radio, model, options=SolverOptions()):
    """Attach every twin to the server owning its cell and split compute.

    Twins whose deadline cannot be met, or that must be shed to keep the
    server's render share positive (largest allocations first), are marked
    unserved and returned in the infeasible list; "strict" policies raise
    instead. Render cycles are budget minus the served twins' cycles, so
    the compute budget holds with equality on every server.
    """
    n = len(dts)
    twin_cycles = np.zeros(n)
    dt_assignment = np.full(n, UNSERVED, dtype=int)
    infeasible: list[int] = []
    if n:
        positions = np.stack([dt.position for dt in dts])
        owners = np.asarray(assignment)[grid.cell_index(positions)]
    render = np.empty(len(servers))
    for b, server in enumerate(servers):
        members = [k for k in range(n) if owners[k] == b] if n else []
        for k in members:
            try:
                twin_cycles[k] = allocate_dt_compute(dts[k], server, radio, model)
                dt_assignment[k] = b
            except InfeasibleDeadline:
                if options.infeasible_policy == "strict":
                    raise
                infeasible.append(dts[k].id)
        served = [k for k in members if dt_assignment[k] == b]
        demand = twin_cycles[[k for k in served]].sum() if served else 0.0
        if demand >= server.compute_budget:
            if options.exhausted_policy == "strict":
                raise ComputeExhausted(server.id, demand, server.compute_budget)
            # shed the hungriest twins first until rendering has cycles left
            order = sorted(served, key=lambda k: (-twin_cycles[k], dts[k].id))
            for k in order:
                demand -= twin_cycles[k]
                twin_cycles[k] = 0.0
                dt_assignment[k] = UNSERVED
                infeasible.append(dts[k].id)
                if demand < server.compute_budget:
                    break
        render[b] = server.compute_budget - demand
    return twin_cycles, render, dt_assignment, sorted(infeasible)


def region_times(assignment, masses, render_cycles, scenario) -> np.ndarray:
    """Per-server region sync times under load = total sensors * mass."""
    q = scenario.metaverse.total_sensors * np.asarray(masses)
    out = np.zeros(scenario.n_servers)
    for b, server in enumerate(scenario.servers):
        out[b] = region_sync_time(
            assignment,
            server,
            scenario.grid,
            scenario.sensing,
            q[b],
            render_cycles[b],
            scenario.radio,
            scenario.channel,
            scenario.metaverse,
        )
    return out


def evaluate_objective(state: PartitionState, scenario: Scenario) -> float:
    """Average region sync time across all servers (empty regions count)."""
    times = region_times(state.assignment, state.masses, state.render_cycles, scenario)
    return float(times.mean())


def verify_fixed_point(state: PartitionState, scenario: Scenario) -> float:
    """Fraction of sensor mass sitting in cells whose owner does not
    minimize mass * unit_cost under the state's masses and compute split
    (1e-12 relative slack on the comparison)."""
    costs = upload_cost_matrix(
        scenario.grid, scenario.servers, scenario.radio, scenario.channel, scenario.metaverse
    )
    costs = costs + render_cost_matrix(scenario.grid, state.render_cycles, scenario.metaverse)
    weights = costs * state.masses[None, :]
    chosen = weights[np.arange(scenario.grid.n_cells), state.assignment]
    best = weights.min(axis=1)
    violating = chosen > best * (1.0 + 1e-12)
    g = scenario.sensing.values
    total = g.sum() * scenario.grid.cell_volume
    return float(g[violating].sum() * scenario.grid.cell_volume / total)


def initial_assignment(scenario: Scenario) -> np.ndarray:
    """Nearest-server seed partition for the fixed point."""
    centers = scenario.grid.centers
    positions = np.stack([s.position for s in scenario.servers])
    d2 = ((centers[:, None, :] - positions[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def solve(scenario: Scenario):
    """Run the fixed point to convergence.

    Starts from the nearest-server partition with full budgets on
    rendering, then alternates: re-partition under the previous masses
    and render shares, re-integrate masses, re-associate twins and
    re-split compute. After the loop exits, a projection step regenerates
    the partition one last time under the frozen final masses (retrying
    until the compute split it implies agrees), so the returned cell
    ownership is exactly the weighted argmin of the returned masses and
    compute split and the fixed-point certificate holds by construction.
    Hitting max_iter flags no convergence, but the projected state is
    still returned.
    """
    opts = scenario.options
    grid, g = scenario.grid, scenario.sensing
    assignment = initial_assignment(scenario)
    masses = update_masses(grid, assignment, g, scenario.n_servers, opts.alpha_floor)
    render = scenario.budgets().copy()
    state = PartitionState(
        assignment, masses, render,
        np.zeros(len(scenario.dts)), np.full(len(scenario.dts), UNSERVED, dtype=int),
        0, np.nan,
    )
    objective = evaluate_objective(state, scenario)
    history = [objective]
    converged = False
    iteration = 0
    steady = 0
    recent = [assignment.tobytes()]
    while iteration < opts.max_iter - 1 and not converged:
        iteration += 1
        new_assignment = assign_cells(
            grid, scenario.servers, masses, render,
            scenario.radio, scenario.channel, scenario.metaverse,
        )
        new_masses = update_masses(grid, new_assignment, g, scenario.n_servers, opts.alpha_floor)
        blended = (1.0 - opts.damping) * masses + opts.damping * new_masses
        twin_cycles, render, dt_assignment, infeasible = associate_and_budget(
            new_assignment, grid, scenario.dts, scenario.servers,
            scenario.radio, scenario.channel, opts,
        )
        stable = bool(np.array_equal(new_assignment, assignment))
        drift = float(np.max(np.abs(blended - masses)))
        key = new_assignment.tobytes()
        cycling = key in recent[:-1] and drift <= opts.cycle_eps
        recent.append(key)
        del recent[:-7]
        assignment = new_assignment
        masses = blended
        state = PartitionState(
            assignment, masses, render, twin_cycles, dt_assignment, iteration, np.nan
        )
        new_objective = evaluate_objective(state, scenario)
        history.append(new_objective)
        steady = steady + 1 if abs(new_objective - objective) <= opts.tol * objective else 0
        converged = (
            (stable and drift <= opts.settle_eps)
            or cycling
            or steady >= opts.steady_window
        )
        objective = new_objective

    # terminal projection: freeze the masses, emit their exact argmin map
    for _ in range(8):
        projected = assign_cells(
            grid, scenario.servers, masses, render,
            scenario.radio, scenario.channel, scenario.metaverse,
        )
        twin_cycles, new_render, dt_assignment, infeasible = associate_and_budget(
            projected, grid, scenario.dts, scenario.servers,
            scenario.radio, scenario.channel, opts,
        )
        changed = not np.array_equal(projected, assignment)
        render_settled = np.array_equal(new_render, render)
        assignment = projected
        render = new_render
        if changed or not render_settled:
            iteration += 1
            state = PartitionState(
                assignment, masses, render, twin_cycles, dt_assignment, iteration, np.nan
            )
            objective = evaluate_objective(state, scenario)
            history.append(objective)
        if render_settled:
            break

    state = PartitionState(
        assignment, masses, render, twin_cycles, dt_assignment, iteration, objective
    )
    violation = verify_fixed_point(state, scenario)
    report = SolveReport(converged, iteration, history, violation, infeasible)
    return state, report
