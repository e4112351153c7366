"""Latency model for keeping the digital zone and its twins current.

Per sensed volume unit the sync latency splits into an upload leg (shared
uplink into the server) and a render leg (server compute), and a region's
sync time is the density-weighted integral of that unit latency. The same
unit latency factors into load * unit_cost, where the unit cost depends
only on the cell, the server, and the server's render compute; the solver
partitions the zone by comparing mass-weighted unit costs.

Twins have their own three-step latency: state upload, replica execution,
and their sum, which must fit inside the twin's sync period.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, RadioParams, dt_rate, sensor_band, sensor_rate, sensor_snr
from .errors import NoComputeBudget, NoRenderBudget, ZeroRate
from .geometry import ZoneGrid


@dataclass(frozen=True)
class MetaverseParams:
    """Zone-level sensing and rendering constants.

    sensing_density may be a scalar (bps/m^3 everywhere) or a per-cell
    array aligned with the grid.
    """

    slot: float
    sensor_volume: float
    total_sensors: float
    topo_complexity: float
    sensing_density: float | np.ndarray = 50.0

    def __post_init__(self):
        if min(self.slot, self.sensor_volume, self.total_sensors, self.topo_complexity) <= 0:
            raise ValueError("slot, sensor volume, sensor count, and complexity must be positive")
        if np.any(np.asarray(self.sensing_density) < 0):
            raise ValueError("sensing density must be >= 0")

    def rho_at(self, cell_index) -> float | np.ndarray:
        if np.isscalar(self.sensing_density):
            return self.sensing_density
        return np.asarray(self.sensing_density)[cell_index]


@dataclass(frozen=True)
class EdgeServer:
    """A base station with a co-located compute node hosting one region."""

    id: int
    position: np.ndarray
    compute_budget: float
    metaverse_bandwidth: float

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        if self.compute_budget <= 0 or self.metaverse_bandwidth <= 0:
            raise ValueError("server compute and bandwidth must be positive")


@dataclass(frozen=True)
class DigitalTwin:
    """One physical device and its server-side replica.

    sync_intensity is the inverse of the longest tolerated replication
    delay: every state update must be uploaded and executed within
    1/sync_intensity seconds.
    """

    id: int
    position: np.ndarray
    type_index: int
    sync_intensity: float
    data_size: float
    twin_complexity: float
    tx_power: float
    bandwidth: float

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        if min(self.sync_intensity, self.data_size, self.twin_complexity) <= 0:
            raise ValueError("twin intensity, data size, and complexity must be positive")


# --- sensed-zone latencies -------------------------------------------------

def sensor_upload_time(cell, server, q_b, radio, model, params, rho=None):
    """Seconds to upload one slot of one volume unit's data (upload leg)."""
    rate = sensor_rate(cell, server, q_b, radio, model)
    if np.any(np.asarray(rate) <= 0):
        raise ZeroRate("sensor uplink has zero rate")
    rho = params.sensing_density if rho is None else rho
    return params.slot * params.sensor_volume * rho / rate


def sensor_render_time(cell, q_b, render_cycles, params, rho=None):
    """Seconds to render one volume unit's slot of data on the server."""
    if render_cycles <= 0:
        raise NoRenderBudget(f"render compute must be positive, got {render_cycles}")
    rho = params.sensing_density if rho is None else rho
    return params.topo_complexity * params.slot * params.sensor_volume * q_b * rho / render_cycles


def unit_sync_time(cell, server, q_b, render_cycles, radio, model, params, rho=None):
    """Upload plus render time for one volume unit."""
    return sensor_upload_time(cell, server, q_b, radio, model, params, rho) + sensor_render_time(
        cell, q_b, render_cycles, params, rho
    )


def unit_cost(cell, server, render_cycles, radio, model, params, rho=None):
    """Per-mass sync cost of a cell under a server.

    unit_sync_time factors exactly as load * unit_cost with
    load = total_sensors * slot * sensor_volume * region_mass, which is
    what lets the solver compare cells by mass-weighted cost alone.
    """
    if render_cycles <= 0:
        raise NoRenderBudget(f"render compute must be positive, got {render_cycles}")
    rho = params.sensing_density if rho is None else rho
    rho = np.asarray(rho, dtype=float)
    spectral = np.log2(1.0 + sensor_snr(cell, server, radio, model))
    band = sensor_band(server, radio)
    with np.errstate(divide="ignore", invalid="ignore"):
        com = np.where(rho > 0, rho / (band * spectral), 0.0)
    cmp_ = params.topo_complexity * rho / render_cycles
    out = com + cmp_
    return float(out) if out.ndim == 0 else out


def region_load(masses, params):
    """Transport load per server: total sensed bits scale times region mass."""
    return params.total_sensors * params.slot * params.sensor_volume * np.asarray(masses)


def unit_cost_matrix(grid: ZoneGrid, servers, render_cycles, radio, model, params):
    """(n_cells, n_servers) unit costs; the upload part is load-free and
    can be cached across solver iterations via ``upload_cost_matrix``."""
    return upload_cost_matrix(grid, servers, radio, model, params) + render_cost_matrix(
        grid, render_cycles, params
    )


def upload_cost_matrix(grid: ZoneGrid, servers, radio, model, params):
    rho = _rho_cells(grid, params)
    cols = []
    for server in servers:
        spectral = np.log2(1.0 + sensor_snr(grid.centers, server, radio, model))
        band = sensor_band(server, radio)
        with np.errstate(divide="ignore", invalid="ignore"):
            col = np.where(rho > 0, rho / (band * spectral), 0.0)
        cols.append(col)
    return np.stack(cols, axis=1)


def render_cost_matrix(grid: ZoneGrid, render_cycles, params):
    rho = _rho_cells(grid, params)
    render_cycles = np.asarray(render_cycles, dtype=float)
    if np.any(render_cycles <= 0):
        raise NoRenderBudget(f"render compute must be positive, got {render_cycles}")
    return params.topo_complexity * np.outer(rho, 1.0 / render_cycles)


def _rho_cells(grid: ZoneGrid, params) -> np.ndarray:
    rho = np.asarray(params.sensing_density, dtype=float)
    if rho.ndim == 0:
        return np.full(grid.n_cells, float(rho))
    if rho.shape != (grid.n_cells,):
        raise ValueError("per-cell sensing density must match the grid")
    return rho


def region_sync_time(assignment, server, grid, g, q_b, render_cycles, radio, model, params):
    """Total sync time of one region: midpoint-rule sum over its cells of
    unit latency times sensor density times cell volume. Empty regions
    contribute zero."""
    mask = np.asarray(assignment) == server.id
    if not mask.any():
        return 0.0
    if render_cycles <= 0:
        raise NoRenderBudget(f"server {server.id} has no render compute")
    cells = grid.centers[mask]
    rho = params.rho_at(np.nonzero(mask)[0])
    t = unit_sync_time(cells, server, q_b, render_cycles, radio, model, params, rho=rho)
    return float(np.sum(t * g.values[mask]) * grid.cell_volume)


# --- twin latencies --------------------------------------------------------

def dt_upload_time(dt, server, radio, model):
    """Seconds to push one twin state update to its server."""
    rate = dt_rate(dt.position, server, dt, radio, model)
    if dt.data_size == 0:
        return 0.0
    if rate <= 0:
        raise ZeroRate(f"twin {dt.id} uplink has zero rate")
    return dt.data_size / rate


def dt_execute_time(dt, cycles):
    """Seconds for the replica to execute the update on ``cycles`` cycles/s."""
    if cycles <= 0:
        raise NoComputeBudget(f"twin {dt.id} allocated {cycles} cycles/s")
    return dt.twin_complexity * dt.data_size / cycles


def dt_sync_time(dt, server, cycles, radio, model):
    """End-to-end replication latency: upload plus execution."""
    return dt_upload_time(dt, server, radio, model) + dt_execute_time(dt, cycles)
