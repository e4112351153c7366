"""Zone discretization and spatial density fields.

The sensed zone is an axis-aligned box in 1 to 3 dimensions, discretized
into a uniform grid of cells. All spatial integrals in the package are
midpoint-rule sums over cell centers, so refining the grid tightens every
downstream quantity. Densities (sensor placement, twin placement, sensing
rate) are evaluated once per cell and stored as flat arrays in the grid's
deterministic cell order (row-major, x fastest).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateSpec, NonPositiveExtent, ZeroResolution


@dataclass(frozen=True)
class ZoneGrid:
    """Uniform axis-aligned discretization of the zone.

    ``centers`` is ordered row-major with the x index varying fastest:
    flat index = ix + nx * (iy + ny * iz).
    """

    extent: tuple[float, ...]
    resolution: tuple[int, ...]
    centers: np.ndarray = field(repr=False)
    cell_volume: float

    @property
    def ndim(self) -> int:
        return len(self.extent)

    @property
    def n_cells(self) -> int:
        return self.centers.shape[0]

    @property
    def measure(self) -> float:
        """Total zone measure (length, area, or volume)."""
        return float(np.prod(self.extent))

    @property
    def steps(self) -> np.ndarray:
        return np.asarray(self.extent) / np.asarray(self.resolution)

    def cell_index(self, points) -> np.ndarray:
        """Flat cell index containing each point (clamped to the zone)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        idx = np.floor(pts / self.steps).astype(int)
        res = np.asarray(self.resolution)
        idx = np.clip(idx, 0, res - 1)
        flat = idx[:, 0]
        stride = 1
        for a in range(1, self.ndim):
            stride *= res[a - 1]
            flat = flat + idx[:, a] * stride
        if np.asarray(points).ndim == 1:
            return int(flat[0])
        return flat


def build_grid(extent: Sequence[float], resolution: Sequence[int]) -> ZoneGrid:
    """Build a uniform grid over a box of the given side lengths (m)."""
    extent = tuple(float(e) for e in extent)
    resolution = tuple(int(n) for n in resolution)
    if len(extent) != len(resolution) or not 1 <= len(extent) <= 3:
        raise ZeroResolution("extent and resolution must share 1-3 axes")
    if any(e <= 0 for e in extent):
        raise NonPositiveExtent(f"zone side lengths must be positive, got {extent}")
    if any(n < 1 for n in resolution):
        raise ZeroResolution(f"grid needs at least one cell per axis, got {resolution}")
    axes = [(np.arange(n) + 0.5) * (e / n) for e, n in zip(extent, resolution)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.reshape(-1, order="F") for m in mesh], axis=1)
    cell_volume = float(np.prod([e / n for e, n in zip(extent, resolution)]))
    return ZoneGrid(extent, resolution, centers, cell_volume)


@dataclass(frozen=True)
class DensitySpec:
    """Parameters of a spatial density: uniform, a single truncated
    Gaussian, or a Gaussian mixture. ``means``/``stds`` are (n_comp, ndim),
    ``weights`` is (n_comp,); Gaussians are truncated at the zone boundary
    and renormalized there when the field is normalized."""

    kind: str
    means: np.ndarray | None = None
    stds: np.ndarray | None = None
    weights: np.ndarray | None = None

    KINDS = ("uniform", "truncated-gaussian", "gaussian-mixture")

    @classmethod
    def from_dict(cls, raw: dict) -> "DensitySpec":
        kind = raw.get("kind", "uniform")
        if kind not in cls.KINDS:
            raise DegenerateSpec(f"unknown density kind {kind!r}")
        if kind == "uniform":
            return cls("uniform")
        if kind == "truncated-gaussian":
            means = np.atleast_2d(np.asarray(raw["mean_m"], dtype=float))
            stds = np.atleast_2d(np.asarray(raw["std_m"], dtype=float))
            weights = np.ones(1)
        else:
            means = np.asarray(raw["means_m"], dtype=float)
            stds = np.asarray(raw["stds_m"], dtype=float)
            weights = np.asarray(
                raw.get("weights", np.ones(len(means))), dtype=float
            )
        return cls(kind, means, stds, weights)

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform"}
        if self.kind == "truncated-gaussian":
            return {
                "kind": self.kind,
                "mean_m": self.means[0].tolist(),
                "std_m": self.stds[0].tolist(),
            }
        return {
            "kind": self.kind,
            "means_m": self.means.tolist(),
            "stds_m": self.stds.tolist(),
            "weights": self.weights.tolist(),
        }


@dataclass(frozen=True)
class DensityField:
    """A density evaluated on the grid, one non-negative value per cell."""

    grid: ZoneGrid
    spec: DensitySpec
    values: np.ndarray = field(repr=False)

    @property
    def mass(self) -> float:
        """Midpoint-rule integral of the field over the zone."""
        return float(self.values.sum() * self.grid.cell_volume)

    def at(self, points) -> np.ndarray:
        """Field value at arbitrary positions (piecewise-constant lookup)."""
        return self.values[self.grid.cell_index(points)]


def make_density(grid: ZoneGrid, spec: DensitySpec, normalize: bool = True) -> DensityField:
    """Evaluate a density spec on the grid.

    With ``normalize`` the field integrates to exactly 1 over the zone;
    for Gaussians this implements truncation at the zone boundary (mass
    outside is discarded and the remainder rescaled).
    """
    if spec.kind == "uniform":
        values = np.ones(grid.n_cells)
    else:
        means = np.asarray(spec.means, dtype=float)
        stds = np.asarray(spec.stds, dtype=float)
        weights = np.asarray(spec.weights, dtype=float)
        if means.shape[1] != grid.ndim:
            raise DegenerateSpec(
                f"density means have {means.shape[1]} axes, grid has {grid.ndim}"
            )
        if np.any(stds <= 0):
            raise DegenerateSpec("density standard deviations must be positive")
        if np.any(weights < 0) or not np.any(weights > 0):
            raise DegenerateSpec("mixture weights must be >= 0 and not all zero")
        values = np.zeros(grid.n_cells)
        norm_dim = (2.0 * np.pi) ** (grid.ndim / 2.0)
        for m, s, w in zip(means, stds, weights):
            z = (grid.centers - m) / s
            kernel = np.exp(-0.5 * np.sum(z * z, axis=1))
            values += w * kernel / (norm_dim * np.prod(s))
    total = values.sum() * grid.cell_volume
    if total <= 0.0:
        raise DegenerateSpec("density field has zero mass on the zone")
    if normalize:
        values = values / total
    return DensityField(grid, spec, values)


def sample_points(field: DensityField, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` positions from the field, deterministically per seed.

    Sampling is inverse-CDF over cell masses followed by a uniform draw
    within the chosen cell. Draws are consumed one row per point, so the
    first k points of a size-n sample equal the size-k sample for the same
    seed (shared-seed sweeps over the point count stay nested).
    """
    if n < 0:
        raise ValueError("sample size must be >= 0")
    grid = field.grid
    if n == 0:
        return np.empty((0, grid.ndim))
    masses = field.values * grid.cell_volume
    total = masses.sum()
    if total <= 0.0:
        raise DegenerateSpec("cannot sample from a zero-mass field")
    cdf = np.cumsum(masses / total)
    draws = np.random.default_rng(seed).random((n, 1 + grid.ndim))
    cells = np.minimum(
        np.searchsorted(cdf, draws[:, 0], side="right"), grid.n_cells - 1
    )
    return grid.centers[cells] + (draws[:, 1:] - 0.5) * grid.steps
