"""Edge-zone partitioning and compute allocation for synchronized twins.

Splits a sensed physical zone into per-server regions and divides each
server's compute between rendering its region and keeping its digital
twins on deadline, minimizing the average region sync time. Ships a
mass-weighted fixed-point solver, a best-channel baseline, scikit-learn
style estimators over both, and an experiment harness with a CLI.
"""

from .baseline import snr_assign, snr_solve
from .channel import ChannelModel, RadioParams, dt_rate, path_gain, sensor_rate
from .errors import (
    ComputeExhausted,
    ConfigError,
    DegenerateSpec,
    InfeasibleDeadline,
    NoComputeBudget,
    NonPositiveExtent,
    NonPositiveLoad,
    NoRenderBudget,
    SearchSpaceTooLarge,
    ZeroRate,
    ZeroResolution,
    ZoneSyncError,
)
from .estimators import OptimalTransportPartitioner, SnrAssociation
from .geometry import DensityField, DensitySpec, ZoneGrid, build_grid, make_density, sample_points
from .harness import (
    MetricsRecord,
    brute_force_oracle,
    dump_partition,
    run_scenario,
    sweep_dts,
    sweep_sigma,
    write_records,
)
from .scenario import apply_overrides, build_scenario, load_config, normalize_config
from .solver import (
    PartitionState,
    Scenario,
    SolveReport,
    SolverOptions,
    allocate_dt_compute,
    assign_cells,
    associate_and_budget,
    evaluate_objective,
    solve,
    update_masses,
    verify_fixed_point,
)
from .sync import (
    DigitalTwin,
    EdgeServer,
    MetaverseParams,
    dt_execute_time,
    dt_sync_time,
    dt_upload_time,
    region_sync_time,
    sensor_render_time,
    sensor_upload_time,
    unit_cost,
    unit_sync_time,
)

__version__ = "0.1.0"
