"""Exception types shared across the package."""


class ZoneSyncError(Exception):
    """Base class for all zonesync errors."""


class ConfigError(ZoneSyncError):
    """Scenario configuration is missing, malformed, or inconsistent."""


class NonPositiveExtent(ConfigError):
    """A zone side length is zero or negative."""


class ZeroResolution(ConfigError):
    """A grid axis has fewer than one cell."""


class DegenerateSpec(ConfigError):
    """A density specification carries no mass on the zone."""


class NonPositiveLoad(ZoneSyncError):
    """A shared-band rate was requested for a non-positive sensor load."""


class ZeroRate(ZoneSyncError):
    """An upload time was requested over a zero-rate link."""


class NoRenderBudget(ZoneSyncError):
    """A server has no compute left for rendering its region."""


class NoComputeBudget(ZoneSyncError):
    """A twin execution time was requested with no allocated cycles."""


class InfeasibleDeadline(ZoneSyncError):
    """Twin deadline constraint violated: the upload alone exceeds the
    allowed sync period 1/mu, so no compute allocation can satisfy it."""

    def __init__(self, dt_id, server_id, rate, deadline_rate):
        self.dt_id = dt_id
        self.server_id = server_id
        super().__init__(
            f"twin {dt_id} on server {server_id}: sync deadline constraint "
            f"(upload + execute <= 1/mu) cannot be met, uplink rate "
            f"{rate:.6g} bps <= required {deadline_rate:.6g} bps"
        )


class ComputeExhausted(ZoneSyncError):
    """Compute budget constraint violated: render share plus twin
    allocations would exceed a server's total cycles."""

    def __init__(self, server_id, demand, budget):
        self.server_id = server_id
        super().__init__(
            f"server {server_id}: compute budget constraint "
            f"(render + sum(twin cycles) <= budget) violated, twin demand "
            f"{demand:.6g} cycles/s >= budget {budget:.6g} cycles/s"
        )


class SearchSpaceTooLarge(ZoneSyncError):
    """Exhaustive assignment enumeration was requested beyond the cap."""
