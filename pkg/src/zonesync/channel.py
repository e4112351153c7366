"""Path-loss channel gains and Shannon uplink rates.

Two uplink families share one log-distance gain model: zone sensors
uploading into a server's shared metaverse band (the band is split evenly
across the server's sensor load), and physical twins uploading state over
their own dedicated band. Noise is flat spectral density times the full
band of the link, so the shared-band rate scales exactly as 1/load.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveLoad


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(watts / 1e-3)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ChannelModel:
    """Log-distance path loss with a near-field clamp.

    Defaults are the standard urban-macro abstraction: -30 dB at 1 m,
    exponent 3, distances clamped below 1 m.
    """

    reference_gain: float = 1e-3
    reference_distance: float = 1.0
    pathloss_exponent: float = 3.0
    min_distance: float = 1.0

    def __post_init__(self):
        if self.reference_gain <= 0 or self.reference_distance <= 0:
            raise ValueError("reference gain and distance must be positive")
        if self.pathloss_exponent < 0:
            raise ValueError("path loss exponent must be >= 0")
        if self.min_distance <= 0:
            raise ValueError("min distance must be positive")


@dataclass(frozen=True)
class RadioParams:
    """Scenario-wide radio constants (all powers in W, bandwidths in Hz).

    ``dt_tx_power``/``dt_bandwidth`` are fallbacks for twins that do not
    carry their own values; per-server sensor bandwidth lives on the
    server object and ``sensor_bandwidth`` is the fallback.
    """

    sensor_tx_power: float
    noise_spectral_density: float
    dt_tx_power: float | None = None
    sensor_bandwidth: float | None = None
    dt_bandwidth: float | None = None

    def __post_init__(self):
        if self.sensor_tx_power <= 0 or self.noise_spectral_density <= 0:
            raise ValueError("powers and noise density must be positive")


def path_gain(tx, rx, model: ChannelModel):
    """Linear channel gain between positions; distance clamped from below."""
    diff = np.asarray(tx, dtype=float) - np.asarray(rx, dtype=float)
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    d = np.maximum(d, model.min_distance)
    return model.reference_gain * (d / model.reference_distance) ** (
        -model.pathloss_exponent
    )


def sensor_band(server, radio: RadioParams) -> float:
    band = getattr(server, "metaverse_bandwidth", None) or radio.sensor_bandwidth
    if band is None or band <= 0:
        raise ValueError("no sensor bandwidth configured for server")
    return band


def sensor_snr(cell, server, radio: RadioParams, model: ChannelModel):
    """Received sensor power over noise in the server's full sensor band."""
    gain = path_gain(cell, server.position, model)
    noise = radio.noise_spectral_density * sensor_band(server, radio)
    return gain * radio.sensor_tx_power / noise


def sensor_rate(cell, server, q_b, radio: RadioParams, model: ChannelModel):
    """Per-sensor Shannon uplink rate (bps) under a load of q_b sensors.

    The server's band is split evenly across its load, so the rate is
    exactly (band / q_b) * log2(1 + snr) and scales as 1/q_b.
    """
    if np.any(np.asarray(q_b) <= 0):
        raise NonPositiveLoad(f"sensor load must be positive, got {q_b}")
    band = sensor_band(server, radio)
    return (band / q_b) * np.log2(1.0 + sensor_snr(cell, server, radio, model))


def dt_rate(pt, server, dt, radio: RadioParams, model: ChannelModel):
    """Twin uplink rate (bps) over the twin's dedicated band."""
    band = getattr(dt, "bandwidth", None) or radio.dt_bandwidth
    power = getattr(dt, "tx_power", None) or radio.dt_tx_power
    if band is None or power is None:
        raise ValueError("twin bandwidth and tx power must be configured")
    gain = path_gain(pt, server.position, model)
    noise = radio.noise_spectral_density * band
    return band * np.log2(1.0 + gain * power / noise)
