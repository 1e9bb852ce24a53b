"""Downlink budget: free-space path loss, rain attenuation, SNR, Shannon rate.

All quantities are linear ratios internally; decibels appear only in logs
and tests.  Rain attenuation follows the power-law specific attenuation
(alpha * R^beta dB/km, ITU-R P.838 style coefficients supplied by the
scenario) over a slant path through the rain layer, with the low-elevation
path correction below 5 degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

SPEED_OF_LIGHT_M_S = 299792458.0
BOLTZMANN_J_K = 1.380649e-23

# slant-path formula switches to the refraction-corrected branch below this
LOW_ELEVATION_DEG = 5.0


@dataclass(frozen=True)
class LinkBudgetParams:
    """Transmit chain, receive chain, and spectrum parameters (linear units)."""

    transmit_power_w: float
    transmit_antenna_gain: float
    transmit_loss: float
    receive_antenna_gain: float
    noise_figure: float            # receiver noise temperature contribution, kelvin
    noise_reference_bandwidth_hz: float
    carrier_hz: float
    channel_bandwidth_hz: float    # full bandwidth W shared via per-user fractions
    snr_threshold: float = 0.0

    def __post_init__(self) -> None:
        for name in (
            "transmit_power_w",
            "transmit_antenna_gain",
            "receive_antenna_gain",
            "noise_figure",
            "noise_reference_bandwidth_hz",
            "carrier_hz",
            "channel_bandwidth_hz",
        ):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be > 0")
        if not 0.0 < self.transmit_loss <= 1.0:
            raise ConfigurationError("transmit_loss must lie in (0, 1]")
        if self.snr_threshold < 0:
            raise ConfigurationError("snr_threshold must be >= 0")


@dataclass(frozen=True)
class RainModel:
    """Power-law rain attenuation inputs; rain_rate_mm_h = 0 disables rain."""

    specific_attenuation_alpha: float
    specific_attenuation_beta: float
    rain_rate_mm_h: float
    antenna_height_km: float = 0.0
    effective_earth_radius_km: float = 8500.0

    def __post_init__(self) -> None:
        if self.specific_attenuation_alpha <= 0:
            raise ConfigurationError("specific_attenuation_alpha must be > 0")
        if self.specific_attenuation_beta <= 0:
            raise ConfigurationError("specific_attenuation_beta must be > 0")
        if self.rain_rate_mm_h < 0:
            raise ConfigurationError("rain_rate_mm_h must be >= 0")
        if self.antenna_height_km < 0:
            raise ConfigurationError("antenna_height_km must be >= 0")
        if self.effective_earth_radius_km <= 0:
            raise ConfigurationError("effective_earth_radius_km must be > 0")


def free_space_gain(distance_km: float, carrier_hz: float) -> float:
    """Free-space power gain (c / 4 pi d f)^2, a ratio in (0, 1] for far fields."""
    if distance_km <= 0:
        raise ValueError("distance_km must be > 0")
    if carrier_hz <= 0:
        raise ValueError("carrier_hz must be > 0")
    d_m = distance_km * 1000.0
    ratio = SPEED_OF_LIGHT_M_S / (4.0 * math.pi * d_m * carrier_hz)
    return ratio * ratio


def rain_height_km(lat_deg: float) -> float:
    """Mean 0-degree-isotherm rain height; flat in the tropics, tapering poleward."""
    a = abs(lat_deg)
    if a > 90.0:
        raise ValueError("lat_deg must lie in [-90, 90]")
    if a <= 23.0:
        return 5.0
    return max(0.0, 5.0 - 0.075 * (a - 23.0))


def slant_path_km(
    rain_height: float, antenna_height_km: float, elevation_deg: float, effective_earth_radius_km: float
) -> float:
    """Path length through the rain layer between antenna and rain height."""
    if elevation_deg <= 0:
        raise ValueError("elevation_deg must be > 0")
    dh = rain_height - antenna_height_km
    if dh <= 0:
        # antenna at or above the rain layer: nothing to traverse
        return 0.0
    s = math.sin(math.radians(elevation_deg))
    if elevation_deg >= LOW_ELEVATION_DEG:
        return dh / s
    return 2.0 * dh / (math.sqrt(s * s + 2.0 * dh / effective_earth_radius_km) + s)


def rain_gain(rain: RainModel, slant_km: float) -> float:
    """Linear power gain of rain attenuation over a slant path (1.0 when dry)."""
    if slant_km < 0:
        raise ValueError("slant_km must be >= 0")
    if rain.rain_rate_mm_h == 0.0 or slant_km == 0.0:
        return 1.0
    specific_db_km = rain.specific_attenuation_alpha * rain.rain_rate_mm_h**rain.specific_attenuation_beta
    return 10.0 ** (-specific_db_km * slant_km / 10.0)


def propagation_gain(
    params: LinkBudgetParams,
    rain: RainModel,
    distance_km: float,
    elevation_deg: float,
    user_lat_deg: float,
    user_alt_km: float = 0.0,
) -> float:
    """Combined free-space and rain gain for one satellite-user link."""
    gain = free_space_gain(distance_km, params.carrier_hz)
    if rain.rain_rate_mm_h > 0.0 and elevation_deg > 0.0:
        h_rain = rain_height_km(user_lat_deg)
        h_antenna = rain.antenna_height_km + user_alt_km
        slant = slant_path_km(h_rain, h_antenna, elevation_deg, rain.effective_earth_radius_km)
        gain *= rain_gain(rain, slant)
    return gain


def snr(params: LinkBudgetParams, prop_gain: float) -> float:
    """Linear signal-to-noise ratio at the receiver."""
    if prop_gain <= 0:
        raise ValueError("prop_gain must be > 0")
    signal = (
        params.transmit_power_w
        * params.transmit_antenna_gain
        * params.transmit_loss
        * params.receive_antenna_gain
        * prop_gain
    )
    noise = BOLTZMANN_J_K * params.noise_figure * params.noise_reference_bandwidth_hz
    return signal / noise


def data_rate_bps(bandwidth_fraction: float, params: LinkBudgetParams, snr_linear: float) -> float:
    """Shannon-bound rate over the allocated bandwidth share, bits per second."""
    if not 0.0 <= bandwidth_fraction <= 1.0:
        raise ValueError("bandwidth_fraction must lie in [0, 1]")
    if snr_linear < 0:
        raise ValueError("snr_linear must be >= 0")
    if bandwidth_fraction == 0.0:
        return 0.0
    return bandwidth_fraction * params.channel_bandwidth_hz * math.log2(1.0 + snr_linear)
