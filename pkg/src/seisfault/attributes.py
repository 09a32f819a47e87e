"""Per-section discontinuity attributes.

Semblance is the classic energy-ratio coherence over a small space-time
window: values near 1 mean laterally consistent traces (horizons), low
values mean discontinuity (candidate faults). From three neighboring
semblance maps we derive a log-scale discontinuity map, and from that an
amplitude-weighted geological index used later to gate skeleton points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate

from .volume import SeismicVolume, TimeSection

DEFAULT_CLAMP_FLOOR = 1e-6


@dataclass(frozen=True)
class SemblanceParams:
    lateral_half_window: int = 1   # 3x3 lateral footprint
    vertical_half_window: int = 2  # 5-sample vertical window
    clamp_floor: float = DEFAULT_CLAMP_FLOOR

    def __post_init__(self):
        if self.lateral_half_window < 1:
            raise ValueError("lateral_half_window must be >= 1")
        if self.vertical_half_window < 0:
            raise ValueError("vertical_half_window must be >= 0")
        if not 0.0 < self.clamp_floor < 1.0:
            raise ValueError("clamp_floor must be in (0, 1)")


@dataclass(frozen=True)
class SemblanceMap:
    t_index: int
    values: np.ndarray  # (n_inline, n_crossline), in [clamp_floor, 1]


@dataclass(frozen=True)
class DiscontinuityMap:
    t_index: int
    values: np.ndarray  # >= 0


@dataclass(frozen=True)
class GeologicalWeightMap:
    t_index: int
    values: np.ndarray  # >= 0
    radius: int


def _box_sum(a: np.ndarray, half: int) -> np.ndarray:
    """Sum over the (2*half+1)^2 window, truncated at the array edges."""
    size = 2 * half + 1
    kernel = np.ones((size, size))
    return correlate(a, kernel, mode="constant", cval=0.0)


def semblance(volume: SeismicVolume, t: int, params: SemblanceParams) -> SemblanceMap:
    """Energy-ratio semblance of the section at ``t``.

    For each pixel, sums amplitudes over the lateral window at every time
    offset within the vertical window (both truncated at grid edges):
    ratio of summed squared window-sums to window-size times the summed
    squared amplitudes. A zero denominator is defined as semblance 1; the
    result is clamped to [clamp_floor, 1].
    """
    n_time = volume.header.n_time
    if not 0 <= t < n_time:
        raise IndexError(f"time index {t} out of range [0, {n_time})")

    w = params.lateral_half_window
    counts = _box_sum(np.ones(volume.header.shape[1:]), w)

    numerator = np.zeros(volume.header.shape[1:])
    denominator = np.zeros(volume.header.shape[1:])
    for k in range(-params.vertical_half_window, params.vertical_half_window + 1):
        tk = t + k
        if not 0 <= tk < n_time:
            continue
        section = volume.amplitude[tk].astype(np.float64)
        sums = _box_sum(section, w)
        numerator += sums * sums
        denominator += _box_sum(section * section, w)
    denominator *= counts

    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(denominator == 0.0, 1.0, numerator / np.where(denominator == 0.0, 1.0, denominator))
    values = np.clip(values, params.clamp_floor, 1.0)
    return SemblanceMap(t_index=t, values=values)


def discontinuity_map(
    d_prev: SemblanceMap,
    d_cur: SemblanceMap,
    d_next: SemblanceMap,
    clamp_floor: float = DEFAULT_CLAMP_FLOOR,
) -> DiscontinuityMap:
    """Pointwise largest |ln semblance| over the three neighboring maps.

    Each input is clamped to at least ``clamp_floor`` before the log, so
    the result is finite everywhere and 0 exactly where all three maps
    equal 1. At volume boundaries callers pass the center map in place of
    the missing neighbor.
    """
    shape = d_cur.values.shape
    for m in (d_prev, d_next):
        if m.values.shape != shape:
            raise ValueError("semblance maps must share dimensions")
    stacked = np.stack([d_prev.values, d_cur.values, d_next.values])
    logs = np.abs(np.log(np.clip(stacked, clamp_floor, None)))
    return DiscontinuityMap(t_index=d_cur.t_index, values=logs.max(axis=0))


def geological_weight(
    dhat: DiscontinuityMap, section: TimeSection, radius: int
) -> GeologicalWeightMap:
    """Neighborhood average of the discontinuity map weighted by squared
    amplitude; where the window's amplitude energy is zero, falls back to
    the center discontinuity value."""
    if dhat.values.shape != section.values.shape:
        raise ValueError("discontinuity map and section must share dimensions")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    power = section.values.astype(np.float64) ** 2
    numerator = _box_sum(dhat.values * power, radius)
    denominator = _box_sum(power, radius)
    zero = denominator == 0.0
    values = np.where(zero, dhat.values, numerator / np.where(zero, 1.0, denominator))
    return GeologicalWeightMap(t_index=dhat.t_index, values=values, radius=radius)
