"""Channel enhancement: Gaussian smoothing, contrast-limited adaptive
histogram equalization, threshold highlighting, and the geologically gated
combination of the three channel masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate

from .attributes import SemblanceMap
from .color import IntensityMap

CHANNEL_TAGS = ("L", "Y", "V")


@dataclass(frozen=True)
class EnhanceParams:
    gaussian_sigma: float = 10.0
    gaussian_size: int = 2
    clahe_tiles: int = 8
    clahe_clip: float = 64.0
    clahe_bins: int = 64
    threshold_l: float = 0.55
    threshold_y: float = 0.55
    threshold_v: float = 0.55
    semblance_gate: float = 0.8

    def __post_init__(self):
        if self.gaussian_sigma <= 0:
            raise ValueError("gaussian_sigma must be positive")
        if self.gaussian_size < 1:
            raise ValueError("gaussian_size must be >= 1")
        if self.clahe_tiles < 1:
            raise ValueError("clahe_tiles must be >= 1")
        if self.clahe_clip < 1.0:
            raise ValueError("clahe_clip must be >= 1.0")
        if self.clahe_bins < 2:
            raise ValueError("clahe_bins must be >= 2")
        for name in ("threshold_l", "threshold_y", "threshold_v", "semblance_gate"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1)")

    def threshold_for(self, channel: str) -> float:
        return {"L": self.threshold_l, "Y": self.threshold_y, "V": self.threshold_v}[channel]


@dataclass(frozen=True)
class BinaryMap:
    t_index: int
    bits: np.ndarray  # bool
    tag: str  # "L" | "Y" | "V" | "combined" | "skeleton_pruned" | "fault_lines"


def gaussian_kernel(sigma: float, size: int) -> np.ndarray:
    """Normalized kernel of Gaussian samples on centered offsets; an even
    size spans offsets [-size/2, size/2 - 1]."""
    offsets = np.arange(size) - size // 2
    ii, jj = np.meshgrid(offsets, offsets, indexing="ij")
    kernel = np.exp(-(ii**2 + jj**2) / (2.0 * sigma**2))
    return kernel / kernel.sum()


def gaussian_smooth(m: IntensityMap, sigma: float, size: int) -> IntensityMap:
    """Convolve with the sampled Gaussian kernel, reflect-padded at edges."""
    if sigma <= 0 or size < 1:
        raise ValueError("sigma must be positive and size >= 1")
    if size == 1:
        return IntensityMap(t_index=m.t_index, channel=m.channel, values=m.values.copy())
    kernel = gaussian_kernel(sigma, size)
    smoothed = correlate(m.values, kernel, mode="reflect")
    return IntensityMap(
        t_index=m.t_index, channel=m.channel, values=np.clip(smoothed, 0.0, 1.0)
    )


def _tile_edges(n: int, tiles: int) -> np.ndarray:
    return np.array([round(i * n / tiles) for i in range(tiles + 1)], dtype=np.int64)


def _axis_interp(n: int, edges: np.ndarray):
    """Per-coordinate pair of tile indices and blend weight, clamped so
    coordinates outside the outermost tile centers use a single mapping."""
    centers = (edges[:-1] + edges[1:] - 1) / 2.0
    coords = np.arange(n)
    hi = np.clip(np.searchsorted(centers, coords), 0, len(centers) - 1)
    lo = np.clip(hi - 1, 0, len(centers) - 1)
    span = centers[hi] - centers[lo]
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(span == 0.0, 0.0, (coords - centers[lo]) / np.where(span == 0.0, 1.0, span))
    return lo, hi, np.clip(w, 0.0, 1.0)


def clahe_tile_mappings(values: np.ndarray, tiles: int, clip: float, bins: int) -> np.ndarray:
    """Per-tile value mappings: histogram clipped at ``clip`` times the
    mean bin count with the excess spread uniformly, then the cumulative
    sum scaled to [0, 1]. Shape (tiles, tiles, bins), non-decreasing along
    the last axis."""
    nx, ny = values.shape
    bin_idx = np.minimum((values * bins).astype(np.int64), bins - 1)
    x_edges = _tile_edges(nx, tiles)
    y_edges = _tile_edges(ny, tiles)
    mappings = np.empty((tiles, tiles, bins))
    for i in range(tiles):
        for j in range(tiles):
            tile = bin_idx[x_edges[i] : x_edges[i + 1], y_edges[j] : y_edges[j + 1]]
            hist = np.bincount(tile.ravel(), minlength=bins).astype(np.float64)
            npix = tile.size
            limit = clip * npix / bins
            excess = np.maximum(hist - limit, 0.0).sum()
            hist = np.minimum(hist, limit) + excess / bins
            mappings[i, j] = np.cumsum(hist) / npix
    return mappings


def clahe(m: IntensityMap, tiles: int, clip: float, bins: int) -> IntensityMap:
    """Contrast-limited adaptive histogram equalization.

    The map is split into a tiles-by-tiles grid; every output pixel blends
    the value mappings of the up-to-four nearest tile centers bilinearly
    (see :func:`clahe_tile_mappings` for the per-tile construction).
    """
    nx, ny = m.values.shape
    if tiles > nx or tiles > ny:
        raise ValueError(f"tile grid {tiles}x{tiles} exceeds section {nx}x{ny}")
    if clip < 1.0 or bins < 2:
        raise ValueError("clip must be >= 1.0 and bins >= 2")

    bin_idx = np.minimum((m.values * bins).astype(np.int64), bins - 1)
    x_edges = _tile_edges(nx, tiles)
    y_edges = _tile_edges(ny, tiles)
    mappings = clahe_tile_mappings(m.values, tiles, clip, bins)

    lo_x, hi_x, wx = _axis_interp(nx, x_edges)
    lo_y, hi_y, wy = _axis_interp(ny, y_edges)
    wx = wx[:, None]
    wy = wy[None, :]
    lo_x, hi_x = lo_x[:, None], hi_x[:, None]
    lo_y, hi_y = lo_y[None, :], hi_y[None, :]

    out = (
        (1 - wx) * (1 - wy) * mappings[lo_x, lo_y, bin_idx]
        + (1 - wx) * wy * mappings[lo_x, hi_y, bin_idx]
        + wx * (1 - wy) * mappings[hi_x, lo_y, bin_idx]
        + wx * wy * mappings[hi_x, hi_y, bin_idx]
    )
    return IntensityMap(t_index=m.t_index, channel=m.channel, values=np.clip(out, 0.0, 1.0))


def threshold_channel(m: IntensityMap, threshold: float) -> BinaryMap:
    """Mark pixels strictly below the threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    return BinaryMap(t_index=m.t_index, bits=m.values < threshold, tag=m.channel)


def combine_binary(
    b_l: BinaryMap,
    b_y: BinaryMap,
    b_v: BinaryMap,
    d_cur: SemblanceMap,
    semblance_gate: float,
) -> BinaryMap:
    """Combine the three channel masks under the semblance gate.

    A pixel is kept when at least two channels agree and its semblance does
    not exceed the gate, or when exactly one channel marks it (the single
    vote is accepted ungated to preserve connectivity).
    """
    if (b_l.tag, b_y.tag, b_v.tag) != CHANNEL_TAGS:
        raise ValueError(
            f"expected channel tags {CHANNEL_TAGS}, got {(b_l.tag, b_y.tag, b_v.tag)}"
        )
    shape = d_cur.values.shape
    for b in (b_l, b_y, b_v):
        if b.bits.shape != shape:
            raise ValueError("binary maps and semblance map must share dimensions")
    votes = b_l.bits.astype(np.int8) + b_y.bits + b_v.bits
    bits = ((votes >= 2) & (d_cur.values <= semblance_gate)) | (votes == 1)
    return BinaryMap(t_index=d_cur.t_index, bits=bits, tag="combined")
