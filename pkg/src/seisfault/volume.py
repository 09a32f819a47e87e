"""Seismic volume data model, container I/O, and a synthetic generator with
fault ground truth.

A volume is a 3D amplitude grid indexed ``[t][x][y]`` (time slowest), so a
time section at fixed ``t`` is a contiguous 2D slab. The on-disk container
is a small custom format: an 8-byte magic, a length-prefixed JSON header,
then raw little-endian float32 samples.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve1d

MAGIC = b"SVOL0001"

HEADER_FIELDS = (
    "n_time",
    "n_inline",
    "n_crossline",
    "dt_ms",
    "t0_ms",
    "inline_origin",
    "crossline_origin",
)


class VolumeFormatError(ValueError):
    """Raised when a volume file does not match the container format."""


@dataclass(frozen=True)
class VolumeHeader:
    n_time: int
    n_inline: int
    n_crossline: int
    dt_ms: float = 4.0
    t0_ms: float = 0.0
    inline_origin: int = 0
    crossline_origin: int = 0

    def __post_init__(self):
        if self.n_time < 1 or self.n_inline < 1 or self.n_crossline < 1:
            raise ValueError("grid dimensions must all be >= 1")
        if self.dt_ms <= 0:
            raise ValueError("dt_ms must be positive")

    @property
    def shape(self):
        return (self.n_time, self.n_inline, self.n_crossline)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in HEADER_FIELDS}

    @classmethod
    def from_dict(cls, d: dict) -> "VolumeHeader":
        missing = [name for name in HEADER_FIELDS if name not in d]
        if missing:
            raise VolumeFormatError(f"header missing fields: {missing}")
        return cls(**{name: d[name] for name in HEADER_FIELDS})


@dataclass(frozen=True)
class SeismicVolume:
    """Amplitude grid plus geometry metadata. Treated as immutable."""

    header: VolumeHeader
    amplitude: np.ndarray  # float32, shape (n_time, n_inline, n_crossline)

    def __post_init__(self):
        amp = np.ascontiguousarray(self.amplitude, dtype=np.float32)
        if amp.shape != self.header.shape:
            raise ValueError(
                f"amplitude shape {amp.shape} does not match header {self.header.shape}"
            )
        if not np.isfinite(amp).all():
            raise ValueError("amplitude contains non-finite samples")
        object.__setattr__(self, "amplitude", amp)


@dataclass(frozen=True)
class TimeSection:
    t_index: int
    values: np.ndarray  # (n_inline, n_crossline)


@dataclass(frozen=True)
class FaultGroundTruth:
    t_index: int
    pixels: frozenset  # of (x, y) int tuples


@dataclass(frozen=True)
class FaultSpec:
    """One planar fault: strike/dip in degrees, vertical throw in samples,
    and a lateral anchor point the plane passes through at the middle time
    sample."""

    strike_deg: float
    dip_deg: float
    throw: int
    x0: float
    y0: float

    def __post_init__(self):
        if self.throw < 1:
            raise ValueError("throw must be >= 1 sample")
        if not 0.0 < self.dip_deg <= 90.0:
            raise ValueError("dip must be in (0, 90] degrees")


@dataclass(frozen=True)
class SyntheticSpec:
    header: VolumeHeader
    layer_count: int = 12
    layer_seed: int = 0
    faults: tuple = ()
    wavelet_freq_hz: float = 30.0
    noise_ratio: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.layer_count < 1:
            raise ValueError("layer_count must be >= 1")
        if not 0.0 <= self.noise_ratio < 1.0:
            raise ValueError("noise_ratio must be in [0, 1)")
        if self.wavelet_freq_hz <= 0:
            raise ValueError("wavelet peak frequency must be positive")
        object.__setattr__(self, "faults", tuple(self.faults))

    def to_dict(self) -> dict:
        return {
            "header": self.header.to_dict(),
            "layer_count": self.layer_count,
            "layer_seed": self.layer_seed,
            "faults": [
                {
                    "strike_deg": f.strike_deg,
                    "dip_deg": f.dip_deg,
                    "throw": f.throw,
                    "x0": f.x0,
                    "y0": f.y0,
                }
                for f in self.faults
            ],
            "wavelet_freq_hz": self.wavelet_freq_hz,
            "noise_ratio": self.noise_ratio,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        return cls(
            header=VolumeHeader.from_dict(d["header"]),
            layer_count=d.get("layer_count", 12),
            layer_seed=d.get("layer_seed", 0),
            faults=tuple(FaultSpec(**f) for f in d.get("faults", ())),
            wavelet_freq_hz=d.get("wavelet_freq_hz", 30.0),
            noise_ratio=d.get("noise_ratio", 0.0),
            seed=d.get("seed", 0),
        )


def save_volume(volume: SeismicVolume, path) -> None:
    """Write the container: magic, u32-LE length-prefixed JSON header, then
    float32-LE samples in [t][x][y] order."""
    header_bytes = json.dumps(volume.header.to_dict(), sort_keys=True).encode("utf-8")
    payload = volume.amplitude.astype("<f4", copy=False).tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(payload)


def read_header(path) -> VolumeHeader:
    """Read just the header of a saved volume."""
    with open(path, "rb") as fh:
        return _read_header(fh)


def _read_header(fh) -> VolumeHeader:
    magic = fh.read(len(MAGIC))
    if magic != MAGIC:
        raise VolumeFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    raw_len = fh.read(4)
    if len(raw_len) != 4:
        raise VolumeFormatError("truncated header length prefix")
    (header_len,) = struct.unpack("<I", raw_len)
    header_bytes = fh.read(header_len)
    if len(header_bytes) != header_len:
        raise VolumeFormatError("truncated JSON header")
    try:
        header_dict = json.loads(header_bytes.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise VolumeFormatError(f"malformed JSON header: {exc}") from exc
    return VolumeHeader.from_dict(header_dict)


def load_volume(path) -> SeismicVolume:
    with open(path, "rb") as fh:
        header = _read_header(fh)
        n = header.n_time * header.n_inline * header.n_crossline
        payload = fh.read()
    expected = n * 4
    if len(payload) != expected:
        raise VolumeFormatError(
            f"payload is {len(payload)} bytes, header implies {expected}"
        )
    amp = np.frombuffer(payload, dtype="<f4").reshape(header.shape)
    if not np.isfinite(amp).all():
        raise VolumeFormatError("payload contains non-finite samples")
    return SeismicVolume(header=header, amplitude=amp.copy())


def extract_time_section(volume: SeismicVolume, t: int) -> TimeSection:
    """Copy out the section at time index ``t``; mutating the result never
    touches the volume."""
    n_time = volume.header.n_time
    if not 0 <= t < n_time:
        raise IndexError(f"time index {t} out of range [0, {n_time})")
    return TimeSection(t_index=t, values=volume.amplitude[t].copy())


def ricker_wavelet(freq_hz: float, dt_s: float) -> np.ndarray:
    """Zero-phase Ricker wavelet sampled at dt_s, trimmed where the envelope
    falls below 1e-10 of the peak."""
    half_width_s = math.sqrt(math.log(1e10)) / (math.pi * freq_hz)
    half = max(1, int(math.ceil(half_width_s / dt_s)))
    tau = np.arange(-half, half + 1) * dt_s
    arg = (math.pi * freq_hz * tau) ** 2
    return (1.0 - 2.0 * arg) * np.exp(-arg)


def _fault_geometry(fault: FaultSpec):
    """Unit strike direction and horizontal-normal for the plane; tiny trig
    residue is snapped to zero so cardinal orientations are exact."""
    theta = math.radians(fault.strike_deg)
    sx, sy = math.cos(theta), math.sin(theta)
    if abs(sx) < 1e-12:
        sx = 0.0
    if abs(sy) < 1e-12:
        sy = 0.0
    # normal = strike rotated +90 degrees
    nx, ny = -sy, sx
    dip = math.radians(fault.dip_deg)
    # horizontal plane offset per time sample; 0 for a vertical fault
    cot_dip = math.cos(dip) / math.sin(dip)
    if abs(cot_dip) < 1e-12:
        cot_dip = 0.0
    return (sx, sy), (nx, ny), cot_dip


def _rasterize_trace(fault: FaultSpec, t: int, header: VolumeHeader) -> set:
    """Pixels of the fault plane's intersection with section t, one pixel
    per step of the dominant strike axis."""
    (sx, sy), (nx, ny), cot_dip = _fault_geometry(fault)
    t_mid = (header.n_time - 1) / 2.0
    c = cot_dip * (t - t_mid)
    # point on the trace: anchor shifted along the normal by c
    px = fault.x0 + c * nx
    py = fault.y0 + c * ny
    pixels = set()
    if abs(sx) >= abs(sy):
        for x in range(header.n_inline):
            s = (x - px) / sx
            y = int(math.floor(py + s * sy + 0.5))
            if 0 <= y < header.n_crossline:
                pixels.add((x, y))
    else:
        for y in range(header.n_crossline):
            s = (y - py) / sy
            x = int(math.floor(px + s * sx + 0.5))
            if 0 <= x < header.n_inline:
                pixels.add((x, y))
    return pixels


def generate_synthetic(spec: SyntheticSpec):
    """Build a layered-reflectivity volume cut by planar faults.

    Layer boundaries are laterally constant; each fault displaces the
    reflectivity column downward by its throw on the hanging-wall side of
    the plane. The displaced reflectivity is convolved along time with a
    Ricker wavelet, then seeded Gaussian noise (scaled by signal RMS) is
    added. Returns the volume and per-section ground-truth fault pixels.
    """
    header = spec.header
    n_time, n_inline, n_crossline = header.shape

    rng_layers = np.random.default_rng(spec.layer_seed)
    usable = max(n_time - 4, 1)
    boundary_times = np.sort(
        rng_layers.choice(usable, size=min(spec.layer_count, usable), replace=False)
    ) + 2
    coeffs = rng_layers.uniform(0.5, 1.0, size=boundary_times.size)
    coeffs *= rng_layers.choice([-1.0, 1.0], size=boundary_times.size)
    refl_1d = np.zeros(n_time)
    valid = boundary_times < n_time
    refl_1d[boundary_times[valid]] = coeffs[valid]

    t_idx = np.arange(n_time)[:, None, None]
    x_idx = np.arange(n_inline)[None, :, None]
    y_idx = np.arange(n_crossline)[None, None, :]
    t_mid = (n_time - 1) / 2.0

    shift = np.zeros((n_time, n_inline, n_crossline), dtype=np.int64)
    for fault in spec.faults:
        (sx, sy), (nx, ny), cot_dip = _fault_geometry(fault)
        # signed distance from the plane, in pixels, at each (t, x, y)
        d = nx * (x_idx - fault.x0) + ny * (y_idx - fault.y0) - cot_dip * (t_idx - t_mid)
        hanging = d > 0
        if not hanging.any() or hanging.all():
            raise ValueError(
                f"fault (strike={fault.strike_deg}, x0={fault.x0}, y0={fault.y0}) "
                "does not cut the grid"
            )
        shift += fault.throw * hanging

    src_t = t_idx - shift
    in_range = (src_t >= 0) & (src_t < n_time)
    refl_3d = np.where(in_range, refl_1d[np.clip(src_t, 0, n_time - 1)], 0.0)

    wavelet = ricker_wavelet(spec.wavelet_freq_hz, header.dt_ms / 1000.0)
    clean = convolve1d(refl_3d, wavelet, axis=0, mode="constant", cval=0.0)

    if spec.noise_ratio > 0.0:
        rms = float(np.sqrt(np.mean(clean**2)))
        rng_noise = np.random.default_rng(spec.seed)
        clean = clean + rng_noise.standard_normal(clean.shape) * (spec.noise_ratio * rms)

    volume = SeismicVolume(header=header, amplitude=clean.astype(np.float32))

    truth = []
    for t in range(n_time):
        pixels = set()
        for fault in spec.faults:
            pixels |= _rasterize_trace(fault, t, header)
        truth.append(FaultGroundTruth(t_index=t, pixels=frozenset(pixels)))
    return volume, truth


def save_ground_truth(truth, path) -> None:
    doc = [
        {"t_index": g.t_index, "pixels": sorted([list(p) for p in g.pixels])}
        for g in truth
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))


def load_ground_truth(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return [
        FaultGroundTruth(
            t_index=entry["t_index"],
            pixels=frozenset(tuple(p) for p in entry["pixels"]),
        )
        for entry in doc
    ]
