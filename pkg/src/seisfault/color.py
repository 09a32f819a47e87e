"""RGB blending of neighboring semblance maps and color-space transforms.

Three neighboring semblance maps become the red, green, and blue planes of
one image; converting that image to Lab, YCbCr, and HSV separates the
structural intensity (L, Y, V) from chroma. All conversions assume
components in [0, 1]; Lab treats the image as sRGB-encoded with D65 white.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attributes import SemblanceMap

# sRGB -> XYZ (D65), IEC 61966-2-1 rounded matrix. The white point is taken
# as the exact row sums so that (1,1,1) maps to L*=100, a*=b*=0 exactly.
_RGB_TO_XYZ = np.array(
    [
        [0.4124, 0.3576, 0.1805],
        [0.2126, 0.7152, 0.0722],
        [0.0193, 0.1192, 0.9505],
    ]
)
_WHITE = _RGB_TO_XYZ.sum(axis=1)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)

# channel -> (source space, plane index in the converted array)
CHANNEL_SOURCES = {"L": ("lab", 0), "Y": ("ycbcr", 0), "V": ("hsv", 2)}


@dataclass(frozen=True)
class BlendedImage:
    t_index: int
    pixels: np.ndarray  # (n_inline, n_crossline, 3), components in [0, 1]


@dataclass(frozen=True)
class ColorPlanes:
    """Converted image with a tag naming the color space of its planes."""

    space: str  # "hsv" | "ycbcr" | "lab"
    t_index: int
    values: np.ndarray  # (n_inline, n_crossline, 3)


@dataclass(frozen=True)
class IntensityMap:
    t_index: int
    channel: str  # "L" | "Y" | "V"
    values: np.ndarray  # in [0, 1]


def blend_rgb(d_prev: SemblanceMap, d_cur: SemblanceMap, d_next: SemblanceMap) -> BlendedImage:
    """Stack the previous/current/next semblance maps as R/G/B planes,
    without rescaling."""
    shape = d_cur.values.shape
    if d_prev.values.shape != shape or d_next.values.shape != shape:
        raise ValueError("semblance maps must share dimensions")
    pixels = np.stack([d_prev.values, d_cur.values, d_next.values], axis=-1)
    return BlendedImage(t_index=d_cur.t_index, pixels=pixels)


def rgb_to_hsv(image: BlendedImage) -> ColorPlanes:
    """Hexcone HSV: v = max, s = (v - min) / v (0 for black), hue in
    [0, 360) with 0 for achromatic pixels."""
    rgb = image.pixels
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    delta = v - mn
    s = np.where(v == 0.0, 0.0, delta / np.where(v == 0.0, 1.0, v))

    safe = np.where(delta == 0.0, 1.0, delta)
    h = np.zeros_like(v)
    rmax = (v == r) & (delta > 0)
    gmax = (v == g) & (delta > 0) & ~rmax
    bmax = (delta > 0) & ~rmax & ~gmax
    h = np.where(rmax, (g - b) / safe, h)
    h = np.where(gmax, 2.0 + (b - r) / safe, h)
    h = np.where(bmax, 4.0 + (r - g) / safe, h)
    h = (h * 60.0) % 360.0
    return ColorPlanes(space="hsv", t_index=image.t_index, values=np.stack([h, s, v], axis=-1))


def rgb_to_ycbcr(image: BlendedImage) -> ColorPlanes:
    """BT.601 full-range luma and chroma, all components staying in [0, 1]."""
    rgb = image.pixels
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    # algebraically 0.299r + 0.587g + 0.114b, arranged so r=g=b=c gives
    # exactly c in floating point
    y = b + 0.299 * (r - b) + 0.587 * (g - b)
    cb = 0.5 + (b - y) / 1.772
    cr = 0.5 + (r - y) / 1.402
    return ColorPlanes(space="ycbcr", t_index=image.t_index, values=np.stack([y, cb, cr], axis=-1))


def _srgb_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _linear_to_srgb(c: np.ndarray) -> np.ndarray:
    c = np.clip(c, 0.0, None)
    return np.where(c <= 0.0031308, 12.92 * c, 1.055 * c ** (1.0 / 2.4) - 0.055)


def _lab_f(u: np.ndarray) -> np.ndarray:
    delta = 6.0 / 29.0
    return np.where(u > delta**3, np.cbrt(u), u / (3 * delta**2) + 4.0 / 29.0)


def _lab_f_inv(v: np.ndarray) -> np.ndarray:
    delta = 6.0 / 29.0
    return np.where(v > delta, v**3, 3 * delta**2 * (v - 4.0 / 29.0))


def rgb_to_lab(image: BlendedImage) -> ColorPlanes:
    """CIE L*a*b* of the sRGB-interpreted image (D65 white); L* in [0, 100]."""
    linear = _srgb_to_linear(image.pixels)
    xyz = linear @ _RGB_TO_XYZ.T
    fx, fy, fz = (_lab_f(xyz[..., i] / _WHITE[i]) for i in range(3))
    lum = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return ColorPlanes(space="lab", t_index=image.t_index, values=np.stack([lum, a, b], axis=-1))


def lab_to_rgb(planes: ColorPlanes) -> np.ndarray:
    """Inverse of :func:`rgb_to_lab`; used for round-trip checks."""
    if planes.space != "lab":
        raise ValueError(f"expected lab planes, got {planes.space!r}")
    lum, a, b = planes.values[..., 0], planes.values[..., 1], planes.values[..., 2]
    fy = (lum + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0
    xyz = np.stack(
        [_lab_f_inv(fx) * _WHITE[0], _lab_f_inv(fy) * _WHITE[1], _lab_f_inv(fz) * _WHITE[2]],
        axis=-1,
    )
    return np.clip(_linear_to_srgb(xyz @ _XYZ_TO_RGB.T), 0.0, 1.0)


def extract_intensity(planes: ColorPlanes, channel: str) -> IntensityMap:
    """Pull the structural channel out of a converted image, normalized to
    [0, 1] (L* divided by 100; Y and V are already unit-range)."""
    if channel not in CHANNEL_SOURCES:
        raise ValueError(f"unknown channel {channel!r}")
    space, index = CHANNEL_SOURCES[channel]
    if planes.space != space:
        raise ValueError(f"channel {channel!r} comes from {space!r}, got {planes.space!r}")
    values = planes.values[..., index]
    if channel == "L":
        values = values / 100.0
    return IntensityMap(t_index=planes.t_index, channel=channel, values=np.clip(values, 0.0, 1.0))
