"""Distance-based scoring of detected fault lines against ground truth,
ablation comparison, and image/report export.

The per-point distance is min(|x1-x2|, |y1-y2|) — deliberately kept
verbatim, degenerate shared-row/column zeros included. A conventional
Euclidean mean is reported alongside as a supplementary figure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .enhance import BinaryMap
from .volume import FaultGroundTruth, SeismicVolume

OVERLAY_ACCENT = (255, 64, 32)


@dataclass(frozen=True)
class DistanceReport:
    t_index: int
    mean_directed_det_to_gt: float | None
    mean_directed_gt_to_det: float | None
    mean_symmetric: float | None
    euclid_mean_symmetric: float | None  # supplementary, not the headline figure
    detected_count: int
    gt_count: int

    def to_dict(self) -> dict:
        return {
            "t_index": self.t_index,
            "mean_directed_det_to_gt": self.mean_directed_det_to_gt,
            "mean_directed_gt_to_det": self.mean_directed_gt_to_det,
            "mean_symmetric": self.mean_symmetric,
            "euclid_mean_symmetric": self.euclid_mean_symmetric,
            "detected_count": self.detected_count,
            "gt_count": self.gt_count,
        }


def point_distance(p1, p2) -> float:
    """min(|dx|, |dy|): zero whenever the points share a row or column."""
    return min(abs(p1[0] - p2[0]), abs(p1[1] - p2[1]))


def _directed_means(a: np.ndarray, b: np.ndarray):
    """Mean over a of the nearest-b distance, for the min-axis metric and
    the Euclidean one."""
    dx = np.abs(a[:, 0][:, None] - b[None, :, 0])
    dy = np.abs(a[:, 1][:, None] - b[None, :, 1])
    axis_min = np.minimum(dx, dy).min(axis=1).mean()
    euclid = np.sqrt(dx.astype(np.float64) ** 2 + dy.astype(np.float64) ** 2).min(axis=1).mean()
    return float(axis_min), float(euclid)


def average_distance(detected: BinaryMap, gt: FaultGroundTruth) -> DistanceReport:
    """Both directed means plus their average; empty sets yield explicit
    None means rather than a fake zero."""
    return report_from_pixels(detected.t_index, map(tuple, np.argwhere(detected.bits)), gt)


def report_from_pixels(t_index: int, detected_pixels, gt: FaultGroundTruth) -> DistanceReport:
    det = np.array(sorted(detected_pixels), dtype=np.int64).reshape(-1, 2)
    truth = np.array(sorted(gt.pixels), dtype=np.int64).reshape(-1, 2)

    det_to_gt = gt_to_det = None
    euclid_dg = euclid_gd = None
    if len(det) and len(truth):
        det_to_gt, euclid_dg = _directed_means(det, truth)
        gt_to_det, euclid_gd = _directed_means(truth, det)

    symmetric = None
    euclid_sym = None
    if det_to_gt is not None and gt_to_det is not None:
        symmetric = (det_to_gt + gt_to_det) / 2.0
        euclid_sym = (euclid_dg + euclid_gd) / 2.0
    return DistanceReport(
        t_index=t_index,
        mean_directed_det_to_gt=det_to_gt,
        mean_directed_gt_to_det=gt_to_det,
        mean_symmetric=symmetric,
        euclid_mean_symmetric=euclid_sym,
        detected_count=int(len(det)),
        gt_count=int(len(truth)),
    )


def run_ablation(volume: SeismicVolume, t_indices, params, truth_by_t) -> list:
    """Score the full and the color-path-off pipeline per section.

    Returns one row per section: t_index, both symmetric means (None when
    a detection came up empty), and the detected counts.
    """
    from . import pipeline  # local import: pipeline sits above this module

    from dataclasses import replace

    rows = []
    for t in t_indices:
        full = pipeline.run_section(volume, t, params)
        ablated = pipeline.run_section(volume, t, replace(params, ablation=True))
        gt = truth_by_t[t]
        full_report = average_distance(full.fault_lines, gt)
        ablated_report = average_distance(ablated.fault_lines, gt)
        rows.append(
            {
                "t_index": t,
                "full": full_report.mean_symmetric,
                "ablated": ablated_report.mean_symmetric,
                "full_detected": full_report.detected_count,
                "ablated_detected": ablated_report.detected_count,
            }
        )
    return rows


def render_comparison_table(rows, columns=("full", "ablated")) -> str:
    """Aligned plain-text table, sections down, variants across."""
    header = ["section"] + list(columns)
    lines = ["  ".join(f"{h:>10}" for h in header)]
    for row in rows:
        cells = [f"{row['t_index']:>10}"]
        for c in columns:
            v = row.get(c)
            cells.append(f"{v:>10.4f}" if v is not None else f"{'n/a':>10}")
        lines.append("  ".join(cells))
    return "\n".join(lines)


def to_gray_u8(values: np.ndarray) -> np.ndarray:
    """Min-max normalize to uint8; a constant field renders as black."""
    v = values.astype(np.float64)
    lo, hi = v.min(), v.max()
    if hi > lo:
        v = (v - lo) / (hi - lo)
    else:
        v = np.zeros_like(v)
    return np.rint(v * 255.0).astype(np.uint8)


def _to_image(rgb: np.ndarray) -> Image.Image:
    # grids are indexed [x=inline][y=crossline]; render inline as rows
    return Image.fromarray(rgb, mode="RGB")


def render_overlay(background: np.ndarray, lines: np.ndarray) -> Image.Image:
    gray = to_gray_u8(background)
    rgb = np.stack([gray, gray, gray], axis=-1)
    rgb[lines.astype(bool)] = OVERLAY_ACCENT
    return _to_image(rgb)


def export_overlay(background: np.ndarray, lines: BinaryMap, path) -> None:
    """8-bit PNG: min-max grayscale background with fault pixels in the
    accent color. Fixed encoder settings keep the bytes reproducible."""
    if background.shape != lines.bits.shape:
        raise ValueError("background and line map dimensions differ")
    render_overlay(background, lines.bits).save(path, format="PNG")


def fault_lines_to_components(b: BinaryMap) -> list:
    """8-connected components as deterministic pixel paths (walk from the
    smallest endpoint, fixed neighbor order)."""
    from scipy import ndimage

    labels, n = ndimage.label(b.bits, structure=np.ones((3, 3), bool))
    components = []
    for label in range(1, n + 1):
        pixels = [tuple(p) for p in np.argwhere(labels == label)]
        pixel_set = set(pixels)
        counts = {
            p: sum(
                (p[0] + dx, p[1] + dy) in pixel_set
                for dx in (-1, 0, 1)
                for dy in (-1, 0, 1)
                if (dx, dy) != (0, 0)
            )
            for p in pixels
        }
        endpoints = sorted(p for p, c in counts.items() if c <= 1)
        start = endpoints[0] if endpoints else min(pixels)
        ordered = []
        seen = set()
        stack = [start]
        while stack:
            p = stack.pop()
            if p in seen:
                continue
            seen.add(p)
            ordered.append([int(p[0]), int(p[1])])
            for dx, dy in (
                (0, 1), (1, 0), (0, -1), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1),
            ):
                q = (p[0] + dx, p[1] + dy)
                if q in pixel_set and q not in seen:
                    stack.append(q)
        components.append(ordered)
    return components


def save_fault_lines(b: BinaryMap, path) -> None:
    doc = {"t_index": b.t_index, "components": fault_lines_to_components(b)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))


def load_fault_lines(path):
    """Read a fault-line document back as (t_index, pixel set)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    pixels = {tuple(p) for comp in doc["components"] for p in comp}
    return doc["t_index"], pixels


def save_reports(reports, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in reports], fh, sort_keys=True, separators=(",", ":"))
