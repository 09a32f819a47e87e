"""Weighted skeletonization of the combined fault mask.

The medial axis is taken discretely: a foreground pixel survives when its
maximal inscribed disk (radius = exact Euclidean distance transform) is not
contained in any 8-neighbor's disk, then a thinning pass enforces unit
width. Each skeleton point gets a dimensional weight (longest free arc of
its disk between boundary contacts), a geological weight sampled from the
discontinuity index, and their product as the prune weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .attributes import GeologicalWeightMap
from .enhance import BinaryMap

_EIGHT = np.ones((3, 3), dtype=np.int64)
# (dx, dy, squared step) for the 8-neighborhood
_NEIGHBOR_STEPS = [
    (dx, dy, dx * dx + dy * dy)
    for dx in (-1, 0, 1)
    for dy in (-1, 0, 1)
    if (dx, dy) != (0, 0)
]


@dataclass(frozen=True)
class SkeletonParams:
    # None -> per-section percentile of the combined weights; percentile 0
    # keeps every skeleton point, leaving pruning to the interpreter
    prune_threshold: float | None = None
    prune_percentile: float = 0.0
    min_component: int = 10
    min_branch: int = 5
    geo_radius: int = 2

    def __post_init__(self):
        if self.prune_threshold is not None and self.prune_threshold < 0:
            raise ValueError("prune_threshold must be >= 0")
        if not 0.0 <= self.prune_percentile <= 100.0:
            raise ValueError("prune_percentile must be in [0, 100]")
        if self.min_component < 1 or self.min_branch < 1:
            raise ValueError("minimum lengths must be >= 1")
        if self.geo_radius < 0:
            raise ValueError("geo_radius must be >= 0")


@dataclass(frozen=True)
class WeightedSkeleton:
    """Skeleton points as parallel arrays; arc and combined weights are
    None until the corresponding stage fills them."""

    t_index: int
    shape: tuple
    xs: np.ndarray
    ys: np.ndarray
    radii: np.ndarray
    arc_weight: np.ndarray | None = None  # longest free arc length, pixels
    geo_weight: np.ndarray | None = None
    weight: np.ndarray | None = None      # arc_weight * geo_weight

    def __len__(self):
        return len(self.xs)

    def as_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.xs, self.ys] = True
        return mask


def _squared_edt(bits: np.ndarray) -> np.ndarray:
    """Exact integer squared distance to the nearest background pixel."""
    dist = ndimage.distance_transform_edt(bits)
    return np.rint(dist * dist).astype(np.int64)


def _medial_mask(bits: np.ndarray, dist2: np.ndarray) -> np.ndarray:
    """Keep pixels whose disk is not contained in an 8-neighbor's disk.

    Containment of p's disk in q's requires dist(q) >= dist(p) + |pq|;
    evaluated exactly on squared distances: with A = dq2 - dp2 - s2 it is
    A >= 0 and A^2 >= 4*s2*dp2.
    """
    nx, ny = bits.shape
    keep = bits.copy()
    padded = np.zeros((nx + 2, ny + 2), dtype=np.int64)
    padded[1:-1, 1:-1] = np.where(bits, dist2, 0)
    dp2 = dist2
    for dx, dy, s2 in _NEIGHBOR_STEPS:
        dq2 = padded[1 + dx : 1 + dx + nx, 1 + dy : 1 + dy + ny]
        a = dq2 - dp2 - s2
        contained = bits & (dq2 > 0) & (a >= 0) & (a * a >= 4 * s2 * dp2)
        keep &= ~contained
    return keep


def _crossing_number(mask: np.ndarray, x: int, y: int) -> int:
    """Yokoi connectivity number for 8-connected foreground; 1 means the
    pixel can be deleted without splitting or merging anything locally."""
    nx, ny = mask.shape

    def at(dx, dy):
        xx, yy = x + dx, y + dy
        return 1 if 0 <= xx < nx and 0 <= yy < ny and mask[xx, yy] else 0

    # neighbors counterclockwise starting east (in (x, y) axes)
    n = [at(0, 1), at(-1, 1), at(-1, 0), at(-1, -1), at(0, -1), at(1, -1), at(1, 0), at(1, 1)]
    total = 0
    for k in (0, 2, 4, 6):
        xk = 1 - n[k]
        xk1 = 1 - n[(k + 1) % 8]
        xk2 = 1 - n[(k + 2) % 8]
        total += xk - xk * xk1 * xk2
    return total


def _full_blocks(mask: np.ndarray) -> np.ndarray:
    """Pixels participating in a fully set 2x2 block."""
    blocks = mask[:-1, :-1] & mask[1:, :-1] & mask[:-1, 1:] & mask[1:, 1:]
    member = np.zeros_like(mask)
    member[:-1, :-1] |= blocks
    member[1:, :-1] |= blocks
    member[:-1, 1:] |= blocks
    member[1:, 1:] |= blocks
    return member


def _in_full_block(mask: np.ndarray, x: int, y: int) -> bool:
    nx, ny = mask.shape
    for bx in (x - 1, x):
        for by in (y - 1, y):
            if 0 <= bx < nx - 1 and 0 <= by < ny - 1:
                if mask[bx, by] and mask[bx + 1, by] and mask[bx, by + 1] and mask[bx + 1, by + 1]:
                    return True
    return False


def _thin_to_unit_width(mask: np.ndarray) -> np.ndarray:
    """Remove deletable pixels of fully set 2x2 blocks (deterministic
    raster order) until no full block remains or nothing can change."""
    mask = mask.copy()
    while True:
        members = _full_blocks(mask)
        if not members.any():
            break
        removed = False
        for x, y in zip(*np.nonzero(members)):
            if mask[x, y] and _in_full_block(mask, x, y) and _crossing_number(mask, x, y) == 1:
                mask[x, y] = False
                removed = True
        if not removed:
            break
    return mask


def medial_axis(b: BinaryMap) -> WeightedSkeleton:
    """Discrete medial axis of the combined mask with inscribed-disk radii;
    arc and combined weights are left unfilled."""
    bits = b.bits.astype(bool)
    if not bits.any():
        empty = np.empty(0)
        return WeightedSkeleton(
            t_index=b.t_index,
            shape=bits.shape,
            xs=np.empty(0, dtype=np.int64),
            ys=np.empty(0, dtype=np.int64),
            radii=empty,
        )
    dist2 = _squared_edt(bits)
    mask = _thin_to_unit_width(_medial_mask(bits, dist2))
    xs, ys = np.nonzero(mask)
    return WeightedSkeleton(
        t_index=b.t_index,
        shape=bits.shape,
        xs=xs,
        ys=ys,
        radii=np.sqrt(dist2[xs, ys].astype(np.float64)),
    )


def _boundary_pixels(bits: np.ndarray) -> np.ndarray:
    """Background pixels 8-adjacent to the foreground, as an (n, 2) array."""
    near = ndimage.binary_dilation(bits, structure=np.ones((3, 3), bool))
    return np.argwhere(near & ~bits)


def longest_free_arc(point, radius: float, contacts: np.ndarray) -> float:
    """Arc length of the widest angular gap between boundary contacts of
    the disk at ``point``; a disk with under two contacts gets its full
    circumference."""
    if len(contacts) < 2:
        return 2.0 * math.pi * radius
    angles = np.sort(np.arctan2(contacts[:, 1] - point[1], contacts[:, 0] - point[0]))
    gaps = np.diff(angles)
    wrap = 2.0 * math.pi - (angles[-1] - angles[0])
    return float(max(gaps.max(initial=0.0), wrap)) * radius


def dimensional_weight(sk: WeightedSkeleton, b: BinaryMap) -> WeightedSkeleton:
    """Fill each point's longest-free-arc weight from the contacts of its
    maximal disk (boundary pixels within radius + 0.5)."""
    if len(sk) == 0:
        return WeightedSkeleton(
            t_index=sk.t_index, shape=sk.shape, xs=sk.xs, ys=sk.ys, radii=sk.radii,
            arc_weight=np.empty(0),
        )
    boundary = _boundary_pixels(b.bits.astype(bool))
    arcs = np.empty(len(sk))
    if len(boundary) == 0:
        arcs[:] = 2.0 * math.pi * sk.radii
    else:
        tree = cKDTree(boundary)
        points = np.column_stack([sk.xs, sk.ys]).astype(np.float64)
        hits = tree.query_ball_point(points, sk.radii + 0.5)
        for i, idx in enumerate(hits):
            arcs[i] = longest_free_arc(points[i], sk.radii[i], boundary[idx])
    return WeightedSkeleton(
        t_index=sk.t_index, shape=sk.shape, xs=sk.xs, ys=sk.ys, radii=sk.radii,
        arc_weight=arcs,
    )


def attach_geological_weight(sk: WeightedSkeleton, g: GeologicalWeightMap) -> WeightedSkeleton:
    """Sample the geological index at each point and form the combined
    prune weight as the exact product."""
    if sk.arc_weight is None:
        raise ValueError("dimensional weights must be filled first")
    if g.values.shape != sk.shape:
        raise ValueError("geological weight map dimensions do not match")
    geo = g.values[sk.xs, sk.ys]
    return WeightedSkeleton(
        t_index=sk.t_index, shape=sk.shape, xs=sk.xs, ys=sk.ys, radii=sk.radii,
        arc_weight=sk.arc_weight, geo_weight=geo, weight=sk.arc_weight * geo,
    )


def resolve_prune_threshold(sk: WeightedSkeleton, params: SkeletonParams) -> float:
    """Explicit threshold if set, otherwise the configured percentile of
    the section's combined weights."""
    if params.prune_threshold is not None:
        return params.prune_threshold
    if sk.weight is None or len(sk) == 0:
        return 0.0
    return float(np.percentile(sk.weight, params.prune_percentile))


def prune(sk: WeightedSkeleton, threshold: float) -> BinaryMap:
    """Keep skeleton points whose combined weight reaches the threshold
    (inclusive)."""
    if sk.weight is None:
        raise ValueError("combined weights must be filled before pruning")
    bits = np.zeros(sk.shape, dtype=bool)
    keep = sk.weight >= threshold
    bits[sk.xs[keep], sk.ys[keep]] = True
    return BinaryMap(t_index=sk.t_index, bits=bits, tag="skeleton_pruned")


def _neighbor_counts(mask: np.ndarray) -> np.ndarray:
    counts = ndimage.correlate(mask.astype(np.int64), _EIGHT, mode="constant", cval=0)
    return counts - mask


def _walk_branch(mask: np.ndarray, counts: np.ndarray, start):
    """Follow a degree-1 pixel along degree-2 pixels; returns the branch
    pixels up to (excluding) a junction, or None if none is reached."""
    nx, ny = mask.shape
    path = [start]
    prev = None
    current = start
    while True:
        neighbors = []
        cx, cy = current
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                q = (cx + dx, cy + dy)
                if 0 <= q[0] < nx and 0 <= q[1] < ny and mask[q] and q != prev:
                    neighbors.append(q)
        if not neighbors:
            return None  # isolated pixel or reached the far endpoint
        if len(neighbors) > 1 and current != start:
            return None  # walked into a junction without recognizing? safety
        nxt = neighbors[0]
        if counts[nxt] >= 3:
            return path
        if counts[nxt] == 1:
            return None  # pure path between two endpoints, not a branch
        prev, current = current, nxt
        path.append(current)


def _component_count(mask: np.ndarray) -> int:
    return ndimage.label(mask, structure=np.ones((3, 3), bool))[1]


def _break_full_blocks(mask: np.ndarray) -> None:
    """Clear remaining fully set 2x2 blocks that the topology-preserving
    thinning could not touch; prefer the deletion that keeps the global
    component count, fall back to an arbitrary (fixed-order) pixel."""
    while True:
        blocks = np.argwhere(
            mask[:-1, :-1] & mask[1:, :-1] & mask[:-1, 1:] & mask[1:, 1:]
        )
        if len(blocks) == 0:
            break
        bx, by = blocks[0]
        candidates = [(bx, by), (bx, by + 1), (bx + 1, by), (bx + 1, by + 1)]
        base = _component_count(mask)
        for p in candidates:
            mask[p] = False
            if _component_count(mask) <= base:
                break
            mask[p] = True
        else:
            mask[candidates[-1]] = False


def cleanup(b: BinaryMap, min_component: int, min_branch: int) -> BinaryMap:
    """Drop small components and short endpoint-to-junction branches, and
    clear any leftover 2x2 blocks; all passes repeat until stable."""
    mask = b.bits.astype(bool).copy()
    structure = np.ones((3, 3), bool)
    while True:
        before = mask.sum()

        labels, n = ndimage.label(mask, structure=structure)
        if n:
            sizes = np.bincount(labels.ravel())
            small = sizes < min_component
            small[0] = False
            mask[small[labels]] = False

        counts = _neighbor_counts(mask)
        endpoints = np.argwhere(mask & (counts == 1))
        to_remove = []
        for ex, ey in endpoints:
            branch = _walk_branch(mask, counts, (int(ex), int(ey)))
            if branch is not None and len(branch) < min_branch:
                to_remove.extend(branch)
        for px, py in to_remove:
            mask[px, py] = False

        _break_full_blocks(mask)

        if mask.sum() == before:
            break
    return BinaryMap(t_index=b.t_index, bits=mask, tag="fault_lines")
