"""Per-section pipeline orchestration.

The one place stage order is defined: semblance of the three neighboring
sections, RGB blend, color transforms, per-channel smooth + CLAHE +
threshold, gated combination, then weighted skeletonization and cleanup.
With the ablation flag the color path is bypassed entirely and the single
current-section semblance map feeds the enhancement chain.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import attributes, color, enhance, skeleton
from .attributes import SemblanceMap, SemblanceParams
from .color import IntensityMap
from .enhance import BinaryMap, EnhanceParams
from .skeleton import SkeletonParams, WeightedSkeleton
from .volume import SeismicVolume, extract_time_section


class PipelineStageError(RuntimeError):
    def __init__(self, stage: str, original: BaseException):
        super().__init__(f"stage {stage!r} failed: {original}")
        self.stage = stage
        self.original = original


@dataclass(frozen=True)
class PipelineParams:
    semblance: SemblanceParams = field(default_factory=SemblanceParams)
    enhance: EnhanceParams = field(default_factory=EnhanceParams)
    skeleton: SkeletonParams = field(default_factory=SkeletonParams)
    ablation: bool = False

    def to_dict(self) -> dict:
        return {
            "semblance": {
                "lateral_half_window": self.semblance.lateral_half_window,
                "vertical_half_window": self.semblance.vertical_half_window,
                "clamp_floor": self.semblance.clamp_floor,
            },
            "enhance": {
                "gaussian_sigma": self.enhance.gaussian_sigma,
                "gaussian_size": self.enhance.gaussian_size,
                "clahe_tiles": self.enhance.clahe_tiles,
                "clahe_clip": self.enhance.clahe_clip,
                "clahe_bins": self.enhance.clahe_bins,
                "threshold_l": self.enhance.threshold_l,
                "threshold_y": self.enhance.threshold_y,
                "threshold_v": self.enhance.threshold_v,
                "semblance_gate": self.enhance.semblance_gate,
            },
            "skeleton": {
                "prune_threshold": self.skeleton.prune_threshold,
                "prune_percentile": self.skeleton.prune_percentile,
                "min_component": self.skeleton.min_component,
                "min_branch": self.skeleton.min_branch,
                "geo_radius": self.skeleton.geo_radius,
            },
            "ablation": self.ablation,
        }

    @classmethod
    def from_dict(cls, doc: dict, base: "PipelineParams | None" = None) -> "PipelineParams":
        """Build params from a (possibly partial) document layered over
        ``base`` (defaults when omitted). Unknown keys are rejected."""
        base = base or cls()
        merged = base.to_dict()
        for section, value in doc.items():
            if section == "ablation":
                merged["ablation"] = bool(value)
                continue
            if section not in merged or not isinstance(value, dict):
                raise ValueError(f"unknown parameter section {section!r}")
            for key, v in value.items():
                if key not in merged[section]:
                    raise ValueError(f"unknown parameter {section}.{key}")
                merged[section][key] = v
        return cls(
            semblance=SemblanceParams(**merged["semblance"]),
            enhance=EnhanceParams(**merged["enhance"]),
            skeleton=SkeletonParams(**merged["skeleton"]),
            ablation=merged["ablation"],
        )


@dataclass(frozen=True)
class PipelineResult:
    t_index: int
    semblance_prev: SemblanceMap
    semblance_cur: SemblanceMap
    semblance_next: SemblanceMap
    blended: color.BlendedImage | None
    intensity: dict | None          # channel -> IntensityMap (smoothed+equalized)
    channel_binaries: dict | None   # channel -> BinaryMap
    combined: BinaryMap
    discontinuity: attributes.DiscontinuityMap
    geo_weight: attributes.GeologicalWeightMap
    skeleton: WeightedSkeleton
    prune_threshold: float
    pruned: BinaryMap
    fault_lines: BinaryMap
    timings_ms: dict


def _stage(timings: dict, name: str, fn, *args, **kwargs):
    start = time.perf_counter()
    try:
        result = fn(*args, **kwargs)
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError(name, exc) from exc
    timings[name] = timings.get(name, 0.0) + (time.perf_counter() - start) * 1000.0
    return result


def _channel_chain(m: IntensityMap, params: EnhanceParams, threshold: float,
                   timings: dict) -> BinaryMap:
    smoothed = _stage(timings, "enhance", enhance.gaussian_smooth,
                      m, params.gaussian_sigma, params.gaussian_size)
    equalized = _stage(timings, "enhance", enhance.clahe,
                       smoothed, params.clahe_tiles, params.clahe_clip, params.clahe_bins)
    return _stage(timings, "enhance", enhance.threshold_channel, equalized, threshold)


def run_section(volume: SeismicVolume, t: int, params: PipelineParams) -> PipelineResult:
    """Run the full (or ablated) chain for one section, keeping every
    intermediate product in the result."""
    n_time = volume.header.n_time
    if not 0 <= t < n_time:
        raise IndexError(f"time index {t} out of range [0, {n_time})")
    timings: dict = {}

    d_cur = _stage(timings, "semblance", attributes.semblance, volume, t, params.semblance)
    d_prev = (
        _stage(timings, "semblance", attributes.semblance, volume, t - 1, params.semblance)
        if t - 1 >= 0 else d_cur
    )
    d_next = (
        _stage(timings, "semblance", attributes.semblance, volume, t + 1, params.semblance)
        if t + 1 < n_time else d_cur
    )

    blended = None
    intensity = None
    channel_binaries = None
    if params.ablation:
        base = IntensityMap(t_index=t, channel="S", values=d_cur.values)
        single = _channel_chain(base, params.enhance, params.enhance.threshold_l, timings)
        combined = BinaryMap(t_index=t, bits=single.bits, tag="combined")
    else:
        blended = _stage(timings, "blend", color.blend_rgb, d_prev, d_cur, d_next)
        lab = _stage(timings, "color_transform", color.rgb_to_lab, blended)
        ycbcr = _stage(timings, "color_transform", color.rgb_to_ycbcr, blended)
        hsv = _stage(timings, "color_transform", color.rgb_to_hsv, blended)
        raw = {
            "L": color.extract_intensity(lab, "L"),
            "Y": color.extract_intensity(ycbcr, "Y"),
            "V": color.extract_intensity(hsv, "V"),
        }
        intensity = {}
        channel_binaries = {}
        for channel, m in raw.items():
            smoothed = _stage(timings, "enhance", enhance.gaussian_smooth,
                              m, params.enhance.gaussian_sigma, params.enhance.gaussian_size)
            equalized = _stage(timings, "enhance", enhance.clahe, smoothed,
                               params.enhance.clahe_tiles, params.enhance.clahe_clip,
                               params.enhance.clahe_bins)
            intensity[channel] = equalized
            channel_binaries[channel] = _stage(
                timings, "enhance", enhance.threshold_channel,
                equalized, params.enhance.threshold_for(channel),
            )
        combined = _stage(
            timings, "combine", enhance.combine_binary,
            channel_binaries["L"], channel_binaries["Y"], channel_binaries["V"],
            d_cur, params.enhance.semblance_gate,
        )

    dhat = _stage(timings, "discontinuity", attributes.discontinuity_map,
                  d_prev, d_cur, d_next, params.semblance.clamp_floor)
    section = extract_time_section(volume, t)
    geo = _stage(timings, "geological_weight", attributes.geological_weight,
                 dhat, section, params.skeleton.geo_radius)

    sk = _stage(timings, "medial_axis", skeleton.medial_axis, combined)
    sk = _stage(timings, "dimensional_weight", skeleton.dimensional_weight, sk, combined)
    sk = _stage(timings, "attach_weight", skeleton.attach_geological_weight, sk, geo)
    threshold = skeleton.resolve_prune_threshold(sk, params.skeleton)
    pruned = _stage(timings, "prune", skeleton.prune, sk, threshold)
    lines = _stage(timings, "cleanup", skeleton.cleanup, pruned,
                   params.skeleton.min_component, params.skeleton.min_branch)

    return PipelineResult(
        t_index=t,
        semblance_prev=d_prev,
        semblance_cur=d_cur,
        semblance_next=d_next,
        blended=blended,
        intensity=intensity,
        channel_binaries=channel_binaries,
        combined=combined,
        discontinuity=dhat,
        geo_weight=geo,
        skeleton=sk,
        prune_threshold=threshold,
        pruned=pruned,
        fault_lines=lines,
        timings_ms=timings,
    )


def run_volume(volume: SeismicVolume, t_indices, params: PipelineParams, workers: int | None = None):
    """Run sections independently (optionally in a thread pool); failures
    are collected per section instead of aborting the batch.

    Returns (results sorted by t, {t: error}).
    """
    t_indices = list(t_indices)
    results = []
    errors = {}

    def one(t):
        return t, run_section(volume, t, params)

    if workers is not None and workers > 1 and len(t_indices) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(one, t): t for t in t_indices}
            for future, t in futures.items():
                try:
                    results.append(future.result()[1])
                except Exception as exc:
                    errors[t] = exc
    else:
        for t in t_indices:
            try:
                results.append(one(t)[1])
            except Exception as exc:
                errors[t] = exc
    results.sort(key=lambda r: r.t_index)
    return results, errors
