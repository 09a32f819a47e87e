import type { PipelineParams } from '../src/params.js';

// Mirrors GET /api/params/default.
export const DEFAULTS: PipelineParams = {
  semblance: { lateral_half_window: 1, vertical_half_window: 2, clamp_floor: 1e-6 },
  enhance: {
    gaussian_sigma: 10.0,
    gaussian_size: 2,
    clahe_tiles: 8,
    clahe_clip: 64.0,
    clahe_bins: 64,
    threshold_l: 0.55,
    threshold_y: 0.55,
    threshold_v: 0.55,
    semblance_gate: 0.8,
  },
  skeleton: {
    prune_threshold: null,
    prune_percentile: 0.0,
    min_component: 10,
    min_branch: 5,
    geo_radius: 2,
  },
  ablation: false,
};
