// Pipeline parameter document: the same JSON shape the CLI accepts via
// --params and the service echoes back from /api/run.

export interface SemblanceParams {
  lateral_half_window: number;
  vertical_half_window: number;
  clamp_floor: number;
}

export interface EnhanceParams {
  gaussian_sigma: number;
  gaussian_size: number;
  clahe_tiles: number;
  clahe_clip: number;
  clahe_bins: number;
  threshold_l: number;
  threshold_y: number;
  threshold_v: number;
  semblance_gate: number;
}

export interface SkeletonParams {
  prune_threshold: number | null; // null -> per-section percentile rule
  prune_percentile: number;
  min_component: number;
  min_branch: number;
  geo_radius: number;
}

export interface PipelineParams {
  semblance: SemblanceParams;
  enhance: EnhanceParams;
  skeleton: SkeletonParams;
  ablation: boolean;
}

export type ParamPath =
  | `semblance.${keyof SemblanceParams}`
  | `enhance.${keyof EnhanceParams}`
  | `skeleton.${Exclude<keyof SkeletonParams, 'prune_threshold'>}`
  | 'skeleton.prune_threshold'
  | 'ablation';

export interface SliderSpec {
  path: ParamPath;
  label: string;
  min: number;
  max: number;
  step: number;
}

// Bounds mirror the parameter invariants enforced server-side; the slider
// clamps before dispatch so the service never sees an invalid document.
export const SLIDERS: SliderSpec[] = [
  { path: 'enhance.threshold_l', label: 'T_L (lightness)', min: 0.01, max: 0.99, step: 0.01 },
  { path: 'enhance.threshold_y', label: 'T_Y (luma)', min: 0.01, max: 0.99, step: 0.01 },
  { path: 'enhance.threshold_v', label: 'T_V (value)', min: 0.01, max: 0.99, step: 0.01 },
  { path: 'enhance.semblance_gate', label: 'T_C (semblance gate)', min: 0.01, max: 0.99, step: 0.01 },
  { path: 'skeleton.prune_threshold', label: 'T_W (prune weight)', min: 0, max: 10000, step: 1 },
  { path: 'enhance.clahe_clip', label: 'CLAHE clip', min: 1, max: 256, step: 1 },
  { path: 'enhance.clahe_tiles', label: 'CLAHE tiles', min: 1, max: 16, step: 1 },
  { path: 'enhance.gaussian_sigma', label: 'smooth sigma', min: 0.5, max: 20, step: 0.5 },
  { path: 'enhance.gaussian_size', label: 'smooth kernel', min: 1, max: 9, step: 1 },
];

export function cloneParams(p: PipelineParams): PipelineParams {
  return JSON.parse(JSON.stringify(p)) as PipelineParams;
}

export interface SetResult {
  params: PipelineParams;
  clamped: boolean; // true when the value was pulled back into bounds
}

export function sliderFor(path: ParamPath): SliderSpec | undefined {
  return SLIDERS.find((s) => s.path === path);
}

/** Set one parameter by dotted path, clamping to the slider bounds. */
export function setParam(p: PipelineParams, path: ParamPath, value: number | boolean | null): SetResult {
  const next = cloneParams(p);
  let clamped = false;
  if (path === 'ablation') {
    next.ablation = Boolean(value);
    return { params: next, clamped };
  }
  const [section, key] = path.split('.') as [keyof PipelineParams, string];
  const target = next[section] as unknown as Record<string, number | null>;
  if (!(key in target)) {
    throw new Error(`unknown parameter ${path}`);
  }
  if (value === null) {
    if (path !== 'skeleton.prune_threshold') {
      throw new Error(`${path} cannot be unset`);
    }
    target[key] = null;
    return { params: next, clamped };
  }
  let v = Number(value);
  const spec = sliderFor(path);
  if (spec) {
    if (v < spec.min) {
      v = spec.min;
      clamped = true;
    } else if (v > spec.max) {
      v = spec.max;
      clamped = true;
    }
  }
  target[key] = v;
  return { params: next, clamped };
}

export function getParam(p: PipelineParams, path: ParamPath): number | boolean | null {
  if (path === 'ablation') return p.ablation;
  const [section, key] = path.split('.') as [keyof PipelineParams, string];
  return (p[section] as unknown as Record<string, number | null>)[key];
}

/** Serialize exactly as the CLI params format (plain JSON document). */
export function exportParams(p: PipelineParams): string {
  return JSON.stringify(p, null, 2);
}
