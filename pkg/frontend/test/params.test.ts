import { describe, expect, it } from 'vitest';

import {
  cloneParams,
  exportParams,
  getParam,
  setParam,
  SLIDERS,
  type PipelineParams,
} from '../src/params.js';
import { DEFAULTS } from './fixtures.js';

describe('setParam', () => {
  it('updates a nested value without mutating the source', () => {
    const { params } = setParam(DEFAULTS, 'enhance.threshold_l', 0.3);
    expect(params.enhance.threshold_l).toBe(0.3);
    expect(DEFAULTS.enhance.threshold_l).toBe(0.55);
  });

  it('clamps out-of-bounds values and reports it', () => {
    const low = setParam(DEFAULTS, 'enhance.threshold_l', -4);
    expect(low.clamped).toBe(true);
    expect(low.params.enhance.threshold_l).toBe(0.01);
    const high = setParam(DEFAULTS, 'skeleton.prune_threshold', 1e12);
    expect(high.clamped).toBe(true);
    expect(high.params.skeleton.prune_threshold).toBe(10000);
    const fine = setParam(DEFAULTS, 'enhance.semblance_gate', 0.5);
    expect(fine.clamped).toBe(false);
  });

  it('supports the auto prune threshold (null)', () => {
    const explicit = setParam(DEFAULTS, 'skeleton.prune_threshold', 12).params;
    expect(explicit.skeleton.prune_threshold).toBe(12);
    const auto = setParam(explicit, 'skeleton.prune_threshold', null).params;
    expect(auto.skeleton.prune_threshold).toBeNull();
  });

  it('rejects unknown paths and illegal nulls', () => {
    expect(() => setParam(DEFAULTS, 'enhance.bogus' as never, 1)).toThrow(/unknown/);
    expect(() => setParam(DEFAULTS, 'enhance.threshold_l', null)).toThrow(/cannot be unset/);
  });

  it('toggles ablation as a boolean', () => {
    const { params } = setParam(DEFAULTS, 'ablation', true);
    expect(params.ablation).toBe(true);
  });
});

describe('slider schema', () => {
  it('covers the interpreter-facing parameters', () => {
    const paths = SLIDERS.map((s) => s.path);
    for (const expected of [
      'enhance.threshold_l',
      'enhance.threshold_y',
      'enhance.threshold_v',
      'enhance.semblance_gate',
      'skeleton.prune_threshold',
      'enhance.clahe_clip',
      'enhance.clahe_tiles',
      'enhance.gaussian_sigma',
      'enhance.gaussian_size',
    ]) {
      expect(paths).toContain(expected);
    }
  });

  it('default values sit inside every slider range', () => {
    for (const spec of SLIDERS) {
      const value = getParam(DEFAULTS, spec.path);
      if (value === null) continue; // auto prune threshold
      expect(typeof value).toBe('number');
      expect(value as number).toBeGreaterThanOrEqual(spec.min);
      expect(value as number).toBeLessThanOrEqual(spec.max);
    }
  });
});

describe('exportParams', () => {
  it('round-trips through JSON unchanged', () => {
    const doc = JSON.parse(exportParams(DEFAULTS)) as PipelineParams;
    expect(doc).toEqual(DEFAULTS);
  });

  it('differs only in the edited field after one adjustment', () => {
    const edited = setParam(DEFAULTS, 'enhance.semblance_gate', 0.33).params;
    const before = JSON.parse(exportParams(DEFAULTS));
    const after = JSON.parse(exportParams(edited));
    before.enhance.semblance_gate = 0.33;
    expect(after).toEqual(before);
  });

  it('cloneParams produces an independent deep copy', () => {
    const copy = cloneParams(DEFAULTS);
    copy.enhance.threshold_y = 0.1;
    expect(DEFAULTS.enhance.threshold_y).toBe(0.55);
  });
});
