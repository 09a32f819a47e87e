// Session state and the request loop: parameter edits are debounced, at
// most one run is in flight, and stale responses are discarded by
// sequence number so rapid interaction always settles on the latest
// parameters. The console never recomputes pipeline math; everything
// displayed comes from a RunResponse.

import type { ApiClient, RunResponse } from './api.js';
import {
  cloneParams,
  exportParams,
  getParam,
  setParam,
  type ParamPath,
  type PipelineParams,
} from './params.js';

export const DEBOUNCE_MS = 150;

export interface LayerEntry {
  name: string;
  opacity: number; // 0..1
  visible: boolean;
}

export const DEFAULT_LAYER_STACK: LayerEntry[] = [
  { name: 'semblance', opacity: 1.0, visible: true },
  { name: 'blended', opacity: 0.0, visible: false },
  { name: 'combined', opacity: 0.35, visible: false },
  { name: 'fault_lines', opacity: 1.0, visible: true },
  { name: 'overlay', opacity: 0.0, visible: false },
];

export interface Scheduler {
  set(fn: () => void, ms: number): number;
  clear(id: number): void;
}

const timerScheduler: Scheduler = {
  set: (fn, ms) => setTimeout(fn, ms) as unknown as number,
  clear: (id) => clearTimeout(id as unknown as ReturnType<typeof setTimeout>),
};

export interface SessionEvents {
  onResponse?: (response: RunResponse) => void;
  onClamped?: (path: ParamPath) => void;
  onNotice?: (message: string) => void;
  onError?: (message: string) => void;
}

export class Session {
  tIndex = 0;
  params: PipelineParams;
  layerStack: LayerEntry[] = DEFAULT_LAYER_STACK.map((l) => ({ ...l }));
  lastResponse: RunResponse | null = null;
  requestInFlight = false;

  private nTime: number;
  private nextSeq = 1;
  private renderedSeq = 0;
  private dirtyWhileInFlight = false;
  private debounceId: number | null = null;

  constructor(
    private api: ApiClient,
    defaults: PipelineParams,
    nTime: number,
    private events: SessionEvents = {},
    private scheduler: Scheduler = timerScheduler,
  ) {
    this.params = cloneParams(defaults);
    this.nTime = nTime;
  }

  /** Update one parameter; out-of-range values are clamped and reported.
   * Schedules a debounced run. */
  adjustParameter(path: ParamPath, value: number | boolean | null): void {
    const { params, clamped } = setParam(this.params, path, value);
    this.params = params;
    if (clamped) {
      this.events.onClamped?.(path);
    }
    this.scheduleRun();
  }

  parameter(path: ParamPath): number | boolean | null {
    return getParam(this.params, path);
  }

  /** Move to another section (delta or absolute), clamped to the volume
   * range; dispatches a debounced run with the current parameters. */
  navigateSection(target: { delta?: number; absolute?: number }): void {
    let t = target.absolute ?? this.tIndex + (target.delta ?? 0);
    if (t < 0 || t >= this.nTime) {
      t = Math.min(Math.max(t, 0), this.nTime - 1);
      this.events.onNotice?.(`section clamped to ${t}`);
    }
    this.tIndex = t;
    this.scheduleRun();
  }

  /** Current parameters as the CLI-compatible JSON document. */
  exportSession(): string {
    return exportParams(this.params);
  }

  setLayer(name: string, patch: Partial<Omit<LayerEntry, 'name'>>): void {
    const entry = this.layerStack.find((l) => l.name === name);
    if (entry) {
      Object.assign(entry, patch);
    }
  }

  requestedLayers(): string[] {
    return this.layerStack.map((l) => l.name);
  }

  scheduleRun(): void {
    if (this.debounceId !== null) {
      this.scheduler.clear(this.debounceId);
    }
    this.debounceId = this.scheduler.set(() => {
      this.debounceId = null;
      void this.dispatch();
    }, DEBOUNCE_MS);
  }

  /** Fire immediately (initial load, section jump buttons). */
  runNow(): Promise<void> {
    if (this.debounceId !== null) {
      this.scheduler.clear(this.debounceId);
      this.debounceId = null;
    }
    return this.dispatch();
  }

  private async dispatch(): Promise<void> {
    if (this.requestInFlight) {
      this.dirtyWhileInFlight = true;
      return;
    }
    const seq = this.nextSeq++;
    this.requestInFlight = true;
    try {
      const response = await this.api.run({
        t_index: this.tIndex,
        params: this.params,
        layers: this.requestedLayers(),
      });
      if (seq > this.renderedSeq) {
        this.renderedSeq = seq;
        this.lastResponse = response;
        this.events.onResponse?.(response);
      }
    } catch (error) {
      this.events.onError?.(String(error));
    } finally {
      this.requestInFlight = false;
      if (this.dirtyWhileInFlight) {
        this.dirtyWhileInFlight = false;
        void this.dispatch();
      }
    }
  }
}
