// Typed client for the tuning service. The fetch implementation is
// injectable so the session logic can be tested without a network.

import type { PipelineParams } from './params.js';

export interface VolumeInfo {
  header: {
    n_time: number;
    n_inline: number;
    n_crossline: number;
    dt_ms: number;
    t0_ms: number;
    inline_origin: number;
    crossline_origin: number;
  };
  has_truth: boolean;
}

export interface DistanceReport {
  t_index: number;
  mean_directed_det_to_gt: number | null;
  mean_directed_gt_to_det: number | null;
  mean_symmetric: number | null;
  euclid_mean_symmetric: number | null;
  detected_count: number;
  gt_count: number;
}

export interface RunResponse {
  t_index: number;
  layers: Record<string, string>; // layer name -> base64 PNG
  report: DistanceReport | null;
  timings_ms: Record<string, number>;
  prune_threshold: number;
  params: PipelineParams;
}

export interface RunRequest {
  t_index: number;
  params: PipelineParams;
  layers: string[];
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) {
      throw new Error(`${path}: HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }

  volumeInfo(): Promise<VolumeInfo> {
    return this.getJson('/api/volume');
  }

  defaultParams(): Promise<PipelineParams> {
    return this.getJson('/api/params/default');
  }

  async run(request: RunRequest): Promise<RunResponse> {
    const response = await this.fetchImpl(this.baseUrl + '/api/run', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(request),
    });
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        detail = ((await response.json()) as { detail?: string }).detail ?? detail;
      } catch {
        // keep the status text
      }
      throw new Error(`run failed: ${detail}`);
    }
    return (await response.json()) as RunResponse;
  }
}
