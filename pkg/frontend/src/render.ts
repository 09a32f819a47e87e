// Canvas compositing of the layer stack: each layer is a base64 PNG from
// the service, drawn bottom-up with its own opacity.

import type { RunResponse } from './api.js';
import type { LayerEntry } from './state.js';

const imageCache = new Map<string, HTMLImageElement>();

function loadLayerImage(b64: string): Promise<HTMLImageElement> {
  const cached = imageCache.get(b64);
  if (cached) {
    return Promise.resolve(cached);
  }
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => {
      if (imageCache.size > 64) {
        imageCache.clear();
      }
      imageCache.set(b64, img);
      resolve(img);
    };
    img.onerror = () => reject(new Error('layer image failed to decode'));
    img.src = 'data:image/png;base64,' + b64;
  });
}

export async function drawLayers(
  canvas: HTMLCanvasElement,
  response: RunResponse,
  stack: LayerEntry[],
): Promise<void> {
  const names = stack.filter((l) => l.visible && l.opacity > 0 && response.layers[l.name]);
  const images = await Promise.all(names.map((l) => loadLayerImage(response.layers[l.name])));
  if (images.length === 0) {
    return;
  }
  canvas.width = images[0].width;
  canvas.height = images[0].height;
  const ctx = canvas.getContext('2d');
  if (!ctx) {
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.imageSmoothingEnabled = false;
  names.forEach((layer, i) => {
    ctx.globalAlpha = layer.opacity;
    ctx.drawImage(images[i], 0, 0);
  });
  ctx.globalAlpha = 1.0;
}

export function formatScore(response: RunResponse): string {
  const report = response.report;
  if (!report) {
    return 'no ground truth loaded';
  }
  if (report.mean_symmetric === null) {
    return `no detection (gt ${report.gt_count} px)`;
  }
  return (
    `dist ${report.mean_symmetric.toFixed(4)} px ` +
    `(det->gt ${report.mean_directed_det_to_gt?.toFixed(4)}, ` +
    `gt->det ${report.mean_directed_gt_to_det?.toFixed(4)}; ` +
    `${report.detected_count} detected px)`
  );
}
