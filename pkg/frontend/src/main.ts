// DOM wiring for the tuning console.

import { ApiClient } from './api.js';
import { getParam, SLIDERS, type ParamPath } from './params.js';
import { drawLayers, formatScore } from './render.js';
import { Session } from './state.js';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

async function boot(): Promise<void> {
  const api = new ApiClient();
  const status = el<HTMLDivElement>('status');
  let info;
  let defaults;
  try {
    [info, defaults] = await Promise.all([api.volumeInfo(), api.defaultParams()]);
  } catch (error) {
    status.textContent = `service unavailable: ${error}`;
    return;
  }

  const canvas = el<HTMLCanvasElement>('view');
  const score = el<HTMLDivElement>('score');
  const notice = el<HTMLDivElement>('notice');
  const timing = el<HTMLDivElement>('timing');

  const session = new Session(api, defaults, info.header.n_time, {
    onResponse: (response) => {
      void drawLayers(canvas, response, session.layerStack);
      score.textContent = formatScore(response);
      const total = Object.values(response.timings_ms).reduce((a, b) => a + b, 0);
      timing.textContent =
        `section ${response.t_index} · ${total.toFixed(0)} ms · ` +
        `T_W used ${response.prune_threshold.toFixed(2)}`;
      sectionInput.value = String(response.t_index);
    },
    onClamped: (path) => flash(`${path} clamped to its valid range`),
    onNotice: (message) => flash(message),
    onError: (message) => flash(message),
  });

  let flashTimer: number | undefined;
  function flash(message: string): void {
    notice.textContent = message;
    notice.classList.add('visible');
    window.clearTimeout(flashTimer);
    flashTimer = window.setTimeout(() => notice.classList.remove('visible'), 2500);
  }

  // section navigation
  const sectionInput = el<HTMLInputElement>('section');
  sectionInput.max = String(info.header.n_time - 1);
  sectionInput.addEventListener('change', () => {
    session.navigateSection({ absolute: Number(sectionInput.value) });
  });
  el<HTMLButtonElement>('prev').addEventListener('click', () => {
    session.navigateSection({ delta: -1 });
  });
  el<HTMLButtonElement>('next').addEventListener('click', () => {
    session.navigateSection({ delta: 1 });
  });

  // parameter sliders
  const sliderBox = el<HTMLDivElement>('sliders');
  for (const spec of SLIDERS) {
    const row = document.createElement('label');
    row.className = 'slider-row';
    const title = document.createElement('span');
    title.textContent = spec.label;
    const input = document.createElement('input');
    input.type = 'range';
    input.min = String(spec.min);
    input.max = String(spec.max);
    input.step = String(spec.step);
    const value = document.createElement('output');

    const current = getParam(session.params, spec.path);
    const isAutoPrune = spec.path === 'skeleton.prune_threshold' && current === null;
    input.value = isAutoPrune ? '0' : String(current);
    value.textContent = isAutoPrune ? 'auto' : String(current);

    input.addEventListener('input', () => {
      session.adjustParameter(spec.path, Number(input.value));
      value.textContent = input.value;
    });
    row.append(title, input, value);
    sliderBox.appendChild(row);

    if (spec.path === 'skeleton.prune_threshold') {
      const auto = document.createElement('label');
      auto.className = 'auto-toggle';
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.checked = isAutoPrune;
      box.addEventListener('change', () => {
        if (box.checked) {
          session.adjustParameter('skeleton.prune_threshold', null);
          value.textContent = 'auto';
        } else {
          session.adjustParameter('skeleton.prune_threshold', Number(input.value));
          value.textContent = input.value;
        }
      });
      auto.append(box, document.createTextNode('auto (percentile)'));
      sliderBox.appendChild(auto);
    }
  }

  // ablation toggle
  const ablation = el<HTMLInputElement>('ablation');
  ablation.addEventListener('change', () => {
    session.adjustParameter('ablation', ablation.checked);
  });

  // layer stack controls
  const layerBox = el<HTMLDivElement>('layers');
  for (const layer of session.layerStack) {
    const row = document.createElement('label');
    row.className = 'layer-row';
    const visible = document.createElement('input');
    visible.type = 'checkbox';
    visible.checked = layer.visible;
    const name = document.createElement('span');
    name.textContent = layer.name;
    const opacity = document.createElement('input');
    opacity.type = 'range';
    opacity.min = '0';
    opacity.max = '1';
    opacity.step = '0.05';
    opacity.value = String(layer.opacity);
    const redraw = () => {
      session.setLayer(layer.name, {
        visible: visible.checked,
        opacity: Number(opacity.value),
      });
      if (session.lastResponse) {
        void drawLayers(canvas, session.lastResponse, session.layerStack);
      }
    };
    visible.addEventListener('change', redraw);
    opacity.addEventListener('input', redraw);
    row.append(visible, name, opacity);
    layerBox.appendChild(row);
  }

  // params export (same document the CLI consumes via --params)
  el<HTMLButtonElement>('export').addEventListener('click', () => {
    const blob = new Blob([session.exportSession()], { type: 'application/json' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'seisfault-params.json';
    link.click();
    URL.revokeObjectURL(link.href);
  });

  status.textContent =
    `${info.header.n_inline}x${info.header.n_crossline} sections, ` +
    `t 0..${info.header.n_time - 1}` +
    (info.has_truth ? ', ground truth loaded' : '');

  session.navigateSection({ absolute: Math.floor(info.header.n_time / 2) });
  await session.runNow();
}

void boot();
