"""HTTP API for the interactive tuning console.

One volume is loaded at startup and never mutated; every POST /api/run
executes the pipeline for one section with request-supplied parameter
overrides and returns the requested layers as base64 PNGs, plus the
distance report when ground truth is available.
"""

from __future__ import annotations

import base64
import io
import os

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import evaluate, pipeline
from .evaluate import render_overlay, to_gray_u8
from .pipeline import PipelineParams

LAYER_NAMES = (
    "amplitude",
    "semblance",
    "blended",
    "intensity_l",
    "intensity_y",
    "intensity_v",
    "binary_l",
    "binary_y",
    "binary_v",
    "combined",
    "skeleton",
    "fault_lines",
    "overlay",
)


class RunRequest(BaseModel):
    t_index: int
    params: dict = {}
    layers: list[str] = list(LAYER_NAMES)


def _png_b64(image) -> str:
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _unit_gray(values: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)


def _gray_image(u8: np.ndarray):
    from PIL import Image

    return Image.fromarray(np.stack([u8, u8, u8], axis=-1), mode="RGB")


def _binary_image(bits: np.ndarray):
    return _gray_image(np.where(bits, 255, 0).astype(np.uint8))


def _render_layers(result: pipeline.PipelineResult, volume, layers):
    available = {}
    available["amplitude"] = lambda: _gray_image(to_gray_u8(volume.amplitude[result.t_index]))
    available["semblance"] = lambda: _gray_image(_unit_gray(result.semblance_cur.values))
    if result.blended is not None:
        available["blended"] = lambda: _rgb_image(result.blended.pixels)
    if result.intensity is not None:
        for channel in ("l", "y", "v"):
            m = result.intensity[channel.upper()]
            available[f"intensity_{channel}"] = (
                lambda m=m: _gray_image(_unit_gray(m.values))
            )
    if result.channel_binaries is not None:
        for channel in ("l", "y", "v"):
            b = result.channel_binaries[channel.upper()]
            available[f"binary_{channel}"] = lambda b=b: _binary_image(b.bits)
    available["combined"] = lambda: _binary_image(result.combined.bits)
    available["skeleton"] = lambda: _binary_image(result.pruned.bits)
    available["fault_lines"] = lambda: _binary_image(result.fault_lines.bits)
    available["overlay"] = lambda: render_overlay(
        result.semblance_cur.values, result.fault_lines.bits
    )
    return {name: _png_b64(available[name]()) for name in layers if name in available}


def _rgb_image(pixels: np.ndarray):
    from PIL import Image

    return Image.fromarray(
        np.rint(np.clip(pixels, 0.0, 1.0) * 255.0).astype(np.uint8), mode="RGB"
    )


def create_app(volume=None, truth=None, static_dir=None) -> FastAPI:
    app = FastAPI(title="seisfault tuning service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    truth_by_t = {g.t_index: g for g in truth} if truth else {}

    @app.get("/api/volume")
    def get_volume():
        if volume is None:
            raise HTTPException(status_code=503, detail="no volume loaded")
        return {
            "header": volume.header.to_dict(),
            "has_truth": bool(truth_by_t),
        }

    @app.get("/api/params/default")
    def get_default_params():
        return PipelineParams().to_dict()

    @app.post("/api/run")
    def run(request: RunRequest):
        if volume is None:
            raise HTTPException(status_code=503, detail="no volume loaded")
        for layer in request.layers:
            if layer not in LAYER_NAMES:
                raise HTTPException(status_code=400, detail=f"unknown layer {layer!r}")
        try:
            params = PipelineParams.from_dict(request.params)
        except (TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"invalid params: {exc}")
        if not 0 <= request.t_index < volume.header.n_time:
            raise HTTPException(
                status_code=404,
                detail=f"t_index {request.t_index} outside [0, {volume.header.n_time})",
            )
        result = pipeline.run_section(volume, request.t_index, params)
        layers = _render_layers(result, volume, request.layers)
        report = None
        if request.t_index in truth_by_t:
            report = evaluate.average_distance(
                result.fault_lines, truth_by_t[request.t_index]
            ).to_dict()
        return {
            "t_index": request.t_index,
            "layers": layers,
            "report": report,
            "timings_ms": {k: round(v, 3) for k, v in result.timings_ms.items()},
            "prune_threshold": result.prune_threshold,
            "params": params.to_dict(),
        }

    if static_dir is None:
        candidate = os.path.join(os.path.dirname(__file__), "..", "..", "frontend", "dist")
        static_dir = candidate if os.path.isdir(candidate) else None
    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")
    return app
