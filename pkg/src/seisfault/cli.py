"""Command-line entry point: synthesize volumes, batch-run the pipeline,
evaluate detections, export section images, and launch the HTTP service.

Exit codes: 0 success, 2 validation, 3 I/O, 4 internal stage failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import evaluate, pipeline, volume as vol
from .pipeline import PipelineParams, PipelineStageError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_STAGE = 4


class ValidationError(ValueError):
    pass


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from exc


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _apply_override(doc: dict, spec: str) -> None:
    """Apply one 'section.key=value' override in place; values parse as JSON
    with a bare-string fallback."""
    if "=" not in spec:
        raise ValidationError(f"override {spec!r} is not of the form section.key=value")
    path, raw = spec.split("=", 1)
    parts = path.split(".")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    target = doc
    for part in parts[:-1]:
        target = target.setdefault(part, {})
        if not isinstance(target, dict):
            raise ValidationError(f"override path {path!r} does not name a parameter")
    target[parts[-1]] = value


def build_params(args) -> PipelineParams:
    """Layered: built-in defaults < params file < command-line overrides."""
    doc = {}
    if getattr(args, "params", None):
        doc = _load_json(args.params)
    for override in getattr(args, "override", None) or []:
        _apply_override(doc, override)
    try:
        params = PipelineParams.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"invalid parameters: {exc}") from exc
    if getattr(args, "ablation", False):
        from dataclasses import replace
        params = replace(params, ablation=True)
    return params


def _t_range(args, n_time: int):
    t_from = args.t_from if args.t_from is not None else 0
    t_to = args.t_to if args.t_to is not None else n_time - 1
    if not (0 <= t_from <= t_to < n_time):
        raise ValidationError(
            f"t range [{t_from}, {t_to}] outside volume time range [0, {n_time - 1}]"
        )
    return range(t_from, t_to + 1)


def cmd_synth(args) -> int:
    doc = _load_json(args.spec)
    try:
        spec = vol.SyntheticSpec.from_dict(doc)
        generated, truth = vol.generate_synthetic(spec)
    except (TypeError, ValueError, KeyError) as exc:
        raise ValidationError(f"invalid synthetic spec: {exc}") from exc
    vol.save_volume(generated, args.out)
    truth_path = args.truth_out or os.path.splitext(args.out)[0] + ".truth.json"
    vol.save_ground_truth(truth, truth_path)
    print(f"wrote {args.out} and {truth_path}")
    return EXIT_OK


def cmd_run(args) -> int:
    params = build_params(args)
    loaded = vol.load_volume(args.volume)
    t_indices = _t_range(args, loaded.header.n_time)

    out_dir = args.out
    os.makedirs(os.path.join(out_dir, "sections"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "overlays"), exist_ok=True)

    results, errors = pipeline.run_volume(loaded, t_indices, params, workers=args.workers)
    if errors:
        first_t = sorted(errors)[0]
        raise errors[first_t]

    outputs = []
    timings = {}
    for result in results:
        lines_path = os.path.join(out_dir, "sections", f"t_{result.t_index:04d}.json")
        overlay_path = os.path.join(out_dir, "overlays", f"t_{result.t_index:04d}.png")
        evaluate.save_fault_lines(result.fault_lines, lines_path)
        evaluate.export_overlay(result.semblance_cur.values, result.fault_lines, overlay_path)
        outputs.append(os.path.relpath(lines_path, out_dir))
        outputs.append(os.path.relpath(overlay_path, out_dir))
        timings[str(result.t_index)] = {k: round(v, 3) for k, v in result.timings_ms.items()}

    manifest = {
        "volume_sha256": _sha256(args.volume),
        "params": params.to_dict(),
        "t_from": t_indices.start,
        "t_to": t_indices.stop - 1,
        "outputs": sorted(outputs),
    }
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    # wall-clock timings live outside the manifest so repeated runs stay
    # byte-identical
    _write_json(os.path.join(out_dir, "timings.json"), timings)
    print(f"processed {len(results)} sections into {out_dir}")
    return EXIT_OK


def _load_lines_dir(lines_dir):
    sections_dir = os.path.join(lines_dir, "sections")
    if not os.path.isdir(sections_dir):
        sections_dir = lines_dir
    by_t = {}
    for name in sorted(os.listdir(sections_dir)):
        if name.endswith(".json") and name.startswith("t_"):
            t_index, pixels = evaluate.load_fault_lines(os.path.join(sections_dir, name))
            by_t[t_index] = pixels
    if not by_t:
        raise ValidationError(f"no fault-line documents found under {lines_dir}")
    return by_t


def cmd_eval(args) -> int:
    truth = {g.t_index: g for g in vol.load_ground_truth(args.truth)}
    labels = []
    reports_by_label = {}
    for entry in args.lines:
        label, _, path = entry.rpartition("=")
        label = label or os.path.basename(os.path.normpath(path))
        detected = _load_lines_dir(path)
        missing = sorted(set(detected) - set(truth))
        if missing:
            raise ValidationError(
                f"{path}: sections {missing} have no ground truth entries"
            )
        reports = [
            evaluate.report_from_pixels(t, detected[t], truth[t]) for t in sorted(detected)
        ]
        labels.append(label)
        reports_by_label[label] = reports

    rows = []
    t_common = sorted(set.intersection(*(
        {r.t_index for r in reports_by_label[label]} for label in labels
    )))
    for t in t_common:
        row = {"t_index": t}
        for label in labels:
            report = next(r for r in reports_by_label[label] if r.t_index == t)
            row[label] = report.mean_symmetric
        rows.append(row)
    table = evaluate.render_comparison_table(rows, columns=labels)
    print(table)

    out = args.out or "report.json"
    _write_json(out, {label: [r.to_dict() for r in rs] for label, rs in reports_by_label.items()})
    print(f"wrote {out}")
    return EXIT_OK


def cmd_export(args) -> int:
    loaded = vol.load_volume(args.volume)
    t_indices = _t_range(args, loaded.header.n_time)
    os.makedirs(args.out, exist_ok=True)
    from . import attributes
    from PIL import Image

    params = build_params(args)
    for t in t_indices:
        if args.layer == "amplitude":
            values = loaded.amplitude[t]
        elif args.layer == "semblance":
            values = attributes.semblance(loaded, t, params.semblance).values
        else:
            raise ValidationError(f"unknown layer {args.layer!r}")
        gray = evaluate.to_gray_u8(values)
        path = os.path.join(args.out, f"{args.layer}_t_{t:04d}.png")
        Image.fromarray(gray, mode="L").save(path, format="PNG")
    print(f"exported {len(t_indices)} {args.layer} images to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    loaded = vol.load_volume(args.volume)
    truth = vol.load_ground_truth(args.truth) if args.truth else None
    app = create_app(loaded, truth=truth)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seisfault",
        description="Fault-line extraction from 3D seismic volumes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic volume with fault ground truth")
    p.add_argument("--spec", required=True, help="synthetic spec JSON")
    p.add_argument("--out", required=True, help="output volume path")
    p.add_argument("--truth-out", help="ground-truth JSON path (default: <out>.truth.json)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="run the pipeline over a range of sections")
    p.add_argument("--volume", required=True)
    p.add_argument("--params", help="pipeline params JSON (partial allowed)")
    p.add_argument("-O", "--override", action="append", help="section.key=value override")
    p.add_argument("--t-from", type=int, default=None)
    p.add_argument("--t-to", type=int, default=None)
    p.add_argument("--out", required=True, help="run output directory")
    p.add_argument("--ablation", action="store_true", help="bypass the color path")
    p.add_argument("--workers", type=int, default=os.cpu_count())
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="score fault-line runs against ground truth")
    p.add_argument("--lines", action="append", required=True,
                   help="run directory (repeatable; prefix with label=)")
    p.add_argument("--truth", required=True, help="ground-truth JSON")
    p.add_argument("--out", help="report JSON path (default report.json)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export", help="export section images")
    p.add_argument("--volume", required=True)
    p.add_argument("--layer", default="semblance", choices=("amplitude", "semblance"))
    p.add_argument("--params", help="pipeline params JSON")
    p.add_argument("-O", "--override", action="append")
    p.add_argument("--t-from", type=int, default=None)
    p.add_argument("--t-to", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="serve the tuning API (and console, if built)")
    p.add_argument("--volume", required=True)
    p.add_argument("--truth", help="optional ground-truth JSON")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except vol.VolumeFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PipelineStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
