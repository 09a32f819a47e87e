import json
import os

import pytest

from seisfault.cli import main
from seisfault.volume import load_volume


@pytest.fixture
def synth_spec_doc():
    return {
        "header": {
            "n_time": 24, "n_inline": 40, "n_crossline": 40,
            "dt_ms": 4.0, "t0_ms": 1200.0, "inline_origin": 0, "crossline_origin": 0,
        },
        "layer_count": 8,
        "layer_seed": 3,
        "faults": [
            {"strike_deg": 90.0, "dip_deg": 90.0, "throw": 3, "x0": 20.0, "y0": 20.0}
        ],
        "wavelet_freq_hz": 30.0,
        "noise_ratio": 0.05,
        "seed": 9,
    }


@pytest.fixture
def synth_files(tmp_path, synth_spec_doc):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(synth_spec_doc))
    vol_path = tmp_path / "vol.svol"
    truth_path = tmp_path / "truth.json"
    rc = main(["synth", "--spec", str(spec_path), "--out", str(vol_path),
               "--truth-out", str(truth_path)])
    assert rc == 0
    return vol_path, truth_path


class TestSynth:
    def test_outputs_created_and_loadable(self, synth_files):
        vol_path, truth_path = synth_files
        v = load_volume(vol_path)
        assert v.header.n_time == 24
        truth = json.loads(truth_path.read_text())
        assert any(entry["pixels"] for entry in truth)

    def test_invalid_spec_exit_2(self, tmp_path, synth_spec_doc):
        synth_spec_doc["faults"][0]["throw"] = 0
        spec_path = tmp_path / "bad.json"
        spec_path.write_text(json.dumps(synth_spec_doc))
        rc = main(["synth", "--spec", str(spec_path), "--out", str(tmp_path / "v.svol")])
        assert rc == 2

    def test_repeat_synth_identical_files(self, tmp_path, synth_spec_doc):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(synth_spec_doc))
        paths = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.svol"
            truth = tmp_path / f"{name}.truth.json"
            assert main(["synth", "--spec", str(spec_path), "--out", str(out),
                         "--truth-out", str(truth)]) == 0
            paths.append((out, truth))
        assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
        assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


class TestRun:
    def test_run_produces_artifacts(self, synth_files, tmp_path):
        vol_path, _ = synth_files
        out_dir = tmp_path / "run"
        rc = main(["run", "--volume", str(vol_path), "--t-from", "8", "--t-to", "11",
                   "--out", str(out_dir), "--workers", "2"])
        assert rc == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["t_from"] == 8 and manifest["t_to"] == 11
        assert (out_dir / "sections" / "t_0008.json").exists()
        assert (out_dir / "overlays" / "t_0008.png").exists()
        assert (out_dir / "timings.json").exists()

    def test_t_range_outside_volume_errors_before_output(self, synth_files, tmp_path):
        vol_path, _ = synth_files
        out_dir = tmp_path / "never"
        rc = main(["run", "--volume", str(vol_path), "--t-from", "0", "--t-to", "99",
                   "--out", str(out_dir)])
        assert rc == 2
        assert not out_dir.exists()

    def test_ablation_recorded_in_manifest(self, synth_files, tmp_path):
        vol_path, _ = synth_files
        out_dir = tmp_path / "ablated"
        rc = main(["run", "--volume", str(vol_path), "--t-from", "10", "--t-to", "10",
                   "--out", str(out_dir), "--ablation"])
        assert rc == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["params"]["ablation"] is True

    def test_missing_volume_exit_3(self, tmp_path):
        rc = main(["run", "--volume", str(tmp_path / "missing.svol"),
                   "--out", str(tmp_path / "out")])
        assert rc == 3

    def test_override_layering(self, synth_files, tmp_path):
        vol_path, _ = synth_files
        params_path = tmp_path / "params.json"
        params_path.write_text(json.dumps({"enhance": {"threshold_l": 0.4}}))
        out_dir = tmp_path / "run_override"
        rc = main(["run", "--volume", str(vol_path), "--params", str(params_path),
                   "-O", "enhance.threshold_y=0.45", "--t-from", "10", "--t-to", "10",
                   "--out", str(out_dir)])
        assert rc == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["params"]["enhance"]["threshold_l"] == 0.4
        assert manifest["params"]["enhance"]["threshold_y"] == 0.45
        assert manifest["params"]["enhance"]["threshold_v"] == 0.55

    def test_invalid_override_exit_2(self, synth_files, tmp_path):
        vol_path, _ = synth_files
        rc = main(["run", "--volume", str(vol_path), "-O", "enhance.bogus=1",
                   "--out", str(tmp_path / "x")])
        assert rc == 2

    def test_stage_failure_exit_4(self, synth_files, tmp_path):
        # tiles=500 passes parameter validation but cannot partition a
        # 40x40 section, failing inside the enhancement stage
        vol_path, _ = synth_files
        rc = main(["run", "--volume", str(vol_path), "-O", "enhance.clahe_tiles=500",
                   "--t-from", "10", "--t-to", "10", "--out", str(tmp_path / "x")])
        assert rc == 4


class TestEval:
    def test_detection_equal_truth_scores_zero(self, synth_files, tmp_path):
        vol_path, truth_path = synth_files
        # build a fake run dir whose lines equal the truth
        run_dir = tmp_path / "fake" / "sections"
        os.makedirs(run_dir)
        truth = json.loads(truth_path.read_text())
        for entry in truth[8:12]:
            doc = {"t_index": entry["t_index"], "components": [entry["pixels"]]}
            (run_dir / f"t_{entry['t_index']:04d}.json").write_text(json.dumps(doc))
        report_path = tmp_path / "report.json"
        rc = main(["eval", "--lines", f"exact={tmp_path / 'fake'}",
                   "--truth", str(truth_path), "--out", str(report_path)])
        assert rc == 0
        report = json.loads(report_path.read_text())
        assert all(r["mean_symmetric"] == 0.0 for r in report["exact"])

    def test_full_vs_ablated_two_column_table(self, synth_files, tmp_path, capsys):
        vol_path, truth_path = synth_files
        for variant, flag in (("full", []), ("abl", ["--ablation"])):
            rc = main(["run", "--volume", str(vol_path), "--t-from", "9", "--t-to", "12",
                       "--out", str(tmp_path / variant)] + flag)
            assert rc == 0
        rc = main(["eval",
                   "--lines", f"full={tmp_path / 'full'}",
                   "--lines", f"ablated={tmp_path / 'abl'}",
                   "--truth", str(truth_path),
                   "--out", str(tmp_path / "report.json")])
        assert rc == 0
        out = capsys.readouterr().out
        header = out.splitlines()[0]
        assert "full" in header and "ablated" in header
        report = json.loads((tmp_path / "report.json").read_text())
        assert set(report) == {"full", "ablated"}

    def test_missing_truth_exit_3(self, synth_files, tmp_path):
        rc = main(["eval", "--lines", str(tmp_path), "--truth", str(tmp_path / "no.json")])
        assert rc == 3


class TestExport:
    def test_export_semblance_images(self, synth_files, tmp_path):
        vol_path, _ = synth_files
        out_dir = tmp_path / "imgs"
        rc = main(["export", "--volume", str(vol_path), "--layer", "semblance",
                   "--t-from", "10", "--t-to", "12", "--out", str(out_dir)])
        assert rc == 0
        assert (out_dir / "semblance_t_0010.png").exists()
        assert (out_dir / "semblance_t_0012.png").exists()


class TestDeterminism:
    def test_two_runs_byte_identical(self, synth_files, tmp_path):
        vol_path, _ = synth_files
        dirs = []
        for name in ("r1", "r2"):
            out_dir = tmp_path / name
            rc = main(["run", "--volume", str(vol_path), "--t-from", "8", "--t-to", "12",
                       "--out", str(out_dir), "--workers", "4"])
            assert rc == 0
            dirs.append(out_dir)
        a, b = dirs
        assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
        for rel in sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file()):
            if rel.name == "timings.json":
                continue
            assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel
