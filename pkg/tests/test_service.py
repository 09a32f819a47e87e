import base64
import io
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from seisfault.pipeline import PipelineParams
from seisfault.service import LAYER_NAMES, create_app
from seisfault.volume import FaultSpec, SyntheticSpec, VolumeHeader, generate_synthetic


@pytest.fixture(scope="module")
def loaded():
    spec = SyntheticSpec(
        header=VolumeHeader(n_time=24, n_inline=48, n_crossline=48),
        layer_count=8, layer_seed=3, noise_ratio=0.05, seed=9,
        faults=(FaultSpec(strike_deg=90.0, dip_deg=90.0, throw=3, x0=24.0, y0=24.0),),
    )
    return generate_synthetic(spec)


@pytest.fixture(scope="module")
def client(loaded):
    volume, truth = loaded
    return TestClient(create_app(volume, truth=truth))


def decode_png(b64):
    return np.asarray(Image.open(io.BytesIO(base64.b64decode(b64))))


class TestVolumeEndpoint:
    def test_header_metadata(self, client, loaded):
        response = client.get("/api/volume")
        assert response.status_code == 200
        body = response.json()
        assert body["header"]["n_time"] == 24
        assert body["has_truth"] is True

    def test_no_volume_503(self):
        bare = TestClient(create_app(None))
        assert bare.get("/api/volume").status_code == 503
        assert bare.post("/api/run", json={"t_index": 0}).status_code == 503


class TestDefaultParams:
    def test_headline_defaults_present(self, client):
        body = client.get("/api/params/default").json()
        assert body["enhance"]["threshold_l"] == 0.55
        assert body["enhance"]["gaussian_sigma"] == 10.0
        assert body["enhance"]["gaussian_size"] == 2

    def test_document_round_trips_through_params(self, client):
        body = client.get("/api/params/default").json()
        assert PipelineParams.from_dict(body) == PipelineParams()


class TestRun:
    def test_default_run_returns_all_layers(self, client):
        response = client.post("/api/run", json={"t_index": 12})
        assert response.status_code == 200
        body = response.json()
        assert set(body["layers"]) == set(LAYER_NAMES)
        img = decode_png(body["layers"]["overlay"])
        assert img.shape == (48, 48, 3)
        assert body["report"]["mean_symmetric"] is not None
        fault_img = decode_png(body["layers"]["fault_lines"])
        assert (fault_img == 255).any()

    def test_huge_prune_threshold_empties_lines(self, client):
        response = client.post("/api/run", json={
            "t_index": 12,
            "params": {"skeleton": {"prune_threshold": 1e9}},
            "layers": ["fault_lines"],
        })
        assert response.status_code == 200
        img = decode_png(response.json()["layers"]["fault_lines"])
        assert (img == 0).all()

    def test_unknown_layer_400_names_layer(self, client):
        response = client.post("/api/run", json={"t_index": 3, "layers": ["wat"]})
        assert response.status_code == 400
        assert "wat" in response.json()["detail"]

    def test_bad_params_400(self, client):
        response = client.post("/api/run", json={"t_index": 3, "params": {"enhance": {"x": 1}}})
        assert response.status_code == 400

    def test_t_out_of_range_404(self, client):
        assert client.post("/api/run", json={"t_index": 24}).status_code == 404

    def test_statelessness_identical_bytes(self, client):
        request = {"t_index": 10, "layers": ["overlay", "semblance", "fault_lines"]}
        first = client.post("/api/run", json=request).json()["layers"]
        client.post("/api/run", json={"t_index": 5})  # interleave another request
        second = client.post("/api/run", json=request).json()["layers"]
        assert first == second

    def test_ablation_omits_color_layers(self, client):
        response = client.post("/api/run", json={
            "t_index": 12, "params": {"ablation": True},
        })
        body = response.json()
        assert "blended" not in body["layers"]
        assert "intensity_l" not in body["layers"]
        assert "combined" in body["layers"]

    def test_params_echo_reproduces_run(self, client):
        response = client.post("/api/run", json={
            "t_index": 12, "params": {"enhance": {"threshold_l": 0.4}},
            "layers": ["fault_lines"],
        })
        body = response.json()
        assert body["params"]["enhance"]["threshold_l"] == 0.4
        again = client.post("/api/run", json={
            "t_index": 12, "params": body["params"], "layers": ["fault_lines"],
        }).json()
        assert again["layers"] == body["layers"]


class TestCliParity:
    def test_exported_params_reproduce_service_overlay_via_cli(self, loaded, tmp_path):
        """A console session's exported parameter document (identical to
        the params echoed in the run response) fed to the CLI reproduces
        the displayed overlay byte-for-byte."""
        import json

        from seisfault.cli import main
        from seisfault.volume import save_volume

        volume, truth = loaded
        service_client = TestClient(create_app(volume, truth=truth))
        exported = service_client.get("/api/params/default").json()
        response = service_client.post(
            "/api/run", json={"t_index": 12, "params": exported, "layers": ["overlay"]}
        )
        assert response.json()["params"] == exported
        service_bytes = base64.b64decode(response.json()["layers"]["overlay"])

        vol_path = tmp_path / "v.svol"
        save_volume(volume, vol_path)
        params_path = tmp_path / "exported.json"
        params_path.write_text(json.dumps(exported))
        out_dir = tmp_path / "run"
        assert main(["run", "--volume", str(vol_path), "--params", str(params_path),
                     "--t-from", "12", "--t-to", "12", "--out", str(out_dir)]) == 0
        cli_bytes = (out_dir / "overlays" / "t_0012.png").read_bytes()
        assert service_bytes == cli_bytes


class TestLatency:
    def test_wide_section_under_one_second(self):
        spec = SyntheticSpec(
            header=VolumeHeader(n_time=16, n_inline=300, n_crossline=150),
            layer_count=8, layer_seed=3, noise_ratio=0.1, seed=4,
            faults=(FaultSpec(strike_deg=85.0, dip_deg=90.0, throw=3, x0=150.0, y0=75.0),),
        )
        volume, truth = generate_synthetic(spec)
        wide = TestClient(create_app(volume, truth=truth))
        wide.post("/api/run", json={"t_index": 1})  # warm caches
        start = time.perf_counter()
        response = wide.post("/api/run", json={"t_index": 8})
        elapsed = time.perf_counter() - start
        assert response.status_code == 200
        assert elapsed < 1.0
