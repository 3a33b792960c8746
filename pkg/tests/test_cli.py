import json

import pytest
from click.testing import CliRunner

from closemic.cli import main
from closemic.signals import gen_pink_noise, gen_riff
from closemic.wavio import write_wav

SR = 44100

SMALL_CONFIG = {
    "duration_s": 0.5,
    "riff_pattern_period_s": 0.25,
    "rt60_s": 0.0,
    "main_distances_m": [0.03, 0.12],
    "angled_distances_m": [0.03],
    "source_spls_db": [100.0],
    "noise_spls_db": [100.0, 94.0],
    "stft": {"frame_length": 1024, "hop_length": 512},
}

SCENE_DOC = {
    "sample_rate_hz": SR,
    "duration_s": 0.5,
    "room": {"rt60_s": 0.0, "volume_m3": 3000.0, "reverb_seed": 42},
    "mic": {"position_m": [0, 0], "axis_angle_deg": 0, "directivity": "cardioid"},
    "target": {"position_m": [0.12, 0], "spl_db": 100,
               "signal": {"kind": "riff", "seed": 1, "pattern_period_s": 0.25}},
    "noise": {"position_m": [0, 2.0], "spl_db": 94,
              "signal": {"kind": "pink", "seed": 7}},
}


@pytest.fixture
def runner():
    return CliRunner()


class TestSir:
    def test_identical_files_zero_db(self, runner, tmp_path):
        buf = gen_pink_noise(0.2, SR, seed=1).scaled(0.5)
        path = tmp_path / "x.wav"
        write_wav(path, buf)
        result = runner.invoke(main, ["sir", "--source", str(path), "--noise", str(path)])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["sir_db"] == 0.0
        assert doc["mask_density"] == 1.0

    def test_silent_noise_inf_sentinel(self, runner, tmp_path):
        src = tmp_path / "s.wav"
        noi = tmp_path / "n.wav"
        write_wav(src, gen_riff(0.3, SR, 196.0, 0.15, seed=1))
        write_wav(noi, gen_pink_noise(0.3, SR, seed=2).scaled(0.0))
        result = runner.invoke(
            main, ["sir", "--source", str(src), "--noise", str(noi), "--frame", "512", "--hop", "256"]
        )
        assert result.exit_code == 0
        assert json.loads(result.output)["sir_db"] == "inf"

    def test_missing_flag_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["sir", "--source", "nope.wav"])
        assert result.exit_code == 2

    def test_bad_stft_params_exit_2(self, runner, tmp_path):
        path = tmp_path / "x.wav"
        write_wav(path, gen_pink_noise(0.2, SR, seed=1).scaled(0.5))
        result = runner.invoke(
            main, ["sir", "--source", str(path), "--noise", str(path), "--frame", "1000"]
        )
        assert result.exit_code == 2


class TestCampaign:
    def test_small_run(self, runner, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(SMALL_CONFIG))
        out = tmp_path / "out"
        result = runner.invoke(
            main, ["campaign", "--config", str(config_path), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        lines = (out / "grid.csv").read_text().splitlines()
        # 2 omni + 2 cardioid@0 over 2 distances, 1+1 angled, all x2 noise levels
        assert len(lines) == 1 + 12
        assert (out / "grid.json").exists()

    def test_unknown_config_key_exits_2(self, runner, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"durationn_s": 1.0}))
        result = runner.invoke(
            main, ["campaign", "--config", str(config_path), "--out", str(tmp_path / "o")]
        )
        assert result.exit_code == 2


class TestSimulate:
    def test_writes_capture_pair(self, runner, tmp_path):
        scene_path = tmp_path / "scene.json"
        scene_path.write_text(json.dumps(SCENE_DOC))
        out = tmp_path / "sim"
        result = runner.invoke(main, ["simulate", "--scene", str(scene_path), "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "target.wav").exists()
        assert (out / "noise.wav").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["target"]["captured_leq_db"] == pytest.approx(100.0, abs=0.01)
        assert summary["noise"]["target_spl_db"] == 94.0

    def test_bad_scene_exits_2(self, runner, tmp_path):
        doc = dict(SCENE_DOC)
        doc["mic"] = dict(SCENE_DOC["mic"], directivity="shotgun")
        scene_path = tmp_path / "scene.json"
        scene_path.write_text(json.dumps(doc))
        result = runner.invoke(
            main, ["simulate", "--scene", str(scene_path), "--out", str(tmp_path / "o")]
        )
        assert result.exit_code == 2


class TestOptimize:
    def test_finds_angled_placement(self, runner, tmp_path):
        scene_path = tmp_path / "scene.json"
        scene_path.write_text(json.dumps(SCENE_DOC))
        result = runner.invoke(main, [
            "optimize", "--scene", str(scene_path),
            "--dist-min-m", "0.05", "--dist-max-m", "0.3",
            "--grid", "4x2", "--tol-m", "0.01",
        ])
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        assert doc["best_angle_deg"] == 45.0
        assert doc["evaluations"] == len(doc["trace"])

    def test_malformed_grid_exits_2(self, runner, tmp_path):
        scene_path = tmp_path / "scene.json"
        scene_path.write_text(json.dumps(SCENE_DOC))
        result = runner.invoke(
            main, ["optimize", "--scene", str(scene_path), "--grid", "8by4"]
        )
        assert result.exit_code == 2


class TestHelp:
    def test_group_lists_subcommands(self, runner):
        result = runner.invoke(main, ["--help"])
        for name in ("campaign", "sir", "simulate", "optimize", "serve"):
            assert name in result.output

    def test_flags_carry_units(self, runner):
        result = runner.invoke(main, ["optimize", "--help"])
        for flag in ("--dist-min-m", "--dist-max-m", "--angle-min-deg", "--tol-m"):
            assert flag in result.output
