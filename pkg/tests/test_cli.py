import json

import numpy as np
import pytest

from ssploc import io
from ssploc.cli import main
from ssploc.config import canonical_config, config_from_dict, config_to_dict

SMALL_CONFIG = {
    "schema_version": 1,
    "seed": 7,
    "s1": 8,
    "environment": {
        "width": 8.0,
        "height": 6.0,
        "ap_positions": [[1.0, 3.5], [4.0, 2.5], [7.0, 3.2]],
        "feature_offsets": None,
        "rp_grid_spacing": 2.0,
        "texture_std": 0.0,
        "texture_scale": 6.0,
        "session_shift_std": 1.0,
        "session_shift_scale": 4.0,
        "pathloss": {"p0": -35.0, "d0": 1.0, "exponent": 3.0, "shadowing_std": 2.0},
    },
    "trajectory": {
        "speed_min": 0.5,
        "speed_max": 1.5,
        "delta_t": 1.0,
        "n_steps": 12,
        "s2": 1,
        "policy": "free_roam",
    },
    "likelihood": {"family": "single_gaussian", "bin_width": 10.0, "bandwidth": None},
    "track": {
        "window": "gaussian",
        "sigma_dmax": 1.0,
        "v_max": 1.5,
        "top_k": 1,
        "matching_mode": "per_scan_product",
        "alignment_steps": [],
        "history_error_dmax": 0.0,
    },
    "csi": {"h": 6, "w": 5, "h_test": 3},
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(SMALL_CONFIG))
    return str(path)


@pytest.fixture
def dataset(tmp_path, config_file):
    out = tmp_path / "data"
    assert main(["gen", "--config", config_file, "--out", str(out)]) == 0
    return out


def test_gen_writes_dataset(dataset):
    for name in ("config.json", "training_scans.json", "trajectory_scans.json", "ground_truth.json"):
        assert (dataset / name).exists()
    training = io.load_scan_dataset(dataset / "training_scans.json")
    assert len(training) == 20  # 5 x 4 grid at 2 m spacing
    assert all(t.scan_count == 8 for t in training)
    truth = io.load_ground_truth(dataset / "ground_truth.json")
    scans = io.load_scan_dataset(dataset / "trajectory_scans.json")
    assert len(truth) == len(scans) == 12
    assert all(s.location is None for s in scans)


def test_gen_writes_csi_dataset(dataset):
    assert (dataset / "csi" / "rp_0000.csv").exists()
    assert (dataset / "csi" / "rp_locations.json").exists()
    m = io.load_csi_csv(dataset / "csi" / "rp_0000.csv")
    assert (m.h, m.w) == (6, 5)
    csi_scans = io.load_scan_dataset(dataset / "csi_trajectory_scans.json")
    assert csi_scans[0].feature_count == 1
    assert csi_scans[0].scan_count == 3


def test_gen_is_byte_identical_per_seed(tmp_path, config_file):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["gen", "--config", config_file, "--out", str(out_a)]) == 0
    assert main(["gen", "--config", config_file, "--out", str(out_b)]) == 0
    for name in ("config.json", "training_scans.json", "trajectory_scans.json",
                 "ground_truth.json", "csi_trajectory_scans.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name
    assert (out_a / "csi" / "rp_0003.csv").read_bytes() == (out_b / "csi" / "rp_0003.csv").read_bytes()


def test_gen_seed_override_changes_data(tmp_path, config_file):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["gen", "--config", config_file, "--out", str(out_a)]) == 0
    assert main(["gen", "--config", config_file, "--seed", "8", "--out", str(out_b)]) == 0
    assert (out_a / "training_scans.json").read_bytes() != (out_b / "training_scans.json").read_bytes()


@pytest.mark.parametrize("family,alias", [("single_gaussian", "horus"), ("kernel", "kernel")])
def test_train_reports_shape(dataset, tmp_path, capsys, family, alias):
    map_path = tmp_path / "map.json"
    rc = main(["train", "--scans", str(dataset / "training_scans.json"),
               "--family", alias, "--out", str(map_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "M=20" in out and "N=3" in out and family in out
    rmap = io.load_radio_map(map_path)
    assert rmap.size == 20 and rmap.family == family


def test_train_kernel_roundtrip_probes(dataset, tmp_path, rng):
    from ssploc.likelihood import evaluate

    map_path = tmp_path / "map.json"
    main(["train", "--scans", str(dataset / "training_scans.json"),
          "--family", "kernel", "--out", str(map_path)])
    direct = io.load_radio_map(map_path)
    io.save_radio_map(direct, tmp_path / "again.json")
    again = io.load_radio_map(tmp_path / "again.json")
    probes = rng.uniform(-90, -30, size=100)
    for pa, pb in zip(direct.points, again.points):
        for ma, mb in zip(pa.models, pb.models):
            assert all(evaluate(ma, float(x)) == evaluate(mb, float(x)) for x in probes)


def test_train_fila_from_csi_dir(dataset, tmp_path, capsys):
    map_path = tmp_path / "csi_map.json"
    rc = main(["train", "--csi-dir", str(dataset / "csi"), "--family", "fila",
               "--out", str(map_path)])
    assert rc == 0
    assert "N=1" in capsys.readouterr().out
    rmap = io.load_radio_map(map_path)
    assert rmap.family == "csi_power_gaussian"
    assert rmap.size == 20


def _train(dataset, tmp_path, family="horus"):
    map_path = tmp_path / f"map_{family}.json"
    assert main(["train", "--scans", str(dataset / "training_scans.json"),
                 "--family", family, "--out", str(map_path)]) == 0
    return map_path


def test_track_memoryless_and_ssp(dataset, tmp_path, capsys):
    map_path = _train(dataset, tmp_path)
    args = ["--map", str(map_path), "--trajectory", str(dataset / "trajectory_scans.json"),
            "--truth", str(dataset / "ground_truth.json"), "--v-max", "1.5"]
    out_a = tmp_path / "uniform"
    rc = main(["track", *args, "--window", "uniform", "--out", str(out_a)])
    assert rc == 0
    assert (out_a / "estimates.json").exists()
    assert (out_a / "report.json").exists()
    assert (out_a / "report.csv").exists()
    out_b = tmp_path / "gaussian"
    rc = main(["track", *args, "--window", "gaussian", "--sigma", "1.0", "--out", str(out_b)])
    assert rc == 0
    report = io.read_json(out_b / "report.json")
    assert report["mean"] >= 0
    assert len(io.load_estimate_locations(out_b / "estimates.json")) == 12


def test_track_repeat_is_byte_identical(dataset, tmp_path):
    map_path = _train(dataset, tmp_path)
    args = ["--map", str(map_path), "--trajectory", str(dataset / "trajectory_scans.json"),
            "--window", "uniform", "--v-max", "1.5"]
    out_a, out_b = tmp_path / "r1", tmp_path / "r2"
    assert main(["track", *args, "--out", str(out_a)]) == 0
    assert main(["track", *args, "--out", str(out_b)]) == 0
    a = json.loads((out_a / "estimates.json").read_text())
    b = json.loads((out_b / "estimates.json").read_text())
    for ra, rb in zip(a["steps"], b["steps"]):
        assert (ra["x"], ra["y"], ra["top_k_ids"]) == (rb["x"], rb["y"], rb["top_k_ids"])


def test_track_alignment_and_history_error_flags(dataset, tmp_path):
    map_path = _train(dataset, tmp_path)
    out = tmp_path / "robust"
    rc = main(["track", "--map", str(map_path),
               "--trajectory", str(dataset / "trajectory_scans.json"),
               "--truth", str(dataset / "ground_truth.json"),
               "--window", "gaussian", "--sigma", "0.5", "--v-max", "1.5",
               "--align", "0,5,10", "--history-error", "0.5", "--seed", "3",
               "--out", str(out)])
    assert rc == 0
    assert io.read_json(out / "report.json")["mean"] >= 0


def test_sweep_produces_full_table(dataset, tmp_path):
    map_path = _train(dataset, tmp_path)
    out_csv = tmp_path / "sweep.csv"
    rc = main(["sweep", "--map", str(map_path),
               "--trajectory", str(dataset / "trajectory_scans.json"),
               "--truth", str(dataset / "ground_truth.json"),
               "--families", "circular,gaussian,uniform", "--sigmas", "0.5,1.0",
               "--v-max", "1.5", "--out", str(out_csv)])
    assert rc == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == ",".join(io.REPORT_CSV_HEADER)
    assert len(lines) == 1 + 3 * 2
    uniform_rows = [l.split(",") for l in lines[1:] if l.startswith("uniform")]
    assert uniform_rows[0][2:6] == uniform_rows[1][2:6]  # sigma ignored


def test_bench_reports_all_windows(dataset, tmp_path, capsys):
    map_path = _train(dataset, tmp_path)
    out_csv = tmp_path / "bench.csv"
    rc = main(["bench", "--map", str(map_path),
               "--trajectory", str(dataset / "trajectory_scans.json"),
               "--v-max", "1.5", "--repeats", "2", "--out", str(out_csv)])
    assert rc == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0].startswith("window,")
    families = [l.split(",")[0] for l in lines[1:]]
    assert families == ["uniform", "circular", "gaussian", "hann", "tukey"]


class TestExitCodes:
    def test_missing_config_is_config_error(self, tmp_path):
        assert main(["gen", "--out", str(tmp_path)]) == 2

    def test_bad_config_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"schema_version": 99}')
        assert main(["gen", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2

    def test_config_error_names_field(self, tmp_path, capsys):
        doc = json.loads(json.dumps(SMALL_CONFIG))
        del doc["environment"]["width"]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        assert main(["gen", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
        assert "environment.width" in capsys.readouterr().err

    def test_unknown_family_is_usage_error(self, dataset, tmp_path):
        rc = main(["train", "--scans", str(dataset / "training_scans.json"),
                   "--family", "mystery", "--out", str(tmp_path / "m.json")])
        assert rc == 2

    def test_missing_data_file_is_data_error(self, tmp_path):
        assert main(["train", "--scans", str(tmp_path / "nope.json"),
                     "--family", "horus", "--out", str(tmp_path / "m.json")]) == 3

    def test_mismatched_map_and_trajectory(self, dataset, tmp_path):
        map_path = tmp_path / "csi_map.json"
        main(["train", "--csi-dir", str(dataset / "csi"), "--family", "fila",
              "--out", str(map_path)])
        rc = main(["track", "--map", str(map_path),
                   "--trajectory", str(dataset / "trajectory_scans.json"),
                   "--window", "uniform", "--out", str(tmp_path / "t")])
        assert rc == 3  # incompatible data files


def test_output_dir_env_var(dataset, tmp_path, monkeypatch):
    map_path = _train(dataset, tmp_path)
    monkeypatch.setenv("SSPLOC_OUTPUT_DIR", str(tmp_path / "envout"))
    rc = main(["track", "--map", str(map_path),
               "--trajectory", str(dataset / "trajectory_scans.json"),
               "--window", "uniform", "--v-max", "1.5"])
    assert rc == 0
    assert (tmp_path / "envout" / "estimates.json").exists()


def test_canonical_config_roundtrips():
    cfg = canonical_config()
    doc = config_to_dict(cfg)
    assert config_from_dict(doc) == cfg


def test_gen_canonical_then_train_reports_survey_shape(tmp_path, capsys):
    out = tmp_path / "canonical"
    assert main(["gen", "--canonical", "--out", str(out)]) == 0
    assert main(["train", "--scans", str(out / "training_scans.json"), "--family", "horus",
                 "--out", str(tmp_path / "map.json")]) == 0
    assert "M=374" in capsys.readouterr().out.split("trained radio map")[-1]
    rmap = io.load_radio_map(tmp_path / "map.json")
    assert (rmap.size, rmap.feature_count) == (374, 11)
