import io
import json
import math
from contextlib import redirect_stdout

import numpy as np
import pytest

from barylab import graphs
from barylab.cli import main
from barylab.measures import DiscreteMeasure
from barylab import hyperboloid as hyp


def run_cli(argv, tmp_path, name="out"):
    out_dir = tmp_path / name
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(["--out-dir", str(out_dir)] + argv)
    files = {}
    if out_dir.exists():
        for p in sorted(out_dir.iterdir()):
            files[p.name] = p.read_bytes()
    return code, buf.getvalue(), files


@pytest.fixture(scope="module")
def tree_json(tmp_path_factory):
    path = tmp_path_factory.mktemp("fixtures") / "tree.json"
    path.write_text(graphs.regular_tree(3, 13).to_json())
    return str(path)


def test_entropy_command_tree(tree_json, tmp_path):
    code, out, files = run_cli(
        ["entropy", tree_json, "--rmin", "4", "--rmax", "12"], tmp_path)
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["h"] - math.log(2)) < 0.02 * math.log(2)
    assert "entropy.csv" in files


def test_entropy_command_path_flat(tmp_path):
    gpath = tmp_path / "path.json"
    gpath.write_text(graphs.path_graph(200).to_json())
    code, out, _ = run_cli(
        ["entropy", str(gpath), "--basepoint", "100",
         "--rmin", "10", "--rmax", "60"], tmp_path)
    assert code == 0
    assert abs(json.loads(out)["h"]) < 0.05


def test_entropy_saturation_exit_code(tmp_path):
    gpath = tmp_path / "small.json"
    gpath.write_text(graphs.path_graph(10).to_json())
    code, _, _ = run_cli(["entropy", str(gpath), "--rmin", "2", "--rmax", "20"],
                         tmp_path)
    assert code == 2


def test_missing_file_exit_code(tmp_path):
    code, _, _ = run_cli(["entropy", "no_such_file.json",
                          "--rmin", "1", "--rmax", "2"], tmp_path)
    assert code == 2


def test_barycenter_command(tmp_path):
    rng = np.random.default_rng(0)
    pts = np.array([hyp.random_point(rng, 3, 1.0) for _ in range(5)])
    mpath = tmp_path / "measure.json"
    mpath.write_text(DiscreteMeasure.from_points(pts).to_json())
    code, out, _ = run_cli(["barycenter", str(mpath)], tmp_path)
    assert code == 0
    payload = json.loads(out)
    assert len(payload["point"]) == 4
    assert payload["gradient_norm"] <= 1e-9 * 5 * (1 + 1e-9)


def test_wasserstein_command(tmp_path):
    rng = np.random.default_rng(1)
    a = np.array([hyp.random_point(rng, 3, 1.0) for _ in range(3)])
    b = np.array([hyp.random_point(rng, 3, 1.0) for _ in range(4)])
    mu = DiscreteMeasure.from_points(a).normalize()
    nu = DiscreteMeasure.from_points(b).normalize()
    (tmp_path / "mu.json").write_text(mu.to_json())
    (tmp_path / "nu.json").write_text(nu.to_json())
    code, out, files = run_cli(
        ["wasserstein", str(tmp_path / "mu.json"), str(tmp_path / "nu.json")],
        tmp_path)
    assert code == 0
    assert json.loads(out)["w1"] > 0
    assert "plan.csv" in files


def test_bcg_command_and_rejection(tmp_path):
    code, out, files = run_cli(["bcg", "--N", "3", "--count", "500"], tmp_path)
    assert code == 0
    payload = json.loads(out)
    assert payload["violations"] == 0
    assert payload["empirical_A"] > 0
    assert "bcg_scan.csv" in files
    code, _, _ = run_cli(["bcg", "--N", "2", "--count", "10"], tmp_path, "n2")
    assert code == 2


def test_indices_command_fixture(tmp_path):
    ipath = tmp_path / "cover.json"
    ipath.write_text(json.dumps({"fixture": {"type": "torus_cover", "k": 2}}))
    code, out, _ = run_cli(["indices", str(ipath), "--mode", "all",
                            "--samples", "60"], tmp_path)
    assert code == 0
    payload = json.loads(out)
    assert payload["pre"] == 2.0
    assert payload["ind_H"] == 2
    assert payload["ind_pi"] == 2
    assert payload["consistency"] == "OK"


def test_indices_command_subgroup_only(tmp_path):
    ipath = tmp_path / "subgroup.json"
    ipath.write_text(json.dumps(
        {"subgroup": {"rank": 2, "generators": ["aa", "b", "abA"]}}))
    code, out, _ = run_cli(["indices", str(ipath), "--mode", "indpi"], tmp_path)
    assert code == 0
    assert json.loads(out)["ind_pi"] == 2


def test_indices_malformed_json(tmp_path):
    ipath = tmp_path / "bad.json"
    ipath.write_text("{not json")
    code, _, _ = run_cli(["indices", str(ipath)], tmp_path)
    assert code == 2


def test_coarea_command(tmp_path):
    ipath = tmp_path / "coarea.json"
    ipath.write_text(json.dumps({"fixture": {"type": "identity_pl", "m": 3}}))
    code, out, _ = run_cli(["coarea", str(ipath), "--samples", "20000"], tmp_path)
    assert code == 0
    assert json.loads(out)["relative_gap"] < 0.02


def test_naturalmap_command_small(tmp_path):
    cpath = tmp_path / "nm.json"
    cpath.write_text(json.dumps({
        "fixture": {"type": "rotation_net", "order": 4, "radius": 1.5,
                    "spacing": 0.4, "dim": 3},
        "entropy": {"r_min": 0.6, "r_max": 1.4, "step": 0.2},
        "s_factors": [1.3, 1.8],
        "truncation_radius": 3.2,
        "tail_tolerance": 5.0,
        "num_samples": 4,
    }))
    code, out, files = run_cli(["naturalmap", str(cpath)], tmp_path)
    assert code == 0, out
    payload = json.loads(out)
    assert payload["violations"] == 0
    assert payload["equivariance"] < 1e-6
    for row in payload["per_s"]:
        assert row["max_pointwise_violation"] <= 1e-6
    assert "naturalmap_run.csv" in files and "naturalmap_summary.json" in files


def test_naturalmap_s_below_entropy_rejected(tmp_path):
    cpath = tmp_path / "bad_s.json"
    cpath.write_text(json.dumps({
        "fixture": {"type": "ball_net", "radius": 1.4, "spacing": 0.4, "dim": 3},
        "entropy": {"r_min": 0.6, "r_max": 1.2, "step": 0.2},
        "s_values": [0.1],
        "truncation_radius": 3.0,
    }))
    code, _, _ = run_cli(["naturalmap", str(cpath)], tmp_path)
    assert code == 2


def test_determinism_all_commands(tmp_path, tree_json):
    rng = np.random.default_rng(4)
    pts = np.array([hyp.random_point(rng, 3, 1.0) for _ in range(4)])
    mpath = tmp_path / "m.json"
    mpath.write_text(DiscreteMeasure.from_points(pts).to_json())
    ipath = tmp_path / "idx.json"
    ipath.write_text(json.dumps({"fixture": {"type": "torus_cover", "k": 2}}))
    capath = tmp_path / "ca.json"
    capath.write_text(json.dumps({"fixture": {"type": "jittered_pl", "m": 4,
                                              "amplitude": 0.5}}))
    nmpath = tmp_path / "nm.json"
    nmpath.write_text(json.dumps({
        "fixture": {"type": "rotation_net", "order": 3, "radius": 1.3,
                    "spacing": 0.45, "dim": 3},
        "entropy": {"r_min": 0.5, "r_max": 1.2, "step": 0.35},
        "s_factors": [1.5],
        "truncation_radius": 3.0,
        "tail_tolerance": 5.0,
        "num_samples": 2,
    }))
    commands = [
        ["--seed", "11", "entropy", tree_json, "--rmin", "4", "--rmax", "10"],
        ["--seed", "11", "barycenter", str(mpath)],
        ["--seed", "11", "bcg", "--N", "3", "--count", "400"],
        ["--seed", "11", "indices", str(ipath), "--samples", "50"],
        ["--seed", "11", "coarea", str(capath), "--samples", "5000"],
        ["--seed", "11", "naturalmap", str(nmpath)],
    ]
    for i, argv in enumerate(commands):
        # identical invocations, including the out-dir, must be byte-identical
        code1, out1, files1 = run_cli(argv, tmp_path, f"d{i}")
        code2, out2, files2 = run_cli(argv, tmp_path, f"d{i}")
        assert code1 == code2 == 0
        assert out1 == out2
        assert files1 == files2
