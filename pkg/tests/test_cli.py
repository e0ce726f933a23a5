import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import DATA, load, set_distance
from polytrace.cli.main import decode_point, dumps, encode_point, run


def data(name):
    return str(DATA / name)


def points(doc):
    return [decode_point(r["coordinates"]) for r in doc["solutions"]]


def test_solve_two_curves():
    doc, code = run(["solve", data("eq23.txt"), "--certify", "krawczyk"])
    assert code == 0 and doc["count"] == 6 and doc["paths"] == 6
    assert doc["schema_version"] == 1 and doc["command"] == "solve" and doc["seed"] == 0
    assert all(r["certificate"]["certified"] for r in doc["solutions"])
    assert sum(bool(r["certificate"]["real"]) for r in doc["solutions"]) == 2
    F = load("eq23.txt")
    assert all(np.linalg.norm(F.evaluate(x)) < 1e-8 for x in points(doc))


@pytest.mark.parametrize("method", ["polyhedral", "monodromy"])
def test_solve_methods_agree(method):
    ref, _ = run(["solve", data("ex35.txt")])
    doc, code = run(["solve", data("ex35.txt"), "--method", method, "--seed", "2"])
    assert code == 0 and doc["count"] == 8
    assert set_distance(points(doc), points(ref)) < 1e-6


def test_overdetermined_solve():
    doc, code = run(["solve", data("minors.txt")])
    assert code == 0 and doc["squared_up"] and doc["count"] == 3


def test_parametric_solve():
    doc, code = run(["solve", data("circle_family.txt"), "--params", "4,1"])
    r = np.sqrt(7)
    assert code == 0
    assert set_distance(points(doc), [[(1 + r) / 2, (r - 1) / 2], [(1 - r) / 2, (-1 - r) / 2]]) < 1e-8
    doc, code = run(["solve", data("circle_family.txt")])
    assert code == 1 and doc["error"]["type"] == "PolytraceError"


def test_parametric_monodromy_without_target_reports_fiber():
    doc, code = run(["solve", data("circle_family.txt"), "--method", "monodromy", "--known-count", "2"])
    assert code == 0 and doc["count"] == 2 and len(doc["parameters"]) == 2


def test_monodromy_stall_is_inconclusive():
    doc, code = run(["solve", data("eq23.txt"), "--method", "monodromy", "--known-count", "7", "--budget", "2"])
    assert code == 2 and doc["count"] == 6


def test_empty_solution_set():
    doc, code = run(["solve", data("empty.txt")])
    assert code == 0 and doc["count"] == 0 and doc["solutions"] == []


def test_mixedvol_with_cells():
    doc, code = run(["mixedvol", data("ex35.txt"), "--cells"])
    assert code == 0 and doc["mixed_volume"] == 8
    assert sum(c["volume"] for c in doc["cells"]) == 8
    assert len(doc["lifting"]) == 2


def test_certify_points_from_solve_output(tmp_path):
    doc, _ = run(["solve", data("eq23.txt")])
    path = tmp_path / "sols.json"
    path.write_text(dumps(doc))
    out, code = run(["certify", data("eq23.txt"), "--points", str(path), "--method", "alpha"])
    assert code == 0 and out["count"] == 6 and out["certified"] == 6 and out["real"] == 2
    far = tmp_path / "far.json"
    far.write_text(json.dumps([[[7, 0], [5, 0]]]))
    out, _ = run(["certify", data("eq23.txt"), "--points", str(far)])
    assert out["certified"] == 0


def test_decompose_union():
    doc, code = run(["decompose", data("folium_ellipse.txt")])
    assert code == 0 and not doc["inconclusive"]
    assert sorted(d for _, d in doc["summary"]) == [2, 3]


def test_member():
    on, code = run(["member", data("folium.txt"), "--point", "1.5,1.5"])
    assert code == 0 and on["member"] and on["residual"] < 1e-12
    off, _ = run(["member", data("folium.txt"), "--point", "1,1"])
    assert not off["member"] and off["evidence"] == []


def test_bench_output_files(tmp_path):
    out = tmp_path / "k.txt"
    doc, code = run(["bench", "kuramoto", "--graph", "path:3", "--output", str(out), "--solve"])
    assert code == 0 and doc["oracle"]["count"] == 4 and doc["solved"] == 4
    oracle = json.loads((tmp_path / "k.txt.oracle.json").read_text())
    assert oracle["closed_form"] == 4
    again, _ = run(["solve", str(out), "--method", "polyhedral"])
    assert again["count"] == 4


def test_bench_p3p():
    doc, code = run(["bench", "p3p", "--seed", "3", "--solve"])
    assert code == 0 and doc["solved"] == 8 and doc["truth_error"] < 1e-8


def test_seed_determinism():
    a, _ = run(["solve", data("biquadratic.txt"), "--seed", "5", "--threads", "1"])
    b, _ = run(["solve", data("biquadratic.txt"), "--seed", "5", "--threads", "4"])
    a.pop("timestamp"), b.pop("timestamp")
    assert dumps(a) == dumps(b)


@pytest.mark.parametrize("argv, kind", [(["solve", "/nonexistent.txt"], "FileNotFoundError"),
                                        (["member", data("folium.txt"), "--point", "1,2,3"], "PolytraceError"),
                                        (["solve", data("laurent.txt")], "LaurentUnsupported")])
def test_errors_exit_one(argv, kind):
    doc, code = run(argv)
    assert code == 1 and doc["error"]["type"] == kind and doc["error"]["message"]


def test_point_codec():
    x = np.array([1 + 2j, -0.1, 3e-300j])
    assert np.array_equal(decode_point(encode_point(x)), x)
    assert np.array_equal(decode_point("1, 2+3i"), [1, 2 + 3j])
    # shortest round-trip repr
    assert json.loads(dumps({"v": 0.1}))["v"] == 0.1 and "0.1" in dumps({"v": 0.1})


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polytrace", "mixedvol", data("biquadratic.txt")],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["mixed_volume"] == 12
