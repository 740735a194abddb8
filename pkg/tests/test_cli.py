import io
import json
import subprocess
import sys

import pytest

from dessins.cli import read_config, run
from dessins.hypermap import plane_trees, to_json

from .oracles import NINE_JSON, NINE_PASSPORT


def call(argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def nine_file(tmp_path):
    path = tmp_path / "nine.json"
    path.write_text(json.dumps(NINE_JSON))
    return str(path)


def test_info_on_nine_edge_dessin(nine_file):
    code, out, _ = call(["info", "--input", nine_file])
    assert code == 0
    data = json.loads(out)
    assert data["genus"] == 0
    assert data["passport"] == NINE_PASSPORT
    assert sorted(data["passport"]["faces"]) == [1, 3, 5]
    assert data["plane_tree"] is False
    assert data["group_order"] == 362880


def test_info_group_order_cap(nine_file):
    code, out, _ = call(["info", "--input", nine_file, "--cap", "10"])
    assert code == 0 and json.loads(out)["group_order"] == ">10"


def test_text_format(nine_file):
    code, out, _ = call(["--format", "text", "info", "--input", nine_file])
    assert code == 0
    assert "genus: 0" in out and "plane_tree: false" in out


def test_validate_and_stdin():
    code, out, _ = call(["validate"], json.dumps(NINE_JSON))
    assert code == 0
    data = json.loads(out)
    assert data["valid"] and data["relation_identity"]
    assert data["phi"] == "(1 3 5)(2 6 8 9 4)(7)"


def test_disconnected_dessin_is_a_domain_error():
    code, out, err = call(["validate"], json.dumps({"n": 2, "sigma": [[1], [2]], "alpha": [[1], [2]]}))
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "DisconnectedDessinError"


def test_malformed_json_is_a_domain_error():
    code, _, err = call(["info"], "{not json")
    assert code == 1
    assert "error" in json.loads(err)


def test_usage_errors():
    assert call([])[0] == 2
    assert call(["frobnicate"])[0] == 2
    assert call(["info", "--bogus"])[0] == 2
    assert call(["enumerate"])[0] == 2
    assert call(["ode", "--family", "tripod", "--n", "3"])[0] == 2
    assert call(["iso", "-", "-"])[0] == 2
    assert call(["info", "--format", "dot"], json.dumps(NINE_JSON))[0] == 2


def test_enumerate_two():
    code, out, _ = call(["enumerate", "--n", "2"])
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 3 and len(data["dessins"]) == 3


def test_enumerate_trees():
    code, out, _ = call(["enumerate", "--n", "5", "--trees"])
    assert json.loads(out)["count"] == 10


def test_enumerate_limit_is_a_domain_error():
    code, _, err = call(["enumerate", "--n", "8"])
    assert code == 1 and json.loads(err)["error"] == "HypermapError"


def test_ode_verify_star():
    code, out, _ = call(["ode", "--family", "star", "--n", "3", "--verify"])
    assert code == 0
    data = json.loads(out)
    assert data["verification"]["pass"] is True
    assert data["ode"]["order"] == 1


def test_ode_without_verify():
    code, out, _ = call(["ode", "--family", "chain", "--n", "4"])
    assert code == 0 and json.loads(out)["q0"]["exact"] == ["1/16"]


def test_canon_and_iso(tmp_path, nine_file):
    code, out, _ = call(["canon", "--input", nine_file])
    assert code == 0
    canon = tmp_path / "canon.json"
    canon.write_text(out)
    code, out, _ = call(["iso", nine_file, str(canon)])
    assert code == 0 and json.loads(out) is True
    code, out, _ = call(["iso", nine_file, "-"], json.dumps(to_json(plane_trees(9)[0])))
    assert code == 0 and json.loads(out) is False


def test_render_dot(nine_file):
    code, out, _ = call(["render", "--input", nine_file])
    assert code == 0 and out.startswith("graph dessin {") and out.count(" -- ") == 9
    assert call(["render", "--input", nine_file, "--format", "json"])[0] == 2


def test_output_file(tmp_path, nine_file):
    target = tmp_path / "out.json"
    code, out, _ = call(["canon", "--input", nine_file, "--output", str(target)])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["n"] == 9


def test_shabat_monodromy_reports(tmp_path):
    tree = {"n": 5, "sigma": [[1, 2], [3, 4], [5]], "alpha": [[1], [2, 3], [4, 5]]}
    rep = tmp_path / "solver.json"
    code, poly, _ = call(["shabat", "--report", str(rep)], json.dumps(tree))
    assert code == 0
    assert set(json.loads(poly)) == {"coeffs"}
    report = json.loads(rep.read_text())
    assert report["residual"] <= 1e-10 and report["seed"] == 0
    mrep = tmp_path / "mono.json"
    code, dessin, _ = call(["monodromy", "--report", str(mrep), "--loop-radius", "0.2"], poly)
    assert code == 0
    assert list(json.loads(dessin)) == ["n", "sigma", "alpha"]
    m = json.loads(mrep.read_text())
    assert m["basepoint"] == [0.5, 0.0] and "steps" in m


def test_monodromy_rejects_unnormalised_polynomial():
    code, _, err = call(["monodromy"], json.dumps({"coeffs": [[0, 0], [-3, 0], [0, 0], [4, 0]]}))
    assert code == 1 and json.loads(err)["error"] == "InconsistentMonodromyError"


def test_connine_file(tmp_path, nine_file):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nformat = text\ncap = 10\n")
    assert read_config(str(cfg)) == {"format": "text", "cap": 10}
    code, out, _ = call(["info", "--input", nine_file, "--config", str(cfg)])
    assert code == 0 and "group_order: >10" in out
    # flags win over the file
    code, out, _ = call(["info", "--input", nine_file, "--config", str(cfg), "--format", "json"])
    assert json.loads(out)["group_order"] == ">10"
    cfg.write_text("nonsense = 1\n")
    assert call(["info", "--input", nine_file, "--config", str(cfg)])[0] == 2


def test_outputs_are_deterministic():
    tree = json.dumps(to_json(plane_trees(6)[5]))
    first = call(["shabat", "--seed", "3"], tree)
    second = call(["shabat", "--seed", "3"], tree)
    assert first == second and first[0] == 0


def _sh(args, stdin):
    return subprocess.run(
        [sys.executable, "-m", "dessins.cli", *args], input=stdin, capture_output=True, text=True, check=False
    )


@pytest.mark.parametrize("index", [0, 4, 9])
def test_shell_pipeline_round_trip(tmp_path, index):
    tree = tmp_path / "tree.json"
    tree.write_text(json.dumps(to_json(plane_trees(5)[index])))
    poly = _sh(["shabat", "--input", str(tree)], "")
    assert poly.returncode == 0, poly.stderr
    dessin = _sh(["monodromy"], poly.stdout)
    assert dessin.returncode == 0, dessin.stderr
    iso = _sh(["iso", str(tree), "-"], dessin.stdout)
    assert iso.returncode == 0 and iso.stdout.strip() == "true"
