import json
from fractions import Fraction

import pytest

from mmp_elliptic.cli import main
from mmp_elliptic.curves import WeightVector
from mmp_elliptic.modeljson import serialize_model

from modelkit import rational_degeneration

F = Fraction

TARGET = ",".join(["1"] * 10 + ["1/3", "1/3"])


@pytest.fixture()
def model_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(serialize_model(rational_degeneration(F(1))))
    return path


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_walls_command(capsys):
    status, out, _ = run(capsys, "walls", "-r", "2", "--types", "I1,I1", "--rational-base")
    assert status == 0
    walls = json.loads(out)
    kinds = [w["kind"] for w in walls]
    assert kinds.count("WII") == 4
    assert kinds.count("WIII") == 21
    assert "WI" not in kinds


def test_walls_segment(capsys):
    status, out, _ = run(
        capsys,
        "walls",
        "-r",
        "2",
        "--types",
        "I1,I1",
        "--rational-base",
        "--segment",
        "1/4,1/4",
        "1,1",
    )
    assert status == 0
    seg = json.loads(out)
    ts = [F(c["t"]) for c in seg["crossings"]]
    assert ts == sorted(ts, reverse=True)
    # the endpoints sit exactly on the sum-two wall (start) and the sum-half
    # wall (end); interior crossings pick up the constants strictly between
    hit = {w["constant"] for c in seg["crossings"] for w in c["walls"]}
    assert hit == {"1", "5/6", "3/4", "2/3", "1/2", "1/3"}
    start_on = {(w["kind"], w["constant"]) for w in seg["on_walls_at_start"]}
    assert ("WII", "2") in start_on and ("WII", "1") in start_on
    end_on = {(w["kind"], w["constant"]) for w in seg["on_walls_at_end"]}
    assert ("WIII", "1/2") in end_on and ("WIII", "1/4") in end_on


def test_model_report_json(capsys, model_file):
    status, out, _ = run(capsys, "model", str(model_file), "--format", "json")
    assert status == 0
    obj = json.loads(out)
    degrees = {c["id"]: c["section_degree"] for c in obj["components"]}
    assert degrees == {"c1": "9", "c2": "1"}
    assert obj["pseudo_fates"] == {}


def test_model_report_md_no_ansi(capsys, model_file, monkeypatch):
    monkeypatch.setenv("MMP_ELLIPTIC_COLOR", "0")
    status, out, _ = run(capsys, "model", str(model_file))
    assert status == 0
    assert "\033[" not in out
    assert "section degree" in out


def test_model_weight_override(capsys, model_file):
    status, out, _ = run(
        capsys, "model", str(model_file), "--weights", ",".join(["1"] * 10 + ["9/20", "9/20"]), "--format", "json"
    )
    assert status == 0
    obj = json.loads(out)
    degrees = {c["id"]: c["section_degree"] for c in obj["components"]}
    assert degrees["c2"] == "-1/10"


def test_model_glob_batch(capsys, tmp_path):
    for name, alpha in (("m1", F(1)), ("m2", F(4, 5))):
        (tmp_path / f"{name}.json").write_text(serialize_model(rational_degeneration(alpha)))
    status, out, _ = run(
        capsys, "model", str(tmp_path / "m1.json"), "--glob", str(tmp_path / "m*.json"), "--format", "json"
    )
    assert status == 0
    assert out.count('"components"') == 2


def test_reduce_command_end_to_end(capsys, model_file, tmp_path):
    dot_dir = tmp_path / "dots"
    status, out, _ = run(
        capsys,
        "reduce",
        str(model_file),
        "--to",
        TARGET,
        "--check-hassett",
        "--dot-dir",
        str(dot_dir),
    )
    assert status == 0
    trace = json.loads(out)
    assert [r["kind"] for r in trace["records"]] == ["LaNaveFlip", "TreeCollapseToPoint"]
    assert trace["halted"] is None
    final_fibers = {
        f["id"]: f for c in trace["final"]["components"] for f in c["fibers"]
    }
    assert final_fibers["a1"]["coeff"] == "2/3"
    assert final_fibers["a1"]["state"] == "Weierstrass"
    assert sorted(p.name for p in dot_dir.iterdir()) == [
        "final.dot",
        "step_000.dot",
        "step_001.dot",
        "step_002.dot",
    ]


def test_reduce_accepts_weight_files(capsys, model_file, tmp_path):
    to_file = tmp_path / "target.json"
    to_file.write_text(json.dumps(["1"] * 10 + ["1/3", "1/3"]))
    status, out, _ = run(capsys, "reduce", str(model_file), "--to", str(to_file))
    assert status == 0
    assert len(json.loads(out)["records"]) == 2


def test_reduce_rejects_invalid_model(capsys, tmp_path):
    obj = json.loads(serialize_model(rational_degeneration(F(1))))
    obj["components"][0]["degL"] = "-1"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    status, _, err = run(capsys, "reduce", str(bad), "--to", TARGET)
    assert status == 1
    assert "degL" in err


def test_volume_command(capsys, tmp_path, model_file):
    from modelkit import mk_fiber
    from mmp_elliptic.surfaces import BrokenEllipticSurface, EllipticComponent

    w = WeightVector(tuple([F(1)] * 12))
    comp = EllipticComponent(
        "c1", 1, 0, F(1), tuple(mk_fiber(f"f{i}", "I1", i, w) for i in range(1, 13))
    )
    path = tmp_path / "irr.json"
    path.write_text(serialize_model(BrokenEllipticSurface(w, (comp,))))
    status, out, _ = run(capsys, "volume", str(path))
    assert status == 0 and out.strip() == "21"
    # the two-component model has no volume: documented restriction, exit 1
    status, _, err = run(capsys, "volume", str(model_file))
    assert status == 1
    assert "unsupported-configuration" in err


def test_hassett_command(capsys, tmp_path):
    curve = {
        "vertices": [{"id": 1, "genus": 0}, {"id": 2, "genus": 0}],
        "edges": [[1, 2]],
        "markers": [{"index": i, "vertex": 1} for i in range(1, 11)]
        + [{"index": 11, "vertex": 2}, {"index": 12, "vertex": 2}],
    }
    path = tmp_path / "curve.json"
    path.write_text(json.dumps(curve))
    status, out, _ = run(
        capsys, "hassett", str(path), "--weights", ",".join(["1"] * 10 + ["5/12", "5/12"])
    )
    assert status == 0
    reduced = json.loads(out)
    assert len(reduced["vertices"]) == 1
    assert len(reduced["markers"]) == 12


def test_validate_command(capsys, tmp_path):
    obj = json.loads(serialize_model(rational_degeneration(F(1))))
    obj["components"][0]["degL"] = "-2"
    path = tmp_path / "model.json"
    path.write_text(json.dumps(obj))
    status, out, _ = run(capsys, "validate", str(path))
    assert status == 1
    assert "degL" in out


def test_usage_errors_exit_two(capsys, tmp_path):
    status, _, _ = run(capsys, "walls", "-r", "2", "--types", "I1")
    assert status == 2
    status, _, _ = run(capsys, "model", str(tmp_path / "missing.json"))
    assert status == 2
    status, _, _ = run(capsys, "nonsense")
    assert status == 2


def test_dot_output_is_deterministic(capsys, model_file):
    s1, out1, _ = run(capsys, "model", str(model_file), "--format", "dot")
    s2, out2, _ = run(capsys, "model", str(model_file), "--format", "dot")
    assert s1 == s2 == 0 and out1 == out2
    assert "cluster_c1" in out1 and "style=bold" in out1


def test_dot_shows_tree_attachment_label(capsys, tmp_path):
    from modelkit import flipped_degeneration

    path = tmp_path / "flipped.json"
    path.write_text(serialize_model(flipped_degeneration(F(9, 20))))
    status, out, _ = run(capsys, "model", str(path), "--format", "dot")
    assert status == 0
    assert 'label="II, 9/10"' in out


def test_dot_of_markerless_model_has_single_cluster(capsys, tmp_path):
    from mmp_elliptic.surfaces import BrokenEllipticSurface, EllipticComponent

    X = BrokenEllipticSurface(WeightVector(()), (EllipticComponent("c1", 1, 1, F(1), ()),))
    path = tmp_path / "plain.json"
    path.write_text(serialize_model(X))
    status, out, _ = run(capsys, "model", str(path), "--format", "dot")
    assert status == 0
    assert out.count("subgraph cluster_") == 1
    assert "style=bold" not in out
