import json

import pytest

from swisscheese import persistence
from swisscheese.calculus import RationalMap
from swisscheese.cheese import build_cheese
from swisscheese.cli import FAIL, OK, USAGE, main
from swisscheese.geometry import QPoint
from swisscheese.measures import control_disc_algebra, control_problem
from swisscheese.slits import build_chain, figure_block, system_from_rule
from swisscheese.targets import default_segment


def _build(tmp_path, name="ws.json", *flags):
    out = tmp_path / name
    assert main(["build", "--out", str(out), *flags]) == OK
    return out


# persistence ----------------------------------------------------------------------

def test_round_trip_full_workspace():
    X = build_cheese(default_segment(), 5, kmax=6)
    ws = persistence.WorkspaceFile(target=X.target, cheese=X)
    c = X.groups[0].deleted[0].center
    ws.maps["f"] = (RationalMap.pole(c) + RationalMap.monomial(2, QPoint(1, -1)), [0])
    ws.chains["c"] = build_chain(figure_block(), 3)
    ws.systems["s"] = system_from_rule(3, "rightward")
    ws.problems["p"] = control_problem(4)
    ws.results["p"] = control_disc_algebra(4)
    text = persistence.dumps(ws)
    again = persistence.dumps(persistence.loads(text))
    assert again == text
    assert persistence.canonicalize(text) == text


def test_schema_mismatch_and_bad_refs():
    text = persistence.dumps(persistence.WorkspaceFile())
    d = json.loads(text)
    d["schema_version"] = 9
    with pytest.raises(persistence.SchemaError):
        persistence.loads(json.dumps(d))
    X = build_cheese(default_segment(), 2, kmax=4)
    ws = persistence.WorkspaceFile(target=X.target, cheese=X)
    ws.maps["f"] = (RationalMap.pole(QPoint(0, 0)), [99])
    with pytest.raises(persistence.SchemaError):
        persistence.loads(persistence.dumps(ws))


# cli ------------------------------------------------------------------------------

def test_build_then_verify(tmp_path, capsys):
    out = _build(tmp_path, "ws.json", "--discs", "10", "--kmax", "8")
    assert main(["verify", str(out)]) == OK
    assert "all checks passed" in capsys.readouterr().out


def test_build_zero_discs_is_closed_disc(tmp_path):
    out = _build(tmp_path, "ws.json", "--discs", "0")
    ws = persistence.read(out)
    assert ws.cheese.groups == []
    assert ws.cheese.membership(QPoint(1, 0)) == "boundary"
    assert main(["verify", str(out)]) == OK


def test_cantor_zero_schedule_warns(tmp_path, capsys):
    out = _build(tmp_path, "ws.json", "--target", "cantor", "--discs", "3", "--kmax", "4",
                 "--stage", "3", "--svc-ratio", "1/3", "--svc-first", "1/3")
    assert "warning" in capsys.readouterr().err
    assert main(["verify", str(out)]) == OK


def test_slit_chain_build_and_verify(tmp_path):
    out = _build(tmp_path, "ws.json", "--target", "slit-chain", "--discs", "5", "--kmax", "4")
    ws = persistence.read(out)
    assert "target" in ws.chains and "target" in ws.systems
    assert main(["verify", str(out)]) == OK


def test_verify_empty_workspace(tmp_path, capsys):
    p = tmp_path / "empty.json"
    persistence.write(persistence.WorkspaceFile(), p)
    assert main(["verify", str(p)]) == OK
    assert "nothing to verify" in capsys.readouterr().out


def test_verify_schema_error_is_usage(tmp_path):
    p = tmp_path / "bad.json"
    d = json.loads(persistence.dumps(persistence.WorkspaceFile()))
    d["schema_version"] = 9
    p.write_text(json.dumps(d))
    assert main(["verify", str(p)]) == USAGE
    assert main(["verify", str(tmp_path / "missing.json")]) == USAGE


def test_mutated_epsilon_names_epsilon_bound(tmp_path, capsys):
    out = _build(tmp_path, "ws.json", "--discs", "6", "--kmax", "8")
    d = json.loads(out.read_text())
    d["cheese"]["groups"][0]["epsilon"] = "1/1"
    out.write_text(json.dumps(d))
    capsys.readouterr()
    assert main(["verify", str(out)]) == FAIL
    err = capsys.readouterr().err
    assert "epsilon_bound" in err


def test_classify_outputs(capsys):
    assert main(["classify", "--direction", "right", "--blocks", "5"]) == OK
    assert capsys.readouterr().out.strip() == "R-points: {x_0}; points of continuity: none"
    assert main(["classify", "--direction", "left", "--blocks", "5"]) == OK
    assert capsys.readouterr().out.strip() == "R-points: none; points of continuity: {x_0}"
    assert main(["classify", "--direction", "none", "--blocks", "3"]) == OK
    line = capsys.readouterr().out.strip()
    assert line == "R-points: {K_1, K_2, K_3, x_0}; points of continuity: {K_1, K_2, K_3, x_0}"


def test_measure_control_and_point_mass(tmp_path, capsys):
    assert main(["measure", "--control", "8"]) == OK
    out = capsys.readouterr().out
    assert "status: feasible" in out and out.count("weight 1/8") == 8
    ws = _build(tmp_path, "ws.json", "--discs", "3", "--kmax", "6")
    capsys.readouterr()
    assert main(["measure", "--workspace", str(ws), "--point", "0,0", "--testfns", "4", "--atom-cap", "1"]) == OK
    out = capsys.readouterr().out
    assert "EVIDENCE" in out and "infeasible" not in out


def test_measure_point_outside_is_usage(tmp_path):
    ws = _build(tmp_path, "ws.json", "--discs", "3", "--kmax", "6")
    c = persistence.read(ws).cheese.deleted_discs()[0].center
    assert main(["measure", "--workspace", str(ws), "--point", f"{c.re},{c.im}"]) == USAGE
    assert main(["measure", "--workspace", str(ws), "--point", "2,0"]) == USAGE


def test_usage_errors():
    assert main([]) == USAGE
    assert main(["build"]) == USAGE
    assert main(["build", "--out", "x.json", "--discs", "-1"]) == USAGE
    assert main(["measure", "--control", "4", "--atom-cap", "3/2"]) == USAGE


def test_determinism_bytes(tmp_path):
    a = _build(tmp_path, "a.json", "--discs", "8", "--kmax", "6", "--seed", "3")
    b = _build(tmp_path, "b.json", "--discs", "8", "--kmax", "6", "--seed", "3")
    assert a.read_bytes() == b.read_bytes()
    for what in ("cheese", "chain", "block", "empty"):
        extra = ["--workspace", str(a)] if what == "cheese" else []
        s1, s2 = tmp_path / f"{what}1.svg", tmp_path / f"{what}2.svg"
        assert main(["render", what, *extra, "--out", str(s1)]) == OK
        assert main(["render", what, *extra, "--out", str(s2)]) == OK
        assert s1.read_bytes() == s2.read_bytes()


def test_render_unwritable(tmp_path):
    assert main(["render", "empty", "--out", str(tmp_path / "no" / "such" / "dir.svg")]) != OK
