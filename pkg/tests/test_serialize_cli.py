import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from corrspace import aklt, cli, serialize
from corrspace.cluster import ClusterSpec, build_cluster
from corrspace.operators import max_norm

finite = st.floats(-1e3, 1e3, allow_nan=False)


@given(hnp.arrays(np.complex128, st.tuples(st.integers(1, 3), st.integers(1, 3)),
                  elements=st.builds(complex, finite, finite)))
def test_array_round_trip(a):
    back = serialize.array_from_json(json.loads(json.dumps(serialize.array_to_json(a))))
    assert np.allclose(back, a, atol=1e-12)


def test_complex_encoding():
    assert serialize.complex_to_json(1 - 2j) == [1.0, -2.0]
    assert serialize.complex_to_json(1e-17) == [0.0, 0.0]
    assert serialize.to_jsonable({"f": Fraction(3, 4), "b": np.bool_(True), "i": np.int64(2)}) == \
        {"f": "3/4", "b": True, "i": 2}


def test_kraus_round_trip():
    fam = aklt.so_fund_family(2)
    data = json.loads(serialize.dumps(serialize.kraus_to_json(fam.kraus, fam.to_dict())))
    back = serialize.kraus_from_json(data)
    assert max_norm(back.ops - fam.kraus.ops) < 1e-14
    assert back.labels == fam.kraus.labels and data["family"] == "so_fund"


def test_plan_parsing_variants():
    plan = serialize.plan_from_json({"family": "su", "N": 3,
                                     "steps": [{"generator": "Z-mub:1", "theta": 0.2}, {"intent": "wire"},
                                               {"intent": "projection"}],
                                     "input": [[1, 0], [0, 1], [0, 0]]})
    assert len(plan.steps) == 3 and plan.family.name == "su(N=3)"
    assert np.allclose(plan.input_state, np.array([1, 1j, 0]) / np.sqrt(2))
    cl = serialize.plan_from_json({"family": {"family": "cluster", "d": 3, "x": 1},
                                   "steps": [{"basis": ["F1", "F2:0.1"]}]})
    assert cl.family.tag == "cluster" and cl.family.phys_dim == 9


@pytest.mark.parametrize("bad,msg", [
    ({"family": "su", "N": 3, "steps": [{"theta": 0.2}]}, "plan.steps[0]: missing field 'generator'"),
    ({"family": "su", "N": 3}, "missing field 'steps'"),
    ({"family": "g2", "steps": [{}]}, "family"),
    ({"family": "su", "N": 3, "steps": [{"intent": "dance"}]}, "unknown intent"),
    ({"family": "spin1", "steps": [{"intent": "wire"}], "input": [1, 0, 0]}, "plan:"),
    ({"family": "spin1", "steps": []}, "nonempty"),
])
def test_plan_errors_name_the_field(bad, msg):
    with pytest.raises(serialize.PlanParseError, match=msg.replace("[", r"\[").replace("]", r"\]")):
        serialize.plan_from_json(bad)


def test_load_plan_reports_json_position(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"family": "spin1",\n "steps": [}\n')
    with pytest.raises(serialize.PlanParseError, match="line 2"):
        serialize.load_plan(p)


# ---------------------------------------------------------------- CLI


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_timing(text):
    data = json.loads(text)
    data.pop("timing", None)
    return data


def test_build_cluster_state(capsys, tmp_path):
    out = tmp_path / "state.json"
    code, stdout, _ = run_cli(["build", "--d", "3", "--x", "1", "--N", "3", "--bc", "pbc", "--out", str(out)], capsys)
    assert code == 0 and "27 amplitudes" in stdout
    data = json.loads(out.read_text())
    psi = serialize.array_from_json(data["amplitudes"])
    assert max_norm(psi - build_cluster(ClusterSpec(3, 1, 3, "pbc"))) < 1e-12
    assert data["y"] == 2


def test_build_kraus(capsys):
    code, stdout, err = run_cli(["build", "--family", "sp", "--m", "1"], capsys)
    assert code == 0 and json.loads(stdout)["phys_dim"] == 10
    assert "sp(m=1)" in err


def test_build_rejects_non_power_of_two(capsys):
    code, _, err = run_cli(["build", "--family", "sp", "--n", "6"], capsys)
    assert code == 2 and "power of two" in err


def test_verify_cluster_suite(capsys):
    code, stdout, _ = run_cli(["verify", "cluster", "--d", "3", "--bc", "pbc"], capsys)
    data = json.loads(stdout)
    assert code == 0 and data["status"] == "pass"
    assert all(c["status"] == "pass" for c in data["checks"])


def test_verify_aklt_family(capsys):
    code, stdout, _ = run_cli(["verify", "aklt", "--family", "so-adj", "--l", "2"], capsys)
    assert code == 0 and json.loads(stdout)["status"] == "pass"


def test_verify_is_deterministic_apart_from_timing(capsys):
    args = ["verify", "engine", "--family", "spin1", "--seed", "3"]
    first = run_cli(args, capsys)[1]
    second = run_cli(args, capsys)[1]
    assert strip_timing(first) == strip_timing(second)
    assert "timing" in json.loads(first)


def test_run_census(capsys):
    code, stdout, _ = run_cli(["run", "--mode", "census", "--family", "su", "--N", "4"], capsys)
    data = json.loads(stdout)
    assert code == 0 and data["fraction"] == "4/5"


def test_run_plan_file(capsys, tmp_path):
    plan = tmp_path / "tele.json"
    plan.write_text(json.dumps({"family": {"family": "cluster", "d": 2, "x": 1},
                                "steps": [{"basis": "H"}, {"basis": "H"}], "input": [0.6, 0.8]}))
    code, stdout, _ = run_cli(["run", str(plan)], capsys)
    data = json.loads(stdout)
    assert code == 0 and data["n_branches"] == 4
    assert sum(b["probability"] for b in data["branches"]) == pytest.approx(1)
    labels = sorted(b["byproduct"]["label"] for b in data["branches"])
    assert len(set(labels)) == 4


def test_run_sample_is_reproducible(capsys, tmp_path):
    plan = tmp_path / "euler.json"
    plan.write_text(json.dumps({"family": "spin1", "steps": [
        {"generator": "Z", "theta": 0.3, "adaptive": True},
        {"generator": "X", "theta": 0.7, "adaptive": True}]}))
    a = run_cli(["run", str(plan), "--mode", "sample", "--seed", "5"], capsys)[1]
    b = run_cli(["run", str(plan), "--mode", "sample", "--seed", "5"], capsys)[1]
    assert strip_timing(a) == strip_timing(b)


def test_run_bad_plan_exit_code(capsys, tmp_path):
    plan = tmp_path / "bad.json"
    plan.write_text(json.dumps({"family": "su", "N": 3, "steps": [{"theta": 1}]}))
    code, _, err = run_cli(["run", str(plan)], capsys)
    assert code == 2 and "missing field 'generator'" in err


def test_table1(capsys):
    code, stdout, err = run_cli(["table1"], capsys)
    data = json.loads(stdout)
    assert code == 0
    census = {r["family"]: r["census"] for r in data["rows"]}
    assert census["su(N=5)"] == "5/6" and census["sp(m=2)"] == "5/9" and census["so_adj(l=3)"] == "10/21"
    assert "so_fund(l=3)" in err


def test_verify_all_passes(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, stdout, _ = run_cli(["verify", "all", "--out", str(out)], capsys)
    data = json.loads(out.read_text())
    assert code == 0 and data["status"] == "pass"
    assert "checks passed" in stdout and len(data["table1"]) == 13
