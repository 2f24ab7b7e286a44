import json
import subprocess
import sys
from pathlib import Path

import pytest

from gdf.cli import main
from gdf.cylinders import cylinders_isomorphic_fiberwise, cylinders_isomorphic_over_B, transport
from gdf.divisors import GraphDivisor, type_divisor

import gen
import oracles

GOLDEN = json.loads((Path(__file__).parent / "data" / "cyliso_golden.json").read_text())


def run(capsys, *argv):
    status = main([str(a) for a in argv])
    out = capsys.readouterr()
    return status, out.out, out.err


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_corpus_size():
    assert len(GOLDEN) >= 20


@pytest.mark.parametrize("case", GOLDEN, ids=[c["name"] for c in GOLDEN])
def test_cyliso_golden(case, tmp_path, capsys):
    x, y = write(tmp_path, "x.json", case["x"]), write(tmp_path, "y.json", case["y"])
    args = ["cyliso", x, y] + (["--fiberwise"] if case.get("fiberwise") else [])
    status, out, _ = run(capsys, *args)
    report = json.loads(out)
    assert status == case["status"]
    assert report["isomorphic"] == (status == 0)
    if status == 0:
        assert report["shift"] == case["shift"]
    else:
        assert report["reason"] == case["reason"]

    # library and brute-force oracle agree with the recorded verdict
    dx, dy = GraphDivisor.from_json(case["x"]), GraphDivisor.from_json(case["y"])
    fn = cylinders_isomorphic_fiberwise if case.get("fiberwise") else cylinders_isomorphic_over_B
    assert fn(dx, dy).isomorphic == (status == 0)
    perms = dx.base.automorphisms() if case.get("fiberwise") else [tuple(range(dx.n))]
    gens = dx.base.principal_lattice
    expected = any(
        oracles.cylinder_oracle(type_divisor(transport(dx, s)).levels, type_divisor(dy).levels, gens)
        for s in perms
    )
    assert expected == (status == 0)


def test_tp_reference(capsys):
    status, out, _ = run(capsys, "tp", json.dumps(gen.BUSH_0212), "--format", "text")
    assert status == 0 and out.strip() == "(0,2,1,2)"


def test_model_reference(tmp_path, capsys):
    p = write(tmp_path, "t.json", gen.BUSH_0212)
    status, out, _ = run(capsys, "model", p, "--format", "text")
    assert status == 0
    assert "t1*z - (u^5 - 10*u^4 + 35*u^3 - 50*u^2 + 24*u) = 0" in out
    assert "FAIL" not in out
    status, out, _ = run(capsys, "model", p, "--roots", "1/2", "-1", "3", "4", "5")
    assert status == 0
    assert json.loads(out)["sequence"]["roots"][0]["alpha"] == "1/2"


def test_model_spring(tmp_path, capsys):
    p = write(tmp_path, "t.json", gen.SPRING_00312)
    status, out, _ = run(capsys, "model", p, "--spring")
    data = json.loads(out)
    assert status == 0
    assert data["spring"]["p_top"] == ["0", "1"]
    assert data["counts"] == {"N": 6, "N_matches_type": True, "level_counts": [6, 6, 3, 2]}


def test_config_commands(tmp_path, capsys):
    d = write(tmp_path, "d.json", {"trees": [[[], []]]})
    s1 = write(tmp_path, "s1.json", {"0": ["0", "1"]})
    s2 = write(tmp_path, "s2.json", {"0": ["5", "7"]})
    s3 = write(tmp_path, "s3.json", {"0": ["-1", "1"]})
    status, out, _ = run(capsys, "orbiteq", d, s1, s2)
    assert status == 0 and json.loads(out)["element"]["alpha"] == "2"
    status, out, _ = run(capsys, "slice", d, s2)
    assert json.loads(out) == {"configuration": {"0": ["-1", "1"]}, "shifts": {"b1": ["-6"]}}
    status, out, _ = run(capsys, "stab", d, s3)
    assert json.loads(out)["d"] == 2
    status, out, _ = run(capsys, "centers", d, s1)
    assert [c["coordinate"] for c in json.loads(out)["levels"][0]] == ["0", "1"]

    tri = write(tmp_path, "tri.json", {"trees": [[[], [], []]]})
    a = write(tmp_path, "a.json", {"0": [0, 1, 3]})
    b = write(tmp_path, "b.json", {"0": [0, 1, 4]})
    status, out, _ = run(capsys, "orbiteq", tri, a, b)
    assert status == 1 and json.loads(out)["equivalent"] is False


def test_dimensions_commands(capsys):
    bush = json.dumps({"trees": [gen.BUSH_0212]})
    assert run(capsys, "configdim", bush, "--format", "text")[1].strip() == "10"
    status, out, _ = run(capsys, "modulidim", bush)
    assert status == 0 and json.loads(out)["moduli_dim"] == 6
    units = json.dumps({"base": {"points": ["p", "q"], "units_trivial": False}, "trees": [[[]], [[]]]})
    status, out, _ = run(capsys, "modulidim", units)
    assert status == 1 and json.loads(out)["flag"] == "units-nontrivial"


def test_stretch_and_canon(tmp_path, capsys):
    d = write(tmp_path, "d.json", {"base": "rigid", "trees": [gen.FORK_012]})
    status, out, _ = run(capsys, "stretch", d, "2", "--check-law")
    data = json.loads(out)
    assert status == 0 and data["law_holds"]
    back = write(tmp_path, "s.json", data)
    status, out, _ = run(capsys, "typediv", back)
    assert json.loads(out)["levels"] == [[3, 4, 4]]
    status, _, err = run(capsys, "stretch", d, "1", "--principal")
    assert status == 2 and "principal" in err
    status, out, _ = run(capsys, "canon", json.dumps({"trees": [[[[]]]]}))
    assert json.loads(out) == {"levels": [[0]]}


def test_normal_form_commands(capsys):
    status, out, _ = run(capsys, "giz", "0,1,2", "--format", "text")
    assert status == 0 and json.loads(out) == [[[], []], []]
    status, out, _ = run(capsys, "bushify", json.dumps({"trees": [gen.FORK_012]}))
    assert json.loads(out)["trees"] == [[[[]], [[]], []]]


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["tp", "[[]"], "line 1"),
        (["tp", "missing.json"], "no such file"),
        (["typediv", '{"tree": []}'], "trees"),
        (["giz", "1,1"], "type"),
        (["cyliso", '{"trees": [[]]}', '{"trees": [[], []]}'], "different base"),
        (["slice", '{"trees": [[[], []]]}', '{"0": [1, 1]}'], "repeated"),
        (["model", json.dumps(gen.FORK_012)], "bush"),
    ],
)
def test_input_errors(argv, needle, capsys):
    status, _, err = run(capsys, *argv)
    assert status == 2
    assert needle in err


def test_output_file_and_determinism(tmp_path, capsys):
    x = json.dumps({"trees": [gen.BUSH_0212, gen.FORK_012]})
    outs = []
    for k in range(2):
        target = tmp_path / f"o{k}.json"
        assert run(capsys, "cyliso", x, x, "-o", target)[0] == 0
        outs.append(target.read_text())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["shift"] == [0, 0]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gdf", "tp", json.dumps(gen.SPRING_00312), "--format", "text"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "(0,0,3,1,2)"
