import json
import os
import subprocess
import sys
from importlib import resources

import pytest

from qsympairs.cartan import cartan_from_json, named_cartan
from qsympairs.cli import main
from qsympairs.schemas import (
    CartanModel,
    Diagnostic,
    PairModel,
    PresentationModel,
    QSPParamsModel,
    read_model,
)
from qsympairs.errors import ParseError
from qsympairs.weyl import pair_from_json

DATA = resources.files("qsympairs") / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_admissible_check_examples(capsys):
    code, js = run_json(capsys, "admissible", "check", "--cartan", str(DATA / "a3.json"), "--X", "1,3", "--tau", "id")
    assert code == 0 and js["admissible"] is True
    code, js = run_json(capsys, "admissible", "check", "--cartan", "A3", "--X", "2", "--tau", "(1 3)")
    assert code == 0 and js["admissible"]
    code, js = run_json(capsys, "admissible", "check", "--cartan", "A3", "--X", "1", "--tau", "id")
    assert code == 1 and not js["admissible"]
    assert [f["condition"] for f in js["failures"]] == ["3"]


def test_admissible_list_roundtrip(capsys):
    code, js = run_json(capsys, "admissible", "list", "--cartan", "A2")
    assert code == 0 and len(js["orbits"]) == 3
    d = cartan_from_json(read_model(CartanModel, js["cartan"]).model_dump())
    assert d == named_cartan("A2")
    for o in js["orbits"]:
        model = read_model(PairModel, o["representative"])
        assert pair_from_json(d, model.model_dump()).label() == o["label"]


def test_pair_input_forms(capsys):
    inline = json.dumps({"X": [1, 3], "tau": {"1": 1, "2": 2, "3": 3}})
    code, js = run_json(capsys, "admissible", "check", "--cartan", "A3", "--pair", inline)
    assert code == 0
    code, js = run_json(capsys, "admissible", "check", "--cartan", "A3", "--pair", str(DATA / "pair-a3-13-id.json"))
    assert code == 0 and js["pair"]["X"] == [1, 3]
    matrix = json.dumps({"matrix": [[2, -1], [-1, 2]]})
    code, js = run_json(capsys, "admissible", "list", "--cartan", matrix)
    assert code == 0 and len(js["orbits"]) == 3


def test_affinize(capsys):
    code, js = run_json(capsys, "affinize", "--cartan", "A1")
    assert code == 0 and js["cartan"]["matrix"] == [[2, -2], [-2, 2]] and js["marks"] == [1, 1]
    assert js["K_c_central"]
    code, js = run_json(capsys, "affinize", "--cartan", "A3", "--X", "1,3", "--tau", "id")
    assert code == 0 and js["pair"]["X"] == [1, 3]


def test_gim(capsys):
    code, js = run_json(capsys, "gim", "double")
    assert code == 0 and js["unoriented"]
    read_model(CartanModel, js["double"])
    code, js = run_json(capsys, "gim", "present")
    assert code == 0 and js["ok"] and len(js["relations"]) == 45
    read_model(PresentationModel, js)


def test_qsp_relations_q_onsager(capsys):
    code, js = run_json(capsys, "qsp", "relations", "--cartan", str(DATA / "affine-sl2.json"), "--X", "", "--tau", "id",
                        "--c", "c0,c1")
    assert code == 0
    pres = read_model(PresentationModel, js)
    assert [r.kind for r in pres.relations] == ["ker3", "ker3"] and all(r.verified for r in pres.relations)


def test_qsp_verify_serre(capsys):
    code, js = run_json(capsys, "qsp", "verify", "serre", "--cartan", str(DATA / "a3.json"), "--X", "1,3", "--tau", "id")
    assert code == 0 and js["ok"]
    code, js = run_json(capsys, "qsp", "verify", "--all")
    assert code == 0 and js["ok"] and len(js["menu"]) == 12


def test_params_roundtrip(capsys):
    args = ["qsp", "generators", "--cartan", "A3", "--X", "2", "--tau", "1:3,3:1", "--c", "3=q^2"]
    code, first = run_json(capsys, *args)
    assert code == 0 and first["params"]["c"] == {"1": "c1", "3": "q^2"}
    params = read_model(QSPParamsModel, first["params"])
    back = json.dumps(params.model_dump())
    code, second = run_json(capsys, "qsp", "generators", "--cartan", "A3", "--params", back)
    assert code == 0 and second == first


def test_format_outputs(capsys):
    args = ["qsp", "relations", "--cartan", "affine-sl2", "--X", "", "--tau", "id"]
    code, tex, _ = run(capsys, *args, "--format", "latex")
    assert code == 0 and tex.startswith("\\begin{align*}") and "c_{0}" in tex
    assert tex.count("(") == tex.count(")")
    code, text, _ = run(capsys, *args, "--format", "text")
    assert code == 0 and text.count("[ok]") == 2


def test_specialize(capsys):
    code, js = run_json(capsys, "specialize", "--cartan", "A2", "--element", "(q^2) E1 K[1,0] E2 F1")
    assert code == 0 and js["specialized"] == "e1 e2 f1"
    code, js = run_json(capsys, "specialize", "--cartan", "A2", "--element", "f1 e1", "--classical")
    assert js["element"] == "-h1 + e1 f1"
    code, js = run_json(capsys, "specialize", "--cartan", "A3", "--X", "1,3", "--tau", "id")
    assert code == 0 and js["B"]["ok"] and js["involution"]["ok"]
    code, js = run_json(capsys, "specialize", "--cartan", "A3", "--X", "1", "--tau", "id", "--force")
    assert code == 1 and js["involution"]["failures"] == ["e2", "f2"]


def test_center_and_iwasawa(capsys):
    code, js = run_json(capsys, "center-probe", "--cartan", "affine-sl2", "--X", "", "--tau", "id", "--degree", "3")
    assert code == 0 and js["only_scalars"]
    code, js = run_json(capsys, "iwasawa-check", "--cartan", "A1", "--X", "", "--tau", "id", "--degree", "2")
    assert code == 0 and js["ok"]


def test_map(capsys):
    code, js = run_json(capsys, "map", "--cartan", "A2", "--map", "T1", "--element", "E2")
    assert code == 0 and js["result"] == "E1 E2 - q^-1*E2 E1"
    code, js = run_json(capsys, "map", "--cartan", "A3", "--X", "1,3", "--tau", "id", "--map", "theta_q", "--verify")
    assert code == 0 and js["verify"]["ok"]


def test_computational_errors_are_diagnostics(capsys):
    code, js = run_json(capsys, "qsp", "relations", "--cartan", "G2", "--X", "", "--tau", "id")
    assert code == 3 and js["error"] == "UnsupportedCase"
    read_model(Diagnostic, js)
    code, js = run_json(capsys, "specialize", "--cartan", "A2", "--element", "F1 E1")
    assert code == 3 and js["error"] == "PoleAtOne"
    code, js = run_json(capsys, "qsp", "relations", "--cartan", "affine-sl2", "--X", "", "--tau", "id", "--source", "extract")
    assert code == 0
    code, js = run_json(capsys, "--cap", "2", "qsp", "relations", "--cartan", "affine-sl2", "--X", "", "--tau", "id",
                        "--source", "extract")
    assert code == 3 and js["error"] == "HeightCapExceeded"


def test_usage_errors(capsys):
    code, out, err = run(capsys, "admissible", "check", "--cartan", "nope")
    assert code == 2 and not out and "nope" in err
    code, out, err = run(capsys, "qsp", "generators")
    assert code == 2 and "--cartan" in err
    with pytest.raises(SystemExit) as exc:
        main(["center-probe", "--cartan", "A1", "--degree", "0"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["nonsense"])


def test_schema_rejects_bad_input():
    with pytest.raises(ParseError):
        read_model(CartanModel, {"matrix": [[2, -1]]})
    with pytest.raises(ParseError):
        read_model(PairModel, {"X": [1], "extra": 1})
    with pytest.raises(ParseError):
        read_model(CartanModel, "{not json")


def test_output_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "qsympairs.cli", "qsp", "relations", "--cartan", "A3", "--X", "2", "--tau", "(1 3)"]
    outs = set()
    for seed in ("0", "1", "12345"):
        env = {**os.environ, "PYTHONHASHSEED": seed}
        outs.add(subprocess.run(argv, env=env, capture_output=True, check=True).stdout)
    assert len(outs) == 1
