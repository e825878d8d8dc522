import json
import math

import numpy as np
import pytest

from lebsolve import catalog, cli
from lebsolve import io as lio
from lebsolve.errors import InputError
from lebsolve.measures import VectorMeasure


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- io --------------------------------------------------------------------------

@pytest.mark.parametrize("name,dims", [("grad:2", (2, 1, 2)), ("div:3", (3, 3, 1)), ("laplace:3", (3, 1, 1)),
                                       ("partial:2:2", (2, 1, 1)), ("D2:3", (3, 1, 6)), ("curl:3", (3, 3, 3))])
def test_operator_presets(name, dims):
    op = lio.operator_preset(name)
    assert (op.dim_N, op.dimE) == dims[:2]


def test_partial_preset_direction():
    op = lio.operator_preset("partial:2:2")
    np.testing.assert_allclose(op.symbol(np.array([0.3, 0.7]))[0, 0], 0.7)


@pytest.mark.parametrize("bad", ["grad", "grad:x", "foo:2", "partial:2:x"])
def test_bad_presets(bad):
    with pytest.raises(InputError):
        lio.operator_preset(bad)


def test_measure_presets():
    assert lio.measure_preset("empty").is_zero()
    d = lio.measure_preset("delta", 3)
    assert d.kind == "atomic" and d.dim_N == 3
    lifted = lio.measure_preset("lebesgue", 2, 16, dimE=2)
    assert lifted.dimE == 2 and not np.any(lifted.density[1])
    with pytest.raises(InputError):
        lio.measure_preset("nope")


@pytest.mark.parametrize("doc", [[1, 2], {"kind": "atomic"}, {"kind": "weird", "N": 2, "dimE": 1},
                                 {"kind": "atomic", "N": 2, "dimE": 1, "atoms": [{"point": [0, 0]}]}])
def test_malformed_measure_documents(doc):
    with pytest.raises(InputError):
        lio.parse_measure(doc)


def test_rasterize_conserves_mass():
    mu = VectorMeasure.atomic([[0.1, 0.2], [-0.5, 0.3]], [[1.0 + 2j], [0.5]])
    g = lio.rasterize(mu, 64)
    assert g.kind == "gridded"
    np.testing.assert_allclose(g.total_mass(), mu.total_mass(), rtol=1e-12)
    assert lio.rasterize(g) is g


def test_jsonable_non_finite_and_complex():
    doc = lio.to_jsonable({"a": math.inf, "b": -math.inf, "c": math.nan, "z": 1 + 2j, "v": np.arange(3),
                           "t": np.bool_(True)})
    assert doc == {"a": "inf", "b": "-inf", "c": "nan", "z": {"re": 1.0, "im": 2.0}, "v": [0, 1, 2], "t": True}
    json.dumps(doc, allow_nan=False)
    with pytest.raises(TypeError):
        lio.to_jsonable(object())


def test_operator_document_file(tmp_path):
    p = tmp_path / "op.json"
    p.write_text(json.dumps(catalog.gradient(2).to_document()))
    assert lio.load_operator(str(p)).dimF == 2
    with pytest.raises(InputError):
        lio.load_operator(str(tmp_path / "missing"))


# --- cli -------------------------------------------------------------------------

def test_operator_command(capsys):
    code, out, _ = run(capsys, "operator", "grad:2")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["certificate"]["elliptic"] and doc["result"]["certificate"]["canceling"]
    assert doc["manifest"]["command"] == "operator"


def test_output_is_byte_identical(capsys, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    argv = ["verify", "trace", "--ensemble", "5", "--resolution", "32", "--seed", "4"]
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    ta, tb = a.read_text(), b.read_text()
    # the manifest records the output path, which differs
    assert ta.replace(str(a), "X") == tb.replace(str(b), "X")


def test_solve_command(capsys):
    code, out, _ = run(capsys, "solve", "grad:2", "lebesgue", "--resolution", "32", "--ensemble", "5")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["weak_residual"] <= 1e-8


def test_measure_command_line(capsys):
    code, out, _ = run(capsys, "measure", "line", "--p", "2", "--resolution", "64")
    assert code == 0
    doc = json.loads(out)["result"]
    assert doc["measure"]["kind"] == "atomic"
    assert "atoms deposited on a grid" in doc["energy"]["2.0"]["notes"]


def test_input_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "m.json"
    bad.write_text("{not json")
    code, out, err = run(capsys, "solve", "grad:2", str(bad))
    assert code == 2 and out == ""
    assert json.loads(err)["exit_code"] == 2
    code, _, err = run(capsys, "verify", "hardy", "--ensemble", "0")
    assert code == 2


def test_precondition_exit_code_with_witness(capsys):
    code, _, err = run(capsys, "solve", "partial:2", "delta", "--resolution", "16")
    assert code == 4
    doc = json.loads(err)
    assert doc["error"] == "EllipticityError" and len(doc["witness"]) == 2
    code, _, _ = run(capsys, "solve", "laplace:2", "delta", "--resolution", "16")
    assert code == 4


def test_verify_hardy_passes(capsys):
    code, out, _ = run(capsys, "verify", "hardy", "--ensemble", "20", "--resolution", "64")
    assert code == 0 and json.loads(out)["result"]["status"] == "pass"


def test_verify_line_measure_hypotheses(capsys):
    code, out, _ = run(capsys, "verify", "fundamental-lemma", "--measure", "line", "--ensemble", "5",
                       "--resolution", "64")
    assert code == 0 and json.loads(out)["result"]["status"] == "hypotheses not met"


def test_verify_triviality_and_necessity(capsys):
    code, out, _ = run(capsys, "verify", "triviality", "--measure", "delta", "--p", "1")
    assert code == 0 and json.loads(out)["result"]["status"] == "divergent"
    code, out, _ = run(capsys, "verify", "necessity", "--resolution", "64")
    assert code == 0 and json.loads(out)["result"]["status"] == "pass"


def test_p_value_parser():
    assert cli._p_value("inf") == math.inf
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["measure", "example", "--p", "two"])
