import json

import pytest

from hybrix.algebra import FiniteBAO, hybrid, structure_to_json
from hybrix.cli import main
from hybrix.corpus import derivation
from hybrix.proof import proof_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def alg(tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps(structure_to_json(hybrid(FiniteBAO.identity(1), [0]))))
    return str(path)


@pytest.fixture
def separating_frame(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"worlds": ["u", "v"], "rel": [["u", "u"]], "points": ["v"]}))
    return str(path)


def test_parse(capsys):
    code, out = run(capsys, "parse", "<>i1 -> p")
    assert code == 0 and out


def test_parse_language_error(capsys):
    assert main(["parse", "--lang", "H", "E p1"]) == 2


def test_valid_holds_and_fails(capsys, alg):
    assert run(capsys, "valid", "--algebra", alg, "--formula", "<>i1")[0] == 0
    code, out = run(capsys, "valid", "--algebra", alg, "--formula", "p")
    assert code == 1 and out["valid"] is False


def test_product_breaks_nominal(capsys, alg):
    code, out = run(capsys, "product", "--left", alg, "--right", alg, "--formula", "<>i1")
    assert code == 1


def test_perm(capsys, alg):
    assert run(capsys, "perm", "--algebra", alg)[0] == 0


def test_frame_validity(capsys, separating_frame):
    assert run(capsys, "valid", "--frame", separating_frame, "--formula", "j -> []bot")[0] == 0
    assert run(capsys, "valid", "--frame", separating_frame, "--formula", "[]bot")[0] == 1


def test_dualize_and_roundtrip(capsys, alg, tmp_path):
    code, frame = run(capsys, "dualize", "--to", "frame", alg)
    assert code == 0
    fpath = tmp_path / "f.json"
    fpath.write_text(json.dumps(frame["frame"]))
    assert run(capsys, "roundtrip", "--frame", str(fpath))[0] == 0
    assert run(capsys, "roundtrip", "--algebra", alg)[0] == 0


def test_prove_check(capsys, tmp_path):
    e = derivation("name-separation")
    path = tmp_path / "p.json"
    path.write_text(json.dumps(proof_to_json(e.derivation, e.logic)))
    code, out = run(capsys, "prove-check", str(path))
    assert code == 0 and out["ok"]
    obj = proof_to_json(e.derivation, e.logic)
    obj["logic"]["plus"] = False
    path.write_text(json.dumps(obj))
    code, out = run(capsys, "prove-check", str(path))
    assert code == 1 and out["error"]["index"] == 2


def test_missing_file_is_usage_error(capsys):
    assert main(["perm", "--algebra", "/nonexistent.json"]) == 2


def test_gen_counts(capsys):
    for kind, flag in [("bao", "--atoms"), ("hybrid", "--atoms"), ("frame", "--worlds")]:
        code, out = run(capsys, "gen", kind, flag, "1")
        assert code == 0 and out["count"] == 2


def test_gen_random_is_deterministic(capsys):
    a = run(capsys, "gen", "hybrid", "--atoms", "3", "--random", "5", "--seed", "7")[1]
    b = run(capsys, "gen", "hybrid", "--atoms", "3", "--random", "5", "--seed", "7")[1]
    assert a == b and a["count"] == 5


def test_suite_output_is_byte_identical(capsys, tmp_path):
    argv = ["suite", "at-characterization", "--max-atoms", "2", "--witness-dir", str(tmp_path)]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    strip = lambda s: {k: v for k, v in json.loads(s).items() if k != "seconds"}  # noqa: E731
    assert strip(first) == strip(second)


def test_backend(capsys):
    code, out = run(capsys, "backend")
    assert code == 0 and out["backend"] in ("cython", "python")
