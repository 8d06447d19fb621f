import json

import numpy as np
import pytest

import oracles as ref
from subsup.cli import main, parse_n_list
from subsup.errors import ValidationError
from subsup.instances import random_cut, random_gaussian_entropy
from subsup.io import (dumps, load_fixture, load_model, load_oracle, model_to_json, oracle_to_json, read_json,
                       save_model, write_json)
from subsup.polymatroid import ModularWeights


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_model_round_trip_is_byte_identical(tmp_path):
    m = load_fixture()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_model(m, a)
    save_model(load_model(a), b)
    assert a.read_bytes() == b.read_bytes()


def test_printed_table_is_rejected():
    with pytest.raises(ValidationError, match="class 1") as exc:
        load_fixture("table1_printed.json")
    assert "tables[0]" in str(exc.value)


def test_oracle_formats(tmp_path):
    f = random_cut(4, 2)
    write_json(tmp_path / "t.json", oracle_to_json(f))
    np.testing.assert_allclose(load_oracle(tmp_path / "t.json").table(), f.table())
    write_json(tmp_path / "w.json", [1.0, 2.0])
    assert isinstance(load_oracle(tmp_path / "w.json"), ModularWeights)
    write_json(tmp_path / "bad.json", {"n": 3, "values": [0, 1]})
    with pytest.raises(ValidationError, match="values"):
        load_oracle(tmp_path / "bad.json")
    write_json(tmp_path / "m.json", model_to_json(load_fixture()))
    assert load_oracle(tmp_path / "m.json").n == 3


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ValidationError, match="no such file"):
        read_json(tmp_path / "nope.json")
    (tmp_path / "x.json").write_text("{")
    with pytest.raises(ValidationError, match="malformed"):
        read_json(tmp_path / "x.json")


def test_parse_n_list():
    assert parse_n_list("5,6,...,15") == list(range(5, 16))
    assert parse_n_list("6-10") == [6, 7, 8, 9, 10]
    assert parse_n_list("4,8") == [4, 8]
    for bad in ("", "1", "a,b", "5,...,9"):
        with pytest.raises(ValidationError):
            parse_n_list(bad)


def test_cli_repro_table2(capsys, tmp_path):
    code, out, _ = run(capsys, "repro", "table2", "--json", tmp_path / "t2.json")
    assert code == 0
    for name, shown in ref.TABLE2_PRINTED.items():
        line = next(l for l in out.splitlines() if l.strip().startswith(name))
        assert line.split()[len(name.split())] == shown
    doc = read_json(tmp_path / "t2.json")
    assert {r["method"]: r["error"] for r in doc["rows"]} == ref.TABLE2


def test_cli_tree_and_eval(capsys, tmp_path):
    save_model(load_fixture(), tmp_path / "m.json")
    code, out, _ = run(capsys, "tree", "chowliu", "--model", tmp_path / "m.json", "--weights", "classwise:1")
    assert code == 0 and json.loads(out)["edges"] == [[0, 1], [1, 2]]
    code, _, _ = run(capsys, "tree", "disc", "--model", tmp_path / "m.json", "--out", tmp_path / "d.json")
    assert code == 0
    code, out, _ = run(capsys, "eval", "--model", tmp_path / "m.json", "--tree", tmp_path / "d.json")
    assert json.loads(out)["error"] == 0.40625
    code, _, err = run(capsys, "tree", "chowliu", "--model", tmp_path / "m.json", "--weights", "classwise:3")
    assert code == 2 and "class" in err


def test_cli_ssp_min(capsys, tmp_path):
    write_json(tmp_path / "f.json", oracle_to_json(random_cut(6, 1)))
    write_json(tmp_path / "g.json", oracle_to_json(random_gaussian_entropy(6, 2)))
    args = ("ssp", "min", "--f", tmp_path / "f.json", "--g", tmp_path / "g.json", "--restarts", 2,
            "--local-search", 1, "--seed", 5)
    code, out1, _ = run(capsys, *args, "--trace", tmp_path / "t1.jsonl")
    _, out2, _ = run(capsys, *args, "--trace", tmp_path / "t2.jsonl")
    assert code == 0 and out1 == out2
    assert (tmp_path / "t1.jsonl").read_bytes() == (tmp_path / "t2.jsonl").read_bytes()
    _, bits, _ = run(capsys, *args, "--bits")
    assert json.loads(bits)["objective"] == pytest.approx(json.loads(out1)["objective"] / np.log(2))


def test_cli_exit_codes(capsys, tmp_path):
    assert run(capsys, "ssp", "min", "--f", tmp_path / "no.json", "--g", tmp_path / "no.json")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["ssp", "min"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["ssp", "min", "--f", "x", "--g", "y", "--engine", "schrijver"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "synth", "--n", 4, "--common", 0.99, "--disc", 0.9, "--load", 0,
                       "--out", tmp_path / "s.json")
    assert code == 3 and "positive definite" in err


def test_cli_featsel(capsys, tmp_path):
    write_json(tmp_path / "g.json", oracle_to_json(random_gaussian_entropy(5, 3)))
    write_json(tmp_path / "c.json", [1.0, 2.0, 1.0, 3.0, 1.0])
    code, out, _ = run(capsys, "featsel", "--g", tmp_path / "g.json", "--c", tmp_path / "c.json", "--k", 0.5,
                       "--maximize")
    doc = json.loads(out)
    assert code == 0 and doc["certified_1_exchange"]
    assert doc["objective"] == pytest.approx(doc["information"] - 0.5 * doc["cost"])
    code, out, _ = run(capsys, "featsel", "--g", tmp_path / "g.json", "--c", tmp_path / "c.json", "--k", 0)
    assert "note" in json.loads(out)
    assert run(capsys, "featsel", "--g", tmp_path / "g.json", "--c", tmp_path / "c.json", "--k", -1)[0] == 2


def test_cli_synth_is_reproducible(capsys, tmp_path):
    for name in ("a", "b"):
        assert run(capsys, "synth", "--n", 6, "--seed", 4, "--out", tmp_path / f"{name}.json")[0] == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": 0.1}) == '{\n  "a": 0.1,\n  "b": 1\n}\n'
