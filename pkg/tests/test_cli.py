import json

import numpy as np
import pytest

from evmcfg.cli import build_parser, main
from evmcfg.dataset import DatasetRecord, write_corpus
from evmcfg.gcn import GcnConfig, GcnModel
from evmcfg.synthetic import synthetic_corpus


@pytest.fixture
def hexfile(tmp_path):
    def make(text, name="c.hex"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "syn.jsonl"
    write_corpus(synthetic_corpus(40, seed=3), path)
    return str(path)


def test_disasm(hexfile, capsys):
    assert main(["disasm", hexfile("0x6001600201\n")]) == 0
    assert capsys.readouterr().out.splitlines() == ["0000: PUSH1 0x01", "0002: PUSH1 0x02",
                                                    "0004: ADD"]


def test_disasm_json(hexfile, capsys):
    assert main(["disasm", "--json", hexfile("6001600201")]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["mnemonic"] for r in rows] == ["PUSH1", "PUSH1", "ADD"]
    assert rows[0]["immediate"] == "0x01" and rows[2]["immediate"] is None


def test_disasm_missing_file(tmp_path, capsys):
    assert main(["disasm", str(tmp_path / "nope.hex")]) == 2
    assert "nope.hex" in capsys.readouterr().err


def test_disasm_parse_error(hexfile, capsys):
    assert main(["disasm", hexfile("0x6")]) == 1
    assert "OddLength" in capsys.readouterr().err


def test_cfg_dot(hexfile, capsys):
    assert main(["cfg", hexfile("6003565b00")]) == 0
    dot = capsys.readouterr().out
    assert dot.count("[label=") == 2 and dot.count("style=solid") == 1
    assert "dashed" not in dot


def test_cfg_json(hexfile, capsys):
    assert main(["cfg", "--json", hexfile("6003565b00")]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["edges"] == [{"src": 0, "dst": 1, "kind": "JumpTaken"}]


def test_cfg_unresolved_comment(hexfile, capsys):
    assert main(["cfg", "--dot", hexfile("6004575b00")]) == 0
    assert "B0: TargetNotJumpdest" in capsys.readouterr().out


def test_encode(hexfile, tmp_path):
    out = tmp_path / "g.json"
    assert main(["encode", hexfile("6003565b00"), "--max-nodes", "4", "--label", "1",
                 "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["n"] == 2 and data["label"] == 1 and len(data["x"][0]) == 4


def test_encode_too_many(hexfile, capsys):
    assert main(["encode", hexfile("5b015b015b01"), "--max-nodes", "2"]) == 1
    assert "TooManyNodes" in capsys.readouterr().err


def test_train_and_eval(corpus, tmp_path, capsys):
    model = tmp_path / "m.json"
    assert main(["train", corpus, "--epochs", "3", "--hidden", "8", "--max-nodes", "64",
                 "--out", str(model)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tp"] + report["fn"] + report["fp"] + report["tn"] == 8
    loaded = GcnModel.load(model)
    assert loaded.config.num_hidden_layers == 2 and loaded.config.input_width == 64

    assert main(["eval", str(model), corpus]) == 0
    full = json.loads(capsys.readouterr().out)
    assert full["tp"] + full["fn"] + full["fp"] + full["tn"] == 40


def test_train_repeatable(corpus, tmp_path, capsys):
    outputs = []
    for name in ("a", "b"):
        path = tmp_path / f"{name}.json"
        metrics = tmp_path / f"{name}.metrics.json"
        main(["train", corpus, "--epochs", "2", "--hidden", "8", "--max-nodes", "64",
              "--seed", "5", "--out", str(path), "--metrics-out", str(metrics)])
        outputs.append((path.read_bytes(), metrics.read_bytes()))
    assert outputs[0] == outputs[1]


def test_env_seed(monkeypatch):
    monkeypatch.setenv("EVMCFG_SEED", "9")
    assert build_parser().parse_args(["disasm", "x"]).seed == 9
    assert build_parser().parse_args(["disasm", "x", "--seed", "3"]).seed == 3


@pytest.mark.parametrize("bad", ["0", "7"])
def test_layers_validated(corpus, bad, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["train", corpus, "--layers", bad])
    assert exc.value.code == 2
    assert "1..6" in capsys.readouterr().err


def test_eval_empty_corpus(tmp_path, capsys):
    model = tmp_path / "m.json"
    GcnModel.initialize(GcnConfig(1, 4, 16, 0)).save(model)
    empty = tmp_path / "e.jsonl"
    empty.write_text("")
    assert main(["eval", str(model), str(empty)]) == 1
    assert "EmptyDataset" in capsys.readouterr().err


def test_eval_width_mismatch(corpus, tmp_path, capsys):
    model = tmp_path / "m.json"
    GcnModel.initialize(GcnConfig(1, 4, 16, 0)).save(model)
    assert main(["eval", str(model), corpus, "--max-nodes", "32"]) == 1
    err = capsys.readouterr().err
    assert "ShapeMismatch" in err and "32" in err and "16" in err


def test_eval_perfect_detector(tmp_path, capsys):
    # a single layer whose only live input is node 1; graphs with two or more
    # blocks score positive, one-block graphs stay at p < 0.5
    path = tmp_path / "toy.jsonl"
    write_corpus([DatasetRecord("one", "00", 0), DatasetRecord("two", "6003565b00", 1)], path)
    w = np.zeros((4, 1))
    w[1, 0] = 1.0
    model = GcnModel(GcnConfig(1, 1, 4, 0), [w], np.array([10.0]), -1.0)
    model.save(tmp_path / "m.json")
    assert main(["eval", str(tmp_path / "m.json"), str(path)]) == 0
    r = json.loads(capsys.readouterr().out)
    assert (r["accuracy"], r["recall"], r["precision"], r["f1"]) == (1.0, 1.0, 1.0, 1.0)


def test_sweep_single_and_csv(corpus, capsys):
    assert main(["sweep-layers", corpus, "--layers", "2", "--epochs", "1", "--hidden", "4",
                 "--max-nodes", "64"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and lines[1].split()[0] == "2"
    assert main(["sweep-layers", corpus, "--layers", "1..3", "--epochs", "1", "--hidden", "4",
                 "--max-nodes", "64", "--csv"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "layers,accuracy,recall,precision,f1"
    assert [r.split(",")[0] for r in rows[1:]] == ["1", "2", "3"]


def test_sweep_bad_range(corpus):
    with pytest.raises(SystemExit):
        main(["sweep-layers", corpus, "--layers", "0..6"])
