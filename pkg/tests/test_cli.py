import json

import pytest

from tailunseen.cli import main


@pytest.fixture
def sample(tmp_path):
    p = tmp_path / "s.csv"
    assert main(["simulate", "--dist", "zipf", "--alpha", "0.5", "-n", "3000", "--seed", "2", "-o", str(p)]) == 0
    return p


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def as_json(capsys, argv):
    code, out, _ = run(capsys, argv)
    assert code == 0
    return json.loads(out)


def csv_rows(text):
    return dict(line.split(",", 1) for line in text.splitlines()[1:])


def test_alpha(capsys, sample):
    doc = as_json(capsys, ["alpha", str(sample)])
    assert doc["schema"] == "v1" and doc["kind"] == "alpha"
    assert 0.4 < doc["results"]["alpha_hat"] < 0.6 and doc["results"]["n"] == 3000


def test_alpha_boundary_warns(capsys, tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("a\nb\nc\n")
    code, out, err = run(capsys, ["alpha", str(p)])
    assert code == 0 and "boundary" in err and json.loads(out)["results"]["alpha_hat"] == 1.0


def test_unseen_and_override(capsys, sample):
    doc = as_json(capsys, ["unseen", str(sample), "--lambda", "2"])
    assert doc["results"]["value"] > 0
    doc = as_json(capsys, ["unseen", str(sample), "--lambda", "3", "--alpha", "0.5", "--threshold-c", "50"])
    assert doc["results"]["value"] == pytest.approx(doc["results"]["K_n"] * 1.0)


def test_unseen_threshold_note(capsys, sample):
    doc = as_json(capsys, ["unseen", str(sample), "--lambda", "1e9", "--threshold-c", "0.01"])
    assert doc["results"]["thresholded"] and doc["results"]["value"] == 0 and "note" in doc["results"]


def test_gt_and_diagnose(capsys, sample):
    doc = as_json(capsys, ["gt", str(sample), "--lambda", "0.5"])
    assert set(doc["results"]) >= {"good-toulmin", "et-poisson", "et-binomial-1", "et-binomial-2"}
    doc = as_json(capsys, ["diagnose", str(sample)])
    assert 0 < doc["results"]["A"] < 1


def test_formats_agree(capsys, sample):
    j = as_json(capsys, ["unseen", str(sample), "--lambda", "2"])
    code, out, _ = run(capsys, ["--format", "csv", "unseen", str(sample), "--lambda", "2"])
    rows = csv_rows(out)
    assert code == 0
    assert float(rows["results.value"]) == j["results"]["value"]
    assert float(rows["results.alpha_used"]) == j["results"]["alpha_used"]


def test_simulate_seed_determinism(tmp_path):
    a, b, c = (tmp_path / f"{x}.csv" for x in "abc")
    for path, seed in ((a, 5), (b, 5), (c, 6)):
        assert main(["simulate", "--dist", "double-zipf", "--alpha", "0.5", "--beta", "0.4", "--J", "20",
                     "-n", "500", "--seed", str(seed), "-o", str(path)]) == 0
    assert a.read_text() == b.read_text() != c.read_text()
    assert main(["simulate", "--dist", "crp", "--alpha", "0.5", "-n", "100", "-o", str(c)]) == 0


def test_exit_codes(capsys, tmp_path, sample):
    with pytest.raises(SystemExit) as e:
        main(["unseen", str(sample), "--lambda", "-1"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a,1\na,1\n")
    assert run(capsys, ["alpha", str(bad)])[0] == 3
    assert run(capsys, ["alpha", str(tmp_path / "missing.csv")])[0] == 3
    assert run(capsys, ["unseen", str(sample), "--lambda", "1", "--alpha", "1.5"])[0] == 4
    assert run(capsys, ["simulate", "--dist", "zipf", "-n", "5"])[0] == 2


def test_risk_preset_filters_and_determinism(capsys, tmp_path):
    argv = ["risk", "--preset", "paper-table1", "--alpha0", "0.5", "--n", "1000", "--replicates", "20", "--seed", "3"]
    a = as_json(capsys, argv + ["-o", str(tmp_path / "r.json")])
    b = as_json(capsys, ["--threads", "2"] + argv)
    assert len(a["results"]) == 1 and a["results"] == b["results"]
    assert a["metadata"]["bit_generator"] == "PCG64"
    assert json.loads((tmp_path / "r.json").read_text())["results"] == a["results"]


def test_risk_config(capsys, tmp_path):
    cfg = {"schema": "v1", "experiment": {"kind": "unseen", "spec": {"kind": "zipf", "s": 2.0}, "n": 200,
                                          "lambda": 2.0, "replicates": 5, "estimators": ["plugin", "null"]}}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    doc = as_json(capsys, ["risk", "--config", str(p)])
    assert set(doc["results"][0]["unseen_risk"]) == {"plugin", "null"}


def test_malformed_config_writes_nothing(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiment": {"kind": "unseen", "n": -1, "estimators": ["nope"]}}))
    out = tmp_path / "r.json"
    code, stdout, err = run(capsys, ["risk", "--config", str(p), "-o", str(out)])
    assert code == 2 and stdout == "" and not out.exists()
    assert "spec" in err and "n must" in err and "nope" in err
    p.write_text("{not json")
    assert run(capsys, ["risk", "--config", str(p)])[0] == 2


def test_split_eval(capsys, sample):
    argv = ["split-eval", str(sample), "--lambda", "2", "4", "--splits", "4", "--seed", "1"]
    a = as_json(capsys, argv)
    assert a == as_json(capsys, argv)
    assert [r["lambda"] for r in a["results"]] == [2.0, 4.0]
    assert "per_split_errors" not in a["results"][0]
