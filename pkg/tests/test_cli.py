import csv

import pytest

from bvalnet.catalog import read_catalog
from bvalnet.cli import main

REGION_TEXT = """\
name = synthetic test region
region_id = 9
cutoff_magnitude = 3.0
window_size = 50
train_start = 2000-09-01
train_end = 2001-12-31
test_start = 2002-01-01
test_end = 2003-06-30
catalog_start = 2000-01-01
"""


def run_pipeline(workdir, seed=7, epochs=None):
    """synth -> ingest -> featurize (both roles) -> train -> evaluate."""
    workdir.mkdir(parents=True, exist_ok=True)
    cfg = workdir / "region.cfg"
    cfg.write_text(REGION_TEXT)
    p = {k: str(workdir / v) for k, v in dict(
        raw="raw.dat", clean="clean.csv", train="train.csv", test="test.csv",
        model="model.txt", hist="history.csv", rep="report.txt", repcsv="report.csv",
        self_rep="self.txt",
    ).items()}
    extra = ["--epochs", str(epochs)] if epochs else []
    steps = [
        ["synth", "--b", "1.0", "--mc", "3.0", "--rate", "0.3", "--duration", "1400", "--seed", str(seed), "-o", p["raw"]],
        ["ingest", p["raw"], "--config", str(cfg), "-o", p["clean"]],
        ["featurize", p["clean"], "--config", str(cfg), "--role", "training", "-o", p["train"]],
        ["featurize", p["clean"], "--config", str(cfg), "--role", "test", "-o", p["test"]],
        ["train", p["train"], "--seed", str(seed), "-o", p["model"], "--history", p["hist"]] + extra,
        ["evaluate", "--model", p["model"], "--dataset", p["test"], "--config", str(cfg), "-o", p["rep"], "--csv", p["repcsv"]],
        ["evaluate", "--model", p["model"], "--dataset", p["train"], "--config", str(cfg), "--self-test", "-o", p["self_rep"]],
    ]
    for argv in steps:
        code = main(argv)
        assert code == 0, argv
    return p


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_pipeline_outputs(tmp_path, capsys):
    p = run_pipeline(tmp_path / "run", epochs=20)
    assert len(rows(p["train"])) == 123
    assert len(rows(p["test"])) == 123
    assert len(rows(p["hist"])) == 21
    report = open(p["rep"]).read()
    assert "P0" in report and "Average" in report
    assert rows(p["repcsv"])[0] == ["metric", "value", "percent"]
    assert open(p["self_rep"]).read().startswith("self test (training data), 122 vectors")


def test_ingest_counts_and_round_trip(tmp_path, capsys):
    raw = tmp_path / "raw.dat"
    assert main(["synth", "--rate", "2", "--duration", "100", "--seed", "1", "--mc", "2.5", "-o", str(raw)]) == 0
    n_raw = len(read_catalog(raw))
    capsys.readouterr()
    assert main(["ingest", str(raw), "--mc", "3.0", "-o", str(tmp_path / "c.csv")]) == 0
    out = capsys.readouterr().out
    kept = len(read_catalog(tmp_path / "c.csv"))
    assert f"read {n_raw} events, kept {kept}" in out
    assert kept == sum(e.magnitude >= 3.0 for e in read_catalog(raw))


def test_ingest_missing_file(tmp_path, capsys):
    assert main(["ingest", str(tmp_path / "nope.dat"), "--mc", "3.0", "-o", str(tmp_path / "x.csv")]) == 2
    assert "error" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_ingest_parse_error_writes_nothing(tmp_path):
    bad = tmp_path / "bad.dat"
    bad.write_text("29 37 2005 6 14 3.4 7.0 12 45 0.0\n29 37 2005 6 14 3.4\n")
    assert main(["ingest", str(bad), "--mc", "3.0", "-o", str(tmp_path / "x.csv")]) == 2
    assert not (tmp_path / "x.csv").exists()


def test_featurize_augment_and_errors(tmp_path):
    p = run_pipeline(tmp_path / "run", epochs=1)
    cfg = str(tmp_path / "run" / "region.cfg")
    aug = tmp_path / "aug.csv"
    assert main(["featurize", p["clean"], "--config", cfg, "--augment", "20", "-o", str(aug)]) == 0
    assert len(rows(aug)) == 143
    # too many requested
    assert main(["featurize", p["clean"], "--config", cfg, "--count", "100000", "-o", str(tmp_path / "n.csv")]) == 1
    assert not (tmp_path / "n.csv").exists()
    # preset region with no anchors in its windows
    assert main(["featurize", p["clean"], "--region", "gediz", "-o", str(tmp_path / "g.csv")]) == 1


def test_train_epochs_and_determinism(tmp_path):
    p = run_pipeline(tmp_path / "run", epochs=1)
    assert len(rows(p["hist"])) == 2
    m2 = tmp_path / "m2.txt"
    assert main(["train", p["train"], "--epochs", "1", "--seed", "7", "-o", str(m2)]) == 0
    assert m2.read_bytes() == open(p["model"], "rb").read()


def test_train_default_epochs(tmp_path):
    p = run_pipeline(tmp_path / "run")
    assert len(rows(p["hist"])) == 501


def test_evaluate_from_counts(tmp_path, capsys):
    out = tmp_path / "t3.txt"
    assert main(["evaluate", "--from-counts", "2,101,7,12", "-o", str(out)]) == 0
    text = out.read_text()
    for value in ("89.38", "22.22", "14.29", "93.52", "54.85"):
        assert value in text
    assert main(["evaluate", "--from-counts", "0,0,0,0"]) == 1


def test_evaluate_high_threshold(tmp_path):
    p = run_pipeline(tmp_path / "run", epochs=5)
    out = tmp_path / "r.csv"
    assert main(["evaluate", "--model", p["model"], "--dataset", p["test"], "--tau", str(1 - 1e-12), "--csv", str(out)]) == 0
    values = {r[0]: r[1] for r in rows(out)[1:]}
    assert values["TP"] == "0" and values["FP"] == "0"


def test_evaluate_needs_threshold(tmp_path):
    p = run_pipeline(tmp_path / "run", epochs=1)
    assert main(["evaluate", "--model", p["model"], "--dataset", p["test"]]) == 1


def test_evaluate_bad_model(tmp_path):
    p = run_pipeline(tmp_path / "run", epochs=1)
    bad = tmp_path / "bad.txt"
    bad.write_text(open(p["model"]).read().splitlines()[0] + "\n7 15 1\n")
    assert main(["evaluate", "--model", str(bad), "--dataset", p["test"], "--mc", "3.0"]) == 2


def test_synth_reproducible(tmp_path):
    a, b = tmp_path / "a.dat", tmp_path / "b.dat"
    for path in (a, b):
        assert main(["synth", "--seed", "3", "--duration", "30", "--aftershocks", "2", "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_stats(tmp_path):
    raw = tmp_path / "raw.dat"
    main(["synth", "--rate", "0.5", "--duration", "800", "--seed", "2", "-o", str(raw)])
    out = tmp_path / "y.csv"
    assert main(["stats", str(raw), "-o", str(out)]) == 0
    table = rows(out)
    assert table[0] == ["year", "count", "mean_magnitude"]
    cat = read_catalog(raw)
    for year, count, mean in table[1:]:
        mags = [e.magnitude for e in cat if e.time.year == int(year)]
        assert int(count) == len(mags)
        assert float(mean) == pytest.approx(sum(mags) / len(mags), rel=1e-14)


def test_stats_empty(tmp_path):
    empty = tmp_path / "empty.dat"
    empty.write_text("")
    out = tmp_path / "y.csv"
    assert main(["stats", str(empty), "-o", str(out)]) == 0
    assert out.read_text() == "year,count,mean_magnitude\n"
