"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line (with runtime) that is printed in the
pytest terminal summary under "acceptance criteria".
"""

import io
import time
from contextlib import contextmanager

import numpy as np
import pytest

import oracles
from bvalnet.catalog import read_catalog, write_dat
from bvalnet.cli import main
from bvalnet.evaluation import ConfusionMatrix, metrics
from bvalnet.mlp import Normalizer, TrainParams, gradients, init_network, mean_loss, train
from bvalnet.seismicity import DateWindow, RegionConfig, augment_dataset, build_dataset, estimate_b
from bvalnet.synthcat import OmoriParams, SynthParams, gen_catalog
from published_tables import AVERAGE_TOL, RATIO_TOL, TABLES
from test_cli import run_pipeline
from test_mlp import fd_gradient, random_triple


@pytest.fixture
def criterion(record_criterion):
    """Context manager that times a block and records PASS/FAIL for it."""

    @contextmanager
    def run(name, budget):
        t0 = time.perf_counter()
        try:
            yield
        except AssertionError as exc:
            record_criterion(name, False, time.perf_counter() - t0, str(exc).splitlines()[0][:120])
            raise
        seconds = time.perf_counter() - t0
        ok = seconds < budget
        record_criterion(name, ok, seconds, "" if ok else f"over the {budget}s budget")
        assert ok, f"{name} took {seconds:.2f}s (budget {budget}s)"

    return run


def test_1_metric_replication(criterion):
    with criterion("1 metric replication, tables 3-12", 1.0):
        for table, (counts, ratios, average, _) in sorted(TABLES.items()):
            r = metrics(ConfusionMatrix(*counts))
            for got, want, label in zip((r.p0, r.p1, r.sn, r.sp), ratios, ("P0", "P1", "Sn", "Sp")):
                assert abs(got - want) <= RATIO_TOL, f"table {table} {label}: {got} vs {want}"
            assert abs(r.average - average) <= AVERAGE_TOL, f"table {table} average {r.average} vs {average}"


def test_2_b_estimator_consistency(criterion):
    with criterion("2 b-estimator consistency", 5.0):
        cat = gen_catalog(SynthParams(b_true=1.0, cutoff=3.0, rate=100.0, duration=101.0, seed=2024))
        mags = cat.magnitudes()
        assert len(mags) >= 10_000
        mags = mags[:10_000]
        whole = estimate_b(mags, 3.0)
        assert 0.95 <= whole <= 1.05, f"whole-catalog b = {whole}"
        windows = [estimate_b(mags[i * 50 : (i + 1) * 50], 3.0) for i in range(200)]
        mean = float(np.mean(windows))
        assert 0.93 <= mean <= 1.07, f"mean window b = {mean}"


def test_3_feature_oracle_equivalence(criterion, synth_400, synth_region):
    with criterion("3 feature assembly equals brute force", 5.0):
        ds = build_dataset(synth_400, synth_region, "training", 122)
        w = synth_region.train_window
        expected = oracles.feature_rows(list(synth_400), 3.0, 50, w.start, w.end)[:122]
        assert len(ds) == len(expected) == 122
        for v, row in zip(ds, expected):
            assert (v.anchor_index, v.anchor_time) == (row["index"], row["time"])
            assert v.inputs == row["x"], f"inputs differ at event {row['index']}"
            assert v.y == row["y"], f"target differs at event {row['index']}"
        # with an unrestricted window the first anchor is the 70th event
        span = DateWindow(synth_400[0].time, synth_400[-1].time)
        everything = build_dataset(synth_400, RegionConfig("all", 0, 3.0, span, span), "training", None)
        assert everything[0].anchor_index + 1 == 70


def test_4_gradient_correctness(criterion):
    with criterion("4 backprop matches finite differences", 5.0):
        rng = np.random.default_rng(4)
        worst = 0.0
        for _ in range(100):
            net, x, y = random_triple(rng)
            analytic = gradients(net, x, y).to_vector()
            numeric = fd_gradient(net, x, y, step=1e-5)
            scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
            worst = max(worst, np.linalg.norm(analytic - numeric) / scale)
        assert worst < 1e-5, f"worst relative error {worst:.3g}"


def test_5_training_sanity(criterion, synth_400, synth_region):
    with criterion("5 training halves loss, bit-reproducible", 30.0):
        ds = build_dataset(synth_400, synth_region, "training", 122)
        norm = Normalizer.fit(ds.inputs())
        X = norm.transform(ds.inputs())
        # target is a fixed function of the prior-week maximum (x6)
        Y = 0.1 + 0.8 * X[:, 5]
        net0 = init_network(seed=0)
        initial = mean_loss(net0, X, Y)
        net_a, hist_a = train(net0, X, Y, TrainParams(epochs=500))
        net_b, hist_b = train(init_network(seed=0), X, Y, TrainParams(epochs=500))
        assert hist_a[-1] < 0.5 * initial, f"final {hist_a[-1]:.4g} vs initial {initial:.4g}"
        assert np.array_equal(net_a.to_vector(), net_b.to_vector())
        assert np.array_equal(hist_a, hist_b)


def test_6_augmentation(criterion, synth_400, synth_region):
    with criterion("6 augmentation 122 -> 142", 1.0):
        ds = build_dataset(synth_400, synth_region, "training", 122)
        aug = augment_dataset(ds, 20)
        assert len(ds) == 122 and len(aug) == 142
        assert aug.vectors[:122] == ds.vectors


def test_7_end_to_end_determinism(criterion, tmp_path):
    with criterion("7 end-to-end CLI determinism", 60.0):
        a = run_pipeline(tmp_path / "a")
        b = run_pipeline(tmp_path / "b")
        for key in ("train", "test", "model", "hist", "rep", "repcsv", "self_rep"):
            with open(a[key], "rb") as fa, open(b[key], "rb") as fb:
                assert fa.read() == fb.read(), f"{key} differs between runs"


def test_8_parser_fidelity(criterion, tmp_path):
    with criterion("8 synth .dat round-trips through ingest", 5.0):
        raw = tmp_path / "synth.dat"
        clean = tmp_path / "clean.csv"
        assert main(["synth", "--rate", "5", "--duration", "400", "--seed", "8", "--aftershocks", "3", "-o", str(raw)]) == 0
        assert main(["ingest", str(raw), "--mc", "3.0", "-o", str(clean)]) == 0
        generated = gen_catalog(SynthParams(rate=5.0, duration=400.0, seed=8, aftershocks=OmoriParams(3.0)))
        from_dat = read_catalog(raw)
        from_csv = read_catalog(clean)
        assert len(from_dat) == len(from_csv) == len(generated) > 1000
        assert from_dat.events == generated.events
        assert from_csv.events == generated.events
        buf = io.StringIO()
        write_dat(from_csv, buf)
        assert buf.getvalue() == raw.read_text()
