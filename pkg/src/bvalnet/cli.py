"""Command-line pipeline: ingest -> featurize -> train -> evaluate, plus synth and stats.

Exit codes: 0 success, 1 validation or insufficient data, 2 I/O or parse failure.
Every command computes its full result before writing any file.
"""

from __future__ import annotations

import argparse
import io
import sys
from datetime import date, datetime, time, timezone
from pathlib import Path

from . import catalog as cat
from . import evaluation as ev
from . import mlp
from . import seismicity as seis
from . import synthcat
from .errors import CatalogParseError, ModelFormatError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


def _instant(text: str, end: bool = False) -> datetime:
    text = text.strip()
    if len(text) == 10:
        try:
            d = date.fromisoformat(text)
        except ValueError:
            raise ValidationError(f"invalid date {text!r}") from None
        return datetime.combine(d, time(23, 59) if end else time(0, 0), tzinfo=timezone.utc)
    return cat.parse_iso_minute(text)


def _region(args) -> seis.RegionConfig | None:
    if getattr(args, "config", None):
        return seis.load_region_config(args.config)
    if getattr(args, "region", None):
        return seis.get_preset(args.region)
    return None


def _require_region(args) -> seis.RegionConfig:
    region = _region(args)
    if region is None:
        raise ValidationError("give a region with --region PRESET or --config FILE")
    return region


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")


def _render(writer, obj) -> str:
    buf = io.StringIO()
    writer(obj, buf)
    return buf.getvalue()


def cmd_ingest(args) -> int:
    region = _region(args)
    mc = args.mc if args.mc is not None else (region.cutoff_magnitude if region else None)
    if mc is None:
        raise ValidationError("a cutoff magnitude is needed: use --mc, --region or --config")
    start = _instant(args.start) if args.start else (region.catalog_start if region else None)
    end = _instant(args.end, end=True) if args.end else (region.catalog_end if region else None)
    raw = cat.read_catalog(args.catalog)
    clean = cat.filter_catalog(raw, cat.CatalogFilter(mc, start, end))
    text = _render(cat.write_catalog_csv, clean)
    _write(args.output, text)
    summary = f"read {len(raw)} events, kept {len(clean)} (Mc={mc}, rejected {len(raw) - len(clean)})\n"
    (sys.stderr if args.output in (None, "-") else sys.stdout).write(summary)
    return EXIT_OK


def cmd_featurize(args) -> int:
    region = _require_region(args)
    catalog = cat.read_catalog(args.catalog)
    catalog = cat.filter_catalog(catalog, cat.CatalogFilter(region.cutoff_magnitude))
    count = None if args.all else args.count
    dataset = seis.build_dataset(catalog, region, args.role, count)
    if args.augment:
        dataset = seis.augment_dataset(dataset, args.augment)
    _write(args.output, _render(seis.write_dataset_csv, dataset))
    if args.output not in (None, "-"):
        print(f"{len(dataset)} {args.role} vectors for {region.name}")
    return EXIT_OK


def _read_dataset(path, role=seis.TRAINING) -> seis.Dataset:
    with open(path, encoding="utf-8") as fh:
        return seis.read_dataset_csv(fh, role)


def cmd_train(args) -> int:
    data = _read_dataset(args.dataset)
    if len(data) == 0:
        raise ValidationError("training dataset is empty")
    params = mlp.TrainParams(args.epochs, args.learning_rate, args.seed, args.shuffle)
    normalizer = mlp.Normalizer.fit(data.inputs(), args.magnitude_scale)
    net = mlp.init_network(mlp.NetworkConfig(), args.seed)
    net, history = mlp.train(
        net, normalizer.transform(data.inputs()), normalizer.scale_targets(data.targets()), params
    )
    model_text = mlp.format_model(net, normalizer)
    history_text = "epoch,mean_loss\n" + "".join(f"{i + 1},{v!r}\n" for i, v in enumerate(history.tolist()))
    _write(args.output, model_text)
    if args.history:
        _write(args.history, history_text)
    print(f"trained {params.epochs} epochs on {len(data)} vectors; final mean loss {history[-1]:.6g}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.from_counts:
        cm = ev.ConfusionMatrix.parse(args.from_counts)
        title = args.title
    else:
        if not (args.model and args.dataset):
            raise ValidationError("evaluate needs --model and --dataset, or --from-counts")
        net, normalizer = mlp.load_model(args.model)
        data = _read_dataset(args.dataset, seis.TRAINING if args.self_test else seis.TEST)
        if args.tau is not None:
            policy = ev.ThresholdPolicy(args.tau)
        else:
            region = _region(args)
            mc = args.mc if args.mc is not None else (region.cutoff_magnitude if region else None)
            if mc is None:
                raise ValidationError("give --tau, or a cutoff via --mc, --region or --config")
            policy = ev.ThresholdPolicy.for_cutoff(mc, normalizer.magnitude_scale)
        outputs = mlp.predict(net, data.inputs(), normalizer)
        cm = ev.ConfusionMatrix.from_outputs(outputs, data.targets(), policy)
        mode = "self test (training data)" if args.self_test else "test"
        title = args.title or f"{mode}, {cm.total} vectors, tau={policy.tau!r}"
    report = ev.metrics(cm)
    text = ev.render_report(report, cm, title)
    csv_text = ev.render_csv(report, cm)
    if args.output:
        _write(args.output, text)
    if args.csv:
        _write(args.csv, csv_text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_synth(args) -> int:
    after = None
    if args.aftershocks:
        after = synthcat.OmoriParams(args.aftershocks, args.omori_c, args.omori_p, args.trigger)
    params = synthcat.SynthParams(
        b_true=args.b,
        cutoff=args.mc,
        rate=args.rate,
        duration=args.duration,
        seed=args.seed,
        start=_instant(args.start),
        aftershocks=after,
        bin_width=args.bin,
    )
    catalog = synthcat.gen_catalog(params)
    _write(args.output, _render(cat.write_dat, catalog))
    if args.output not in (None, "-"):
        print(f"wrote {len(catalog)} events")
    return EXIT_OK


def cmd_stats(args) -> int:
    catalog = cat.read_catalog(args.catalog)
    rows = synthcat.yearly_stats(catalog)
    _write(args.output, _render(synthcat.write_yearly_csv, rows))
    return EXIT_OK


def _add_region_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--region", help=f"preset name or number ({', '.join(seis.PRESETS)})")
    g.add_argument("--config", type=Path, help="region config file (key = value lines)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bvalnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and filter a raw .dat catalog into canonical CSV")
    p.add_argument("catalog", type=Path)
    _add_region_args(p)
    p.add_argument("--mc", type=float, help="cutoff magnitude (overrides the region's)")
    p.add_argument("--start", help="first date kept, YYYY-MM-DD")
    p.add_argument("--end", help="last date kept, YYYY-MM-DD (inclusive)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("featurize", help="build the 7-input feature dataset for one role")
    p.add_argument("catalog", type=Path, help="clean catalog (.csv or .dat)")
    _add_region_args(p)
    p.add_argument("--role", choices=seis.ROLES, default=seis.TRAINING)
    p.add_argument("--count", type=int, default=seis.DEFAULT_VECTOR_COUNT)
    p.add_argument("--all", action="store_true", help="keep every qualifying anchor")
    p.add_argument("--augment", type=int, default=0, metavar="K", help="duplicate the K largest-target vectors")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train the 7-15-1 network")
    p.add_argument("dataset", type=Path)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shuffle", action="store_true")
    p.add_argument("--magnitude-scale", type=float, default=mlp.DEFAULT_MAGNITUDE_SCALE)
    p.add_argument("-o", "--output", required=True, help="model file")
    p.add_argument("--history", help="per-epoch loss CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="confusion matrix and P0/P1/Sn/Sp report")
    p.add_argument("--model", type=Path)
    p.add_argument("--dataset", type=Path)
    p.add_argument("--from-counts", metavar="TP,TN,FP,FN")
    p.add_argument("--tau", type=float, help="threshold on the normalized output")
    p.add_argument("--mc", type=float, help="cutoff used for the default tau = Mc / scale")
    _add_region_args(p)
    p.add_argument("--self-test", action="store_true", help="the dataset is the training set")
    p.add_argument("--title")
    p.add_argument("-o", "--output", help="text report path")
    p.add_argument("--csv", help="CSV report path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic .dat catalog")
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--mc", type=float, default=3.0)
    p.add_argument("--rate", type=float, default=1.0, help="events per day")
    p.add_argument("--duration", type=float, default=365.0, help="days")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", default="2000-01-01")
    p.add_argument("--aftershocks", type=float, default=0.0, metavar="K")
    p.add_argument("--omori-c", type=float, default=0.05)
    p.add_argument("--omori-p", type=float, default=1.1)
    p.add_argument("--trigger", type=float, default=4.0)
    p.add_argument("--bin", type=float, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stats", help="yearly event count and mean magnitude")
    p.add_argument("catalog", type=Path)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CatalogParseError, ModelFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
