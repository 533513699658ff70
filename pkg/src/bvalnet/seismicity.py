"""Sliding-window b-values and the seven-input feature vectors built from them.

For each anchor event the network sees

* ``x1..x5``: differences between b-values 4 steps apart, reaching 20 steps back,
* ``x6``: the largest magnitude in the 7 days before the anchor,
* ``x7``: ``10**(-3 b)``, the Gutenberg-Richter chance of a magnitude >= 6 event,

and is trained against ``y``, the largest magnitude in the 5 days after it
(0 when nothing at or above the cutoff happens).

Indices are 0-based throughout: with the default window of 50 events the
first b-value belongs to event 49 and the first complete feature vector is
anchored at event 69, i.e. the 70th event of the catalog.
"""

from __future__ import annotations

import bisect
import configparser
import csv
import math
from dataclasses import dataclass, replace
from datetime import date, datetime, time, timedelta, timezone
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .catalog import Catalog, parse_iso_minute
from .errors import (
    DegenerateWindowError,
    InsufficientDataError,
    ValidationError,
)

LOG10_E = math.log10(math.e)

DEFAULT_WINDOW = 50
DELTA_LAG = 4
N_DELTAS = 5
HISTORY = DELTA_LAG * N_DELTAS  # b-values needed before the anchor's own
PRIOR_DAYS = 7
LOOKAHEAD_DAYS = 5
DEFAULT_VECTOR_COUNT = 122
DEFAULT_AUGMENT_COUNT = 20

FEATURE_NAMES = ("x1", "x2", "x3", "x4", "x5", "x6", "x7")
DATASET_HEADER = ("anchor_time",) + FEATURE_NAMES + ("y",)

TRAINING = "training"
TEST = "test"
ROLES = (TRAINING, TEST)


# --------------------------------------------------------------------------
# Region configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DateWindow:
    """Closed interval of UTC instants."""

    start: datetime
    end: datetime

    def __post_init__(self):
        if self.start > self.end:
            raise ValidationError(f"window start {self.start} is after end {self.end}")

    @classmethod
    def from_dates(cls, start: date, end: date) -> DateWindow:
        """Whole calendar days, both inclusive (end runs to 23:59)."""
        return cls(
            datetime.combine(start, time(0, 0), tzinfo=timezone.utc),
            datetime.combine(end, time(23, 59), tzinfo=timezone.utc),
        )

    def __contains__(self, instant: datetime) -> bool:
        return self.start <= instant <= self.end


@dataclass(frozen=True)
class RegionConfig:
    name: str
    region_id: int
    cutoff_magnitude: float
    train_window: DateWindow
    test_window: DateWindow
    window_size: int = DEFAULT_WINDOW
    # bounds applied when ingesting the raw catalog; None means open
    catalog_start: datetime | None = None
    catalog_end: datetime | None = None

    def __post_init__(self):
        if not self.cutoff_magnitude > 0:
            raise ValidationError("cutoff_magnitude must be positive")
        if self.window_size < 2:
            raise ValidationError("window_size must be at least 2")
        tr, te = self.train_window, self.test_window
        # windows may overlap (one published region does), but the test
        # period must not start or finish before the training period
        if not (tr.start <= te.start and tr.end <= te.end):
            raise ValidationError("train_window must precede test_window")

    def window(self, role: str) -> DateWindow:
        if role == TRAINING:
            return self.train_window
        if role == TEST:
            return self.test_window
        raise ValidationError(f"role must be one of {ROLES}, got {role!r}")


def _region(name, region_id, mc, train, test):
    return RegionConfig(
        name=name,
        region_id=region_id,
        cutoff_magnitude=mc,
        train_window=DateWindow.from_dates(date.fromisoformat(train[0]), date.fromisoformat(train[1])),
        test_window=DateWindow.from_dates(date.fromisoformat(test[0]), date.fromisoformat(test[1])),
        catalog_start=datetime(2000, 1, 1, tzinfo=timezone.utc),
        catalog_end=datetime(2013, 12, 31, 23, 59, tzinfo=timezone.utc),
    )


PRESETS: dict[str, RegionConfig] = {
    "golhisar": _region(
        "Golhisar Cameli", 1, 3.0, ("2007-11-01", "2010-10-25"), ("2010-10-31", "2013-12-28")
    ),
    "burdur": _region(
        "Burdur Fault Zone", 2, 2.8, ("2006-01-03", "2009-03-25"), ("2009-04-07", "2013-12-19")
    ),
    "menderes": _region(
        "Buyuk and Kucuk Menderes Graben", 3, 2.9, ("2010-03-10", "2011-01-11"), ("2010-10-06", "2013-12-18")
    ),
    "gediz": _region(
        "Gediz and Alasehir Graben", 4, 2.8, ("2007-12-03", "2010-05-10"), ("2010-05-10", "2013-12-05")
    ),
}


def get_preset(key: str | int) -> RegionConfig:
    """Look up a preset by slug (``"burdur"``) or region number (``2``)."""
    if isinstance(key, str) and key.isdigit():
        key = int(key)
    if isinstance(key, int):
        for region in PRESETS.values():
            if region.region_id == key:
                return region
    elif key.lower() in PRESETS:
        return PRESETS[key.lower()]
    raise ValidationError(f"unknown region preset {key!r}; choose from {sorted(PRESETS)}")


def _parse_bound(text: str, end: bool) -> datetime:
    text = text.strip()
    if len(text) == 10:
        d = date.fromisoformat(text)
        t = time(23, 59) if end else time(0, 0)
        return datetime.combine(d, t, tzinfo=timezone.utc)
    return parse_iso_minute(text)


def parse_region_config(text: str) -> RegionConfig:
    """Parse flat ``key = value`` text into a RegionConfig.

    Required keys: ``name``, ``cutoff_magnitude``, ``train_start``,
    ``train_end``, ``test_start``, ``test_end``. Optional: ``region_id``,
    ``window_size``, ``catalog_start``, ``catalog_end``. Dates are
    ``YYYY-MM-DD`` (whole days, inclusive) or ISO timestamps.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    try:
        parser.read_string("[region]\n" + text)
    except configparser.Error as exc:
        raise ValidationError(f"malformed region config: {exc}") from None
    sec = parser["region"]
    required = ("name", "cutoff_magnitude", "train_start", "train_end", "test_start", "test_end")
    missing = [k for k in required if k not in sec]
    if missing:
        raise ValidationError(f"region config missing keys: {', '.join(missing)}")
    try:
        return RegionConfig(
            name=sec["name"].strip(),
            region_id=int(sec.get("region_id", "0")),
            cutoff_magnitude=float(sec["cutoff_magnitude"]),
            window_size=int(sec.get("window_size", str(DEFAULT_WINDOW))),
            train_window=DateWindow(
                _parse_bound(sec["train_start"], False), _parse_bound(sec["train_end"], True)
            ),
            test_window=DateWindow(
                _parse_bound(sec["test_start"], False), _parse_bound(sec["test_end"], True)
            ),
            catalog_start=_parse_bound(sec["catalog_start"], False) if "catalog_start" in sec else None,
            catalog_end=_parse_bound(sec["catalog_end"], True) if "catalog_end" in sec else None,
        )
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad value in region config: {exc}") from None


def load_region_config(path: str | Path) -> RegionConfig:
    return parse_region_config(Path(path).read_text(encoding="utf-8"))


def format_region_config(region: RegionConfig) -> str:
    def stamp(dt):
        return dt.strftime("%Y-%m-%dT%H:%MZ")

    lines = [
        f"name = {region.name}",
        f"region_id = {region.region_id}",
        f"cutoff_magnitude = {region.cutoff_magnitude!r}",
        f"window_size = {region.window_size}",
        f"train_start = {stamp(region.train_window.start)}",
        f"train_end = {stamp(region.train_window.end)}",
        f"test_start = {stamp(region.test_window.start)}",
        f"test_end = {stamp(region.test_window.end)}",
    ]
    if region.catalog_start is not None:
        lines.append(f"catalog_start = {stamp(region.catalog_start)}")
    if region.catalog_end is not None:
        lines.append(f"catalog_end = {stamp(region.catalog_end)}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# b-values
# --------------------------------------------------------------------------


def estimate_b(magnitudes: Sequence[float], cutoff: float) -> float:
    """Aki-Utsu maximum-likelihood b-value.

    ``b = log10(e) / (mean(M) - Mc)``. The mean uses a correctly rounded
    sum so the result does not depend on summation order.

    Args:
        magnitudes: at least two magnitudes, all ``>= cutoff``.
        cutoff: completeness (cutoff) magnitude Mc.

    Raises:
        DegenerateWindowError: the mean equals the cutoff.
    """
    mags = [float(m) for m in magnitudes]
    if len(mags) < 2:
        raise ValidationError("a b-value window needs at least 2 magnitudes")
    if min(mags) < cutoff:
        raise ValidationError(f"window contains magnitude {min(mags)} below cutoff {cutoff}")
    excess = math.fsum(mags) / len(mags) - cutoff
    if excess <= 0:
        raise DegenerateWindowError(
            f"mean magnitude equals the cutoff {cutoff}; b-value is undefined"
        )
    return LOG10_E / excess


@dataclass(frozen=True)
class BValueSeries:
    """Stride-1 sliding-window b-values.

    ``values[j]`` comes from events ``j .. j + window_size - 1`` and is
    attributed to the last of them, so it only uses past data.
    """

    values: np.ndarray
    window_size: int

    def __len__(self) -> int:
        return len(self.values)

    def event_index(self, j: int) -> int:
        """Catalog index of the event that series entry ``j`` belongs to."""
        return j + self.window_size - 1

    def series_index(self, event_index: int) -> int:
        return event_index - self.window_size + 1

    def at_event(self, event_index: int) -> float:
        j = self.series_index(event_index)
        if not 0 <= j < len(self.values):
            raise IndexError(f"no b-value attributed to event {event_index}")
        return float(self.values[j])


def b_series(catalog: Catalog, window_size: int = DEFAULT_WINDOW, cutoff: float | None = None) -> BValueSeries:
    """b-values over every run of ``window_size`` consecutive events.

    ``cutoff`` defaults to the smallest magnitude in the catalog only if not
    given; callers normally pass the region's Mc.
    """
    n = len(catalog)
    if n < window_size:
        raise InsufficientDataError(
            f"catalog has {n} events, {window_size - n} short of one {window_size}-event window"
        )
    mags = [e.magnitude for e in catalog]
    if cutoff is None:
        cutoff = min(mags)
    values = np.array(
        [estimate_b(mags[j : j + window_size], cutoff) for j in range(n - window_size + 1)]
    )
    return BValueSeries(values, window_size)


def delta_features(series: BValueSeries | Sequence[float], k: int) -> tuple[float, ...]:
    """The five b-value differences ending at series index ``k``.

    Returns ``(b[k]-b[k-4], b[k-4]-b[k-8], ..., b[k-16]-b[k-20])``.
    """
    values = series.values if isinstance(series, BValueSeries) else series
    if k < HISTORY:
        raise InsufficientDataError(
            f"series index {k} has only {k} earlier b-values; {HISTORY} are needed"
        )
    if k >= len(values):
        raise IndexError(f"series index {k} out of range for length {len(values)}")
    b = [float(values[k - DELTA_LAG * i]) for i in range(N_DELTAS + 1)]
    return tuple(b[i] - b[i + 1] for i in range(N_DELTAS))


def max_prior_week(catalog: Catalog, anchor: int, _times: Sequence[datetime] | None = None) -> float:
    """Largest magnitude in ``[t - 7 days, t)`` before the anchor; 0 if none."""
    times = _times if _times is not None else catalog.times()
    t = times[anchor]
    lo = bisect.bisect_left(times, t - timedelta(days=PRIOR_DAYS))
    hi = bisect.bisect_left(times, t)
    return max((catalog[i].magnitude for i in range(lo, hi)), default=0.0)


def prob_m6(b: float) -> float:
    """``10**(-3 b)``; the exponent 3 is applied for every region."""
    if not (math.isfinite(b) and b >= 0):
        raise ValidationError(f"b must be finite and non-negative, got {b!r}")
    return 10.0 ** (-3.0 * b)


def target(catalog: Catalog, anchor: int, cutoff: float, _times: Sequence[datetime] | None = None) -> float:
    """Largest magnitude in ``(t, t + 5 days]``; 0 if none reaches ``cutoff``."""
    times = _times if _times is not None else catalog.times()
    t = times[anchor]
    lo = bisect.bisect_right(times, t)
    hi = bisect.bisect_right(times, t + timedelta(days=LOOKAHEAD_DAYS))
    peak = max((catalog[i].magnitude for i in range(lo, hi)), default=0.0)
    return peak if peak >= cutoff else 0.0


# --------------------------------------------------------------------------
# Feature vectors and datasets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureVector:
    x1: float
    x2: float
    x3: float
    x4: float
    x5: float
    x6: float
    x7: float
    y: float
    anchor_time: datetime
    anchor_index: int | None = None

    @property
    def inputs(self) -> tuple[float, ...]:
        return (self.x1, self.x2, self.x3, self.x4, self.x5, self.x6, self.x7)


@dataclass(frozen=True)
class Dataset:
    vectors: tuple[FeatureVector, ...]
    role: str = TRAINING
    region: RegionConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(self.vectors))
        if self.role not in ROLES:
            raise ValidationError(f"role must be one of {ROLES}, got {self.role!r}")

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, index):
        return self.vectors[index]

    def inputs(self) -> np.ndarray:
        return np.array([v.inputs for v in self.vectors], dtype=float).reshape(-1, len(FEATURE_NAMES))

    def targets(self) -> np.ndarray:
        return np.array([v.y for v in self.vectors], dtype=float)


def first_anchor_index(window_size: int = DEFAULT_WINDOW) -> int:
    """0-based index of the earliest event that can anchor a full vector."""
    return window_size - 1 + HISTORY


def build_dataset(
    catalog: Catalog,
    region: RegionConfig,
    role: str = TRAINING,
    count: int | None = DEFAULT_VECTOR_COUNT,
) -> Dataset:
    """Feature vectors for every qualifying anchor in the role's date window.

    An anchor qualifies when it has enough history for all five b-value
    differences (index >= window_size + 19) and falls inside the window.
    Vectors are chronological and truncated to the first ``count``; pass
    ``count=None`` to keep all of them.

    Raises:
        ValidationError: the catalog holds events below the region cutoff.
        InsufficientDataError: fewer than ``count`` qualifying anchors.
    """
    window = region.window(role)
    mc = region.cutoff_magnitude
    w = region.window_size
    if any(e.magnitude < mc for e in catalog):
        raise ValidationError(f"catalog must be filtered at the region cutoff {mc}")

    times = catalog.times()
    first = first_anchor_index(w)
    anchors = [i for i in range(first, len(catalog)) if times[i] in window]
    if count is not None:
        if len(anchors) < count:
            raise InsufficientDataError(
                f"{role} window of region {region.name!r} yields {len(anchors)} "
                f"qualifying anchors, {count} requested"
            )
        anchors = anchors[:count]
    if not anchors:
        return Dataset((), role, region)

    series = b_series(catalog, w, mc)
    vectors = []
    for i in anchors:
        k = series.series_index(i)
        deltas = delta_features(series, k)
        vectors.append(
            FeatureVector(
                *deltas,
                x6=max_prior_week(catalog, i, times),
                x7=prob_m6(float(series.values[k])),
                y=target(catalog, i, mc, times),
                anchor_time=times[i],
                anchor_index=i,
            )
        )
    return Dataset(tuple(vectors), role, region)


def augment_dataset(dataset: Dataset, k: int = DEFAULT_AUGMENT_COUNT) -> Dataset:
    """Append copies of the ``k`` vectors with the largest targets.

    Ties go to the earlier anchor. Copies are appended in rank order, and the
    original vectors are left untouched at the front.
    """
    if dataset.role != TRAINING:
        raise ValidationError("only training datasets are augmented")
    if not 0 <= k <= len(dataset):
        raise ValidationError(f"cannot pick {k} vectors from a dataset of {len(dataset)}")
    ranked = sorted(range(len(dataset)), key=lambda i: (-dataset[i].y, dataset[i].anchor_time, i))
    extra = tuple(dataset[i] for i in ranked[:k])
    return replace(dataset, vectors=dataset.vectors + extra)


def write_dataset_csv(dataset: Dataset, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(DATASET_HEADER)
    for v in dataset:
        writer.writerow(
            [v.anchor_time.strftime("%Y-%m-%dT%H:%MZ")] + [repr(float(x)) for x in v.inputs] + [repr(float(v.y))]
        )


def read_dataset_csv(stream: TextIO, role: str = TRAINING, region: RegionConfig | None = None) -> Dataset:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != DATASET_HEADER:
        raise ValidationError(f"dataset CSV must start with header {','.join(DATASET_HEADER)}")
    vectors = []
    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(DATASET_HEADER):
            raise ValidationError(f"dataset line {line_number}: expected {len(DATASET_HEADER)} fields")
        try:
            values = [float(x) for x in row[1:]]
        except ValueError:
            raise ValidationError(f"dataset line {line_number}: non-numeric field") from None
        vectors.append(FeatureVector(*values, anchor_time=parse_iso_minute(row[0])))
    return Dataset(tuple(vectors), role, region)
