"""Synthetic catalogs with known b-value, plus yearly magnitude statistics.

Background events follow a homogeneous Poisson process; magnitudes follow
the Gutenberg-Richter law above the cutoff, drawn by inverse CDF
``M = Mc - log10(u) / b``. Optionally every background event at or above a
trigger magnitude spawns a Poisson number of aftershocks whose delays follow
the Omori-Utsu rate ``K / (t + c)**p``.

Randomness comes from numpy's PCG64 generator seeded with ``seed``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import TextIO

import numpy as np

from .catalog import Catalog, EarthquakeEvent
from .errors import ValidationError

MINUTES_PER_DAY = 1440
DEFAULT_START = datetime(2000, 1, 1, tzinfo=timezone.utc)
# jitter box for locations; the features never look at coordinates
CENTER_LON, CENTER_LAT, JITTER_DEG = 29.5, 37.5, 0.25


@dataclass(frozen=True)
class OmoriParams:
    productivity: float  # expected aftershocks per triggering event
    c: float = 0.05  # days
    p: float = 1.1
    trigger_magnitude: float = 4.0

    def __post_init__(self):
        if self.productivity < 0:
            raise ValidationError("Omori productivity K must be >= 0")
        if not (self.c > 0 and self.p > 0):
            raise ValidationError("Omori c and p must be positive")


@dataclass(frozen=True)
class SynthParams:
    b_true: float = 1.0
    cutoff: float = 3.0
    rate: float = 1.0  # events per day
    duration: float = 365.0  # days
    seed: int = 0
    start: datetime = DEFAULT_START
    aftershocks: OmoriParams | None = None
    bin_width: float | None = None  # e.g. 0.1 to mimic catalog precision

    def __post_init__(self):
        if not self.b_true > 0:
            raise ValidationError("b_true must be positive")
        if not self.cutoff > 0:
            raise ValidationError("cutoff must be positive")
        if not self.rate > 0:
            raise ValidationError("rate must be positive")
        if not self.duration > 0:
            raise ValidationError("duration must be positive")
        if self.bin_width is not None:
            if not self.bin_width > 0:
                raise ValidationError("bin_width must be positive")
            steps = self.cutoff / self.bin_width
            if abs(steps - round(steps)) > 1e-9:
                raise ValidationError("cutoff must lie on the magnitude bin grid")


def gr_magnitudes(rng: np.random.Generator, n: int, b: float, cutoff: float) -> np.ndarray:
    # 1 - U lies in (0, 1], so log10 is finite and M >= cutoff
    u = 1.0 - rng.random(n)
    return cutoff - np.log10(u) / b


def omori_delays(rng: np.random.Generator, n: int, c: float, p: float, horizon: float) -> np.ndarray:
    """Delays in ``[0, horizon]`` days with density proportional to ``(t + c)**-p``."""
    u = rng.random(n)
    if abs(p - 1.0) < 1e-12:
        return c * ((horizon + c) / c) ** u - c
    q = 1.0 - p
    lo, hi = c**q, (horizon + c) ** q
    return (lo + u * (hi - lo)) ** (1.0 / q) - c


def _bin(mags: np.ndarray, width: float) -> np.ndarray:
    return np.round(np.round(mags / width) * width, 10)


def gen_catalog(params: SynthParams) -> Catalog:
    """Draw a catalog; identical parameters give an identical catalog."""
    rng = np.random.default_rng(params.seed)

    # background: exponential inter-arrival times until the duration is spent
    expected = params.rate * params.duration
    chunk = int(expected + 10 * math.sqrt(expected) + 10)
    times = np.empty(0)
    last = 0.0
    while True:
        steps = rng.exponential(1.0 / params.rate, size=chunk)
        cum = last + np.cumsum(steps)
        times = np.concatenate([times, cum[cum <= params.duration]])
        if cum[-1] > params.duration:
            break
        last = cum[-1]
    mags = gr_magnitudes(rng, len(times), params.b_true, params.cutoff)

    if params.aftershocks is not None and params.aftershocks.productivity > 0:
        om = params.aftershocks
        extra_t, extra_m = [], []
        for t0, m0 in zip(times, mags):
            if m0 < om.trigger_magnitude:
                continue
            k = rng.poisson(om.productivity)
            if k == 0:
                continue
            extra_t.append(t0 + omori_delays(rng, k, om.c, om.p, params.duration - t0))
            extra_m.append(gr_magnitudes(rng, k, params.b_true, params.cutoff))
        if extra_t:
            times = np.concatenate([times] + extra_t)
            mags = np.concatenate([mags] + extra_m)

    if params.bin_width is not None:
        mags = _bin(mags, params.bin_width)

    n = len(times)
    lons = np.round(CENTER_LON + rng.uniform(-JITTER_DEG, JITTER_DEG, n), 4)
    lats = np.round(CENTER_LAT + rng.uniform(-JITTER_DEG, JITTER_DEG, n), 4)
    depths = np.round(rng.uniform(1.0, 20.0, n), 1)
    minutes = np.floor(times * MINUTES_PER_DAY).astype(np.int64)

    events = [
        EarthquakeEvent(
            longitude=float(lons[i]),
            latitude=float(lats[i]),
            time=params.start + timedelta(minutes=int(minutes[i])),
            magnitude=float(mags[i]),
            depth=float(depths[i]),
            duration=0.0,
        )
        for i in np.argsort(minutes, kind="stable")
    ]
    return Catalog(tuple(events), source_label=f"synthetic(b={params.b_true}, seed={params.seed})")


@dataclass(frozen=True)
class YearStats:
    year: int
    count: int
    mean_magnitude: float


def yearly_stats(catalog: Catalog) -> list[YearStats]:
    """Event count and arithmetic mean magnitude per calendar year present."""
    by_year: dict[int, list[float]] = {}
    for e in catalog:
        by_year.setdefault(e.time.year, []).append(e.magnitude)
    return [
        YearStats(year, len(m), math.fsum(m) / len(m)) for year, m in sorted(by_year.items())
    ]


def write_yearly_csv(rows: list[YearStats], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("year", "count", "mean_magnitude"))
    for r in rows:
        writer.writerow((r.year, r.count, repr(r.mean_magnitude)))
