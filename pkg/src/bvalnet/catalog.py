"""Earthquake catalog parsing, filtering and export.

Catalog files are plain text with ten whitespace-separated columns per row::

    longitude latitude year month day magnitude depth hour minute duration

Timestamps are taken as UTC with minute resolution.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np

from .errors import CatalogParseError, ValidationError

N_COLUMNS = 10
CSV_HEADER = ("longitude", "latitude", "datetime", "magnitude", "depth", "duration")
_ISO_MINUTE = "%Y-%m-%dT%H:%MZ"


@dataclass(frozen=True)
class EarthquakeEvent:
    longitude: float
    latitude: float
    time: datetime
    magnitude: float
    depth: float
    duration: float = 0.0

    def __post_init__(self):
        for name in ("longitude", "latitude", "magnitude", "depth", "duration"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        if self.time.tzinfo is None:
            raise ValidationError("event time must be timezone-aware (UTC)")
        if self.time.second or self.time.microsecond:
            raise ValidationError("event time resolution is one minute")


@dataclass(frozen=True)
class Catalog:
    """Chronologically ordered, immutable sequence of events."""

    events: tuple[EarthquakeEvent, ...] = ()
    source_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        for a, b in zip(self.events, self.events[1:]):
            if b.time < a.time:
                raise ValidationError("catalog events must be in chronological order")

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[EarthquakeEvent]:
        return iter(self.events)

    def __getitem__(self, index):
        return self.events[index]

    @classmethod
    def from_unsorted(cls, events: Iterable[EarthquakeEvent], source_label: str = "") -> Catalog:
        # sorted() is stable, so same-minute events keep file order
        return cls(tuple(sorted(events, key=lambda e: e.time)), source_label)

    def magnitudes(self) -> np.ndarray:
        return np.array([e.magnitude for e in self.events], dtype=float)

    def times(self) -> list[datetime]:
        return [e.time for e in self.events]


@dataclass(frozen=True)
class CatalogFilter:
    """Keep events with ``magnitude >= cutoff_magnitude`` inside ``[start, end]``.

    Either date bound may be ``None`` for an open interval.
    """

    cutoff_magnitude: float
    start: datetime | None = None
    end: datetime | None = None

    def __post_init__(self):
        if not self.cutoff_magnitude > 0:
            raise ValidationError("cutoff_magnitude must be positive")
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ValidationError("filter start must not be after end")

    def accepts(self, event: EarthquakeEvent) -> bool:
        if event.magnitude < self.cutoff_magnitude:
            return False
        if self.start is not None and event.time < self.start:
            return False
        if self.end is not None and event.time > self.end:
            return False
        return True


def utc(year, month, day, hour=0, minute=0) -> datetime:
    """Build a UTC datetime, raising ValidationError for impossible dates."""
    try:
        return datetime(year, month, day, hour, minute, tzinfo=timezone.utc)
    except ValueError as exc:
        raise ValidationError(
            f"invalid calendar fields {year}-{month}-{day} {hour}:{minute}: {exc}"
        ) from None


def _int_field(token: str, name: str, line_number: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise CatalogParseError(f"non-numeric {name} {token!r}", line_number) from None
    if not value.is_integer():
        raise CatalogParseError(f"{name} must be an integer, got {token!r}", line_number)
    return int(value)


def _float_field(token: str, name: str, line_number: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise CatalogParseError(f"non-numeric {name} {token!r}", line_number) from None
    if not np.isfinite(value):
        raise CatalogParseError(f"{name} must be finite, got {token!r}", line_number)
    return value


def parse_line(line: str, line_number: int = 0) -> EarthquakeEvent:
    tokens = line.split()
    if len(tokens) != N_COLUMNS:
        raise CatalogParseError(
            f"expected {N_COLUMNS} fields, found {len(tokens)}", line_number
        )
    lon, lat, year, month, day, mag, depth, hour, minute, duration = tokens
    try:
        time = utc(
            _int_field(year, "year", line_number),
            _int_field(month, "month", line_number),
            _int_field(day, "day", line_number),
            _int_field(hour, "hour", line_number),
            _int_field(minute, "minute", line_number),
        )
    except ValidationError as exc:
        raise CatalogParseError(str(exc), line_number) from None
    return EarthquakeEvent(
        longitude=_float_field(lon, "longitude", line_number),
        latitude=_float_field(lat, "latitude", line_number),
        time=time,
        magnitude=_float_field(mag, "magnitude", line_number),
        depth=_float_field(depth, "depth", line_number),
        duration=_float_field(duration, "duration", line_number),
    )


def parse_catalog(stream: TextIO | str, source_label: str = "") -> Catalog:
    """Parse a ``.dat`` catalog from a text stream or string.

    Blank lines and lines starting with ``#`` are skipped. Any other
    malformed line raises; rows are never silently dropped.

    Args:
        stream: open text stream, or the file contents as a string.
        source_label: free text stored on the returned catalog.

    Returns:
        Catalog sorted by occurrence time (stable for ties).

    Raises:
        CatalogParseError: wrong field count or non-numeric token.
        ValidationError: impossible calendar combination.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    events = []
    for line_number, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        events.append(parse_line(stripped, line_number))
    return Catalog.from_unsorted(events, source_label)


def read_catalog(path: str | Path) -> Catalog:
    """Read a catalog from a ``.dat`` file or a canonical CSV export."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        if path.suffix.lower() == ".csv":
            return read_catalog_csv(fh, source_label=str(path))
        return parse_catalog(fh, source_label=str(path))


def filter_catalog(catalog: Catalog, flt: CatalogFilter) -> Catalog:
    return Catalog(tuple(e for e in catalog if flt.accepts(e)), catalog.source_label)


def _fmt(value: float) -> str:
    # repr gives the shortest string that round-trips exactly
    return repr(float(value))


def format_dat_line(event: EarthquakeEvent) -> str:
    t = event.time
    return " ".join(
        [
            _fmt(event.longitude),
            _fmt(event.latitude),
            str(t.year),
            str(t.month),
            str(t.day),
            _fmt(event.magnitude),
            _fmt(event.depth),
            str(t.hour),
            str(t.minute),
            _fmt(event.duration),
        ]
    )


def write_dat(catalog: Catalog, stream: TextIO) -> None:
    for event in catalog:
        stream.write(format_dat_line(event) + "\n")


def write_catalog_csv(catalog: Catalog, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for e in catalog:
        writer.writerow(
            [
                _fmt(e.longitude),
                _fmt(e.latitude),
                e.time.strftime(_ISO_MINUTE),
                _fmt(e.magnitude),
                _fmt(e.depth),
                _fmt(e.duration),
            ]
        )


def parse_iso_minute(text: str) -> datetime:
    """Parse ``YYYY-MM-DDTHH:MM[Z]`` (or a bare date) as a UTC instant."""
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1]
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise ValidationError(f"invalid ISO-8601 timestamp {text!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def read_catalog_csv(stream: TextIO, source_label: str = "") -> Catalog:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        return Catalog((), source_label)
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise CatalogParseError(f"unexpected CSV header {header!r}", 1)
    events = []
    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise CatalogParseError(
                f"expected {len(CSV_HEADER)} fields, found {len(row)}", line_number
            )
        lon, lat, stamp, mag, depth, duration = row
        events.append(
            EarthquakeEvent(
                longitude=_float_field(lon, "longitude", line_number),
                latitude=_float_field(lat, "latitude", line_number),
                time=parse_iso_minute(stamp),
                magnitude=_float_field(mag, "magnitude", line_number),
                depth=_float_field(depth, "depth", line_number),
                duration=_float_field(duration, "duration", line_number),
            )
        )
    return Catalog.from_unsorted(events, source_label)
