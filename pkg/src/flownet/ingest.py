"""Event and affiliation file parsing, migration inference, canonical writes.

Two CSV layouts are understood:

* event files:        ``origin,destination,year,count``
* affiliation files:  ``researcher_id,country,start_year,end_year``
  (empty ``end_year`` marks an ongoing affiliation)

Both are UTF-8 with LF line endings and need no quoting because country
tokens never contain commas.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, TextIO, Union

from .network import CountryCode, MigrationEvent

EVENT_HEADER = ["origin", "destination", "year", "count"]
AFFILIATION_HEADER = ["researcher_id", "country", "start_year", "end_year"]


class ParseError(ValueError):
    """Fatal input problem: unreadable file, missing or wrong header."""


@dataclass(frozen=True)
class RecordError:
    """A single malformed row, kept with its 1-based line number."""

    line: int
    message: str
    raw: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message} ({self.raw!r})"


@dataclass(frozen=True)
class AffiliationRecord:
    """One stay of one researcher in one country."""

    researcher_id: str
    country: CountryCode
    start_year: int
    end_year: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "country", CountryCode(self.country))
        object.__setattr__(self, "start_year", int(self.start_year))
        if self.end_year is not None:
            object.__setattr__(self, "end_year", int(self.end_year))
            if self.end_year < self.start_year:
                raise ValueError(
                    f"end year {self.end_year} before start year {self.start_year}"
                )


def _open_rows(source: Union[str, Path, TextIO]):
    if hasattr(source, "read"):
        return csv.reader(source), None
    handle = open(source, "r", encoding="utf-8", newline="")
    return csv.reader(handle), handle


def _check_header(row, expected, what: str):
    if row is None or [cell.strip().lower() for cell in row] != expected:
        raise ParseError(f"{what} file must start with header {','.join(expected)}")


def parse_events(
    source: Union[str, Path, TextIO], strict: bool = False
) -> tuple[list[MigrationEvent], list[RecordError]]:
    """Read an event CSV into events plus per-row errors.

    Malformed rows (wrong arity, bad year or count, self-loop) are collected
    and skipped; with ``strict`` the first one raises ``ParseError``.
    """
    reader, handle = _open_rows(source)
    try:
        header = next(reader, None)
        _check_header(header, EVENT_HEADER, "event")
        events: list[MigrationEvent] = []
        errors: list[RecordError] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            raw = ",".join(row)
            try:
                if len(row) != 4:
                    raise ValueError(f"expected 4 fields, got {len(row)}")
                origin, destination, year, count = (cell.strip() for cell in row)
                events.append(MigrationEvent(origin, destination, int(year), int(count)))
            except (TypeError, ValueError) as exc:
                err = RecordError(lineno, str(exc), raw)
                if strict:
                    raise ParseError(str(err)) from exc
                errors.append(err)
        return events, errors
    finally:
        if handle is not None:
            handle.close()


def parse_affiliations(
    source: Union[str, Path, TextIO], strict: bool = False
) -> tuple[list[AffiliationRecord], list[RecordError]]:
    """Read an affiliation CSV; same error handling as `parse_events`."""
    reader, handle = _open_rows(source)
    try:
        header = next(reader, None)
        _check_header(header, AFFILIATION_HEADER, "affiliation")
        records: list[AffiliationRecord] = []
        errors: list[RecordError] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            raw = ",".join(row)
            try:
                if len(row) != 4:
                    raise ValueError(f"expected 4 fields, got {len(row)}")
                rid, country, start, end = (cell.strip() for cell in row)
                if not rid:
                    raise ValueError("empty researcher_id")
                records.append(
                    AffiliationRecord(rid, country, int(start), int(end) if end else None)
                )
            except (TypeError, ValueError) as exc:
                err = RecordError(lineno, str(exc), raw)
                if strict:
                    raise ParseError(str(err)) from exc
                errors.append(err)
        return records, errors
    finally:
        if handle is not None:
            handle.close()


def _record_sort_key(rec: AffiliationRecord):
    # ongoing affiliations sort after any finished one starting the same year
    end = rec.end_year if rec.end_year is not None else float("inf")
    return (rec.start_year, end, rec.country)


def derive_events(records: Iterable[AffiliationRecord]) -> list[MigrationEvent]:
    """Infer migrations from per-researcher affiliation histories.

    Per researcher, stays are ordered by start year (ties by end year, with
    ongoing stays last, then country).  Every consecutive pair of stays in
    different countries yields one migration dated by the newer stay's start
    year.  Events are aggregated across researchers.
    """
    by_researcher: dict[str, list[AffiliationRecord]] = {}
    for rec in records:
        by_researcher.setdefault(rec.researcher_id, []).append(rec)

    agg: dict[tuple[CountryCode, CountryCode, int], int] = {}
    for rid in sorted(by_researcher):
        stays = sorted(by_researcher[rid], key=_record_sort_key)
        for prev, cur in zip(stays, stays[1:]):
            if prev.country == cur.country:
                continue
            key = (prev.country, cur.country, cur.start_year)
            agg[key] = agg.get(key, 0) + 1
    return [
        MigrationEvent(origin, destination, year, count)
        for (origin, destination, year), count in sorted(
            agg.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])
        )
    ]


def aggregate_events(events: Iterable[MigrationEvent]) -> list[MigrationEvent]:
    """Sum duplicate quartets and order by (year, origin, destination)."""
    agg: dict[tuple[CountryCode, CountryCode, int], int] = {}
    for ev in events:
        key = (ev.origin, ev.destination, ev.year)
        agg[key] = agg.get(key, 0) + ev.count
    return [
        MigrationEvent(o, d, t, c)
        for (o, d, t), c in sorted(agg.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1]))
    ]


def format_events(events: Iterable[MigrationEvent]) -> str:
    """Canonical event CSV text: aggregated, sorted, LF line endings."""
    lines = [",".join(EVENT_HEADER)]
    for ev in aggregate_events(events):
        lines.append(f"{ev.origin},{ev.destination},{ev.year},{ev.count}")
    return "\n".join(lines) + "\n"


def write_events(events: Iterable[MigrationEvent], path: Union[str, Path]) -> None:
    """Write the canonical event CSV; round-trips exactly through `parse_events`."""
    Path(path).write_text(format_events(events), encoding="utf-8", newline="\n")


def read_events_text(text: str, strict: bool = False):
    return parse_events(io.StringIO(text), strict=strict)
