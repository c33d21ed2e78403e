"""Canonical schedule CSV plus its airports sidecar.

``schedule.csv`` has the header ``id,origin,destination,dep,arr,tail`` with times
in UTC minutes; ``schedule.airports.csv`` has ``code,city,is_crew_base``.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import InputDefect, ParseError
from .rules import Airport, Flight, Schedule

SCHEDULE_HEADER = ["id", "origin", "destination", "dep", "arr", "tail"]
AIRPORT_HEADER = ["code", "city", "is_crew_base"]


def airports_path(schedule_path) -> Path:
    p = Path(schedule_path)
    return p.with_name(p.stem + ".airports.csv")


def write_schedule(path, schedule: Schedule) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCHEDULE_HEADER)
        for f in schedule.flights:
            w.writerow([f.id, f.origin, f.destination, f.dep, f.arr, f.tail])
    with airports_path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AIRPORT_HEADER)
        for code in sorted(schedule.airports):
            a = schedule.airports[code]
            w.writerow([a.code, a.city, int(a.is_crew_base)])


def _rows(path: Path, header: list[str]):
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise ParseError(path, 0, f"cannot open: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [h.strip() for h in first] != header:
            raise ParseError(path, 1, f"expected header {','.join(header)}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(path, reader.line_num, f"expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, [c.strip() for c in row]


def read_airports(path) -> dict[str, Airport]:
    path = Path(path)
    out = {}
    for line, (code, city, base) in _rows(path, AIRPORT_HEADER):
        if base not in ("0", "1"):
            raise ParseError(path, line, f"is_crew_base must be 0 or 1, not {base!r}")
        if code in out:
            raise ParseError(path, line, f"duplicate airport {code}")
        out[code] = Airport(code=code, city=city or code, is_crew_base=base == "1")
    return out


def read_schedule(path, airports=None) -> Schedule:
    """Load a schedule; airports come from the sidecar file unless given."""
    path = Path(path)
    flights = []
    for line, (fid, origin, dest, dep, arr, tail) in _rows(path, SCHEDULE_HEADER):
        try:
            flights.append(Flight(id=int(fid), origin=origin, destination=dest,
                                  dep=int(dep), arr=int(arr), tail=tail))
        except ValueError as exc:
            raise ParseError(path, line, str(exc)) from None
        except InputDefect as exc:
            raise ParseError(path, line, str(exc)) from None
    if airports is None:
        airports = read_airports(airports_path(path))
    flights.sort(key=lambda f: f.id)
    return Schedule(flights=tuple(flights), airports=airports)
