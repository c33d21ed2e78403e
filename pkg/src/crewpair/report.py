"""Solution features and pairing-set files."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import LegalityError, ParseError
from .mip import count_deadheads
from .rules import (CostModel, Pairing, RuleSet, Schedule, artificial_pairing, check_duty,
                    check_pairing, format_hhmm)

PAIRING_SET_HEADER = "# crewpair pairing-set v1"


@dataclass
class FeatureReport:
    n_pairings: int
    n_flights: int
    n_deadheads: int
    n_overnight_rests: int
    n_crew_changes: int
    tafb_minutes: int
    histogram: dict[int, int]
    flying: float
    hotel: float
    meal: float
    excess_pay: float
    soft: float
    n_artificial: int = 0
    artificial_cost: float = 0.0
    deadheads_by_flight: dict[int, int] = field(default_factory=dict, repr=False)

    @property
    def hard(self) -> float:
        return self.hotel + self.meal + self.excess_pay

    @property
    def total(self) -> float:
        return self.flying + self.hard + self.soft

    @property
    def avg_crew_changes(self) -> float:
        return self.n_crew_changes / self.n_pairings if self.n_pairings else 0.0

    def objective(self, psi: float) -> float:
        """Covering cost with deadhead penalties, artificial pairings included."""
        return self.total + self.artificial_cost + psi * self.n_deadheads

    def to_text(self) -> str:
        rows = [
            ("# pairings", f"{self.n_pairings}"),
            ("# unique flights covered", f"{self.n_flights}"),
            ("# deadhead flights", f"{self.n_deadheads}"),
            ("# overnight-rests", f"{self.n_overnight_rests}"),
            ("# crew changes", f"{self.n_crew_changes}"),
            ("avg crew changes per pairing", f"{self.avg_crew_changes:.2f}"),
            ("Total TAFB", format_hhmm(self.tafb_minutes)),
        ]
        for k in sorted(self.histogram):
            rows.append((f"# pairings covering {k} flights", f"{self.histogram[k]}"))
        rows += [
            ("Hotel cost", f"{self.hotel:.2f}"),
            ("Meal cost", f"{self.meal:.2f}"),
            ("Excess pay", f"{self.excess_pay:.2f}"),
            ("Hard cost", f"{self.hard:.2f}"),
            ("Soft cost", f"{self.soft:.2f}"),
            ("Flying cost", f"{self.flying:.2f}"),
            ("Total cost", f"{self.total:.2f}"),
        ]
        if self.n_artificial:
            rows += [("# artificial pairings", f"{self.n_artificial}"),
                     ("Artificial cost", f"{self.artificial_cost:.2f}")]
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{name:<{width}}  {value:>14}" for name, value in rows)


def features(pairings: Sequence[Pairing], flights: Iterable[int]) -> FeatureReport:
    """Feature panel of a covering solution over ``flights``.

    Artificial pairings count toward coverage and deadheads but are kept out of
    every other statistic; their cost is reported separately.
    """
    rows = sorted(set(flights))
    dead = count_deadheads(pairings, rows)
    legal = [p for p in pairings if not p.artificial]
    fake = [p for p in pairings if p.artificial]
    covered = {f for p in legal for f in p.flights}
    return FeatureReport(
        n_pairings=len(legal),
        n_flights=len(covered),
        n_deadheads=sum(dead.values()),
        n_overnight_rests=sum(p.n_overnight_rests for p in legal),
        n_crew_changes=sum(p.n_crew_changes for p in legal),
        tafb_minutes=sum(p.tafb_minutes for p in legal),
        histogram=dict(sorted(Counter(p.n_flights for p in legal).items())),
        flying=sum(p.cost.flying for p in legal),
        hotel=sum(p.cost.hotel for p in legal),
        meal=sum(p.cost.meal for p in legal),
        excess_pay=sum(p.cost.excess_pay for p in legal),
        soft=sum(p.cost.soft for p in legal),
        n_artificial=len(fake),
        artificial_cost=sum(p.cost.total for p in fake),
        deadheads_by_flight=dead,
    )


def format_pairing(p: Pairing) -> str:
    duties = ";".join(",".join(str(f) for f in d.flights) for d in p.duties)
    return f"{p.crew_base}|{duties}|{p.cost.total!r}"


def dumps_pairings(pairings: Iterable[Pairing]) -> str:
    lines = [PAIRING_SET_HEADER]
    lines += [format_pairing(p) for p in sorted(pairings, key=lambda p: p.key)]
    return "\n".join(lines) + "\n"


def write_pairings(path, pairings: Iterable[Pairing]) -> None:
    Path(path).write_text(dumps_pairings(pairings))


def read_pairings(path, schedule: Schedule, rules: RuleSet, cm: CostModel) -> list[Pairing]:
    """Parse a pairing-set file, re-checking legality and cost of every line.

    Lines with base ``*`` are artificial single-flight pairings at the stated cost.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != PAIRING_SET_HEADER:
        raise ParseError(path, 1, f"expected header {PAIRING_SET_HEADER!r}")
    cities = {a.code: a.city for a in schedule.airports.values()}
    out = []
    for no, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 3:
            raise ParseError(path, no, "expected base|duties|cost")
        base, duty_text, cost_text = parts
        try:
            cost = float(cost_text)
            duty_ids = [[int(x) for x in d.split(",")] for d in duty_text.split(";")]
            legs = [[schedule.flight(fid) for fid in ids] for ids in duty_ids]
        except (ValueError, KeyError, IndexError) as exc:
            raise ParseError(path, no, f"bad pairing field: {exc}") from None
        if base == "*":
            if len(legs) != 1 or len(legs[0]) != 1:
                raise ParseError(path, no, "artificial pairings cover exactly one flight")
            out.append(artificial_pairing(legs[0][0], cost))
            continue
        try:
            duties = [check_duty(d, rules, base) for d in legs]
            p = check_pairing(duties, base, rules, cm, cities)
        except LegalityError as exc:
            raise ParseError(path, no, f"illegal pairing ({exc})") from None
        if abs(p.cost.total - cost) > 1e-6 * max(1.0, abs(cost)):
            raise ParseError(path, no, f"cost {cost!r} differs from recomputed {p.cost.total!r}")
        out.append(p)
    return out
