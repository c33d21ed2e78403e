"""Flight-schedule domain types, legality checks and pairing costs.

All times are absolute UTC minutes. Types are frozen so they can be shared
with enumeration workers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InputDefect, LegalityError


@dataclass(frozen=True, slots=True)
class Flight:
    id: int
    origin: str
    destination: str
    dep: int
    arr: int
    tail: str

    def __post_init__(self):
        if self.arr <= self.dep:
            raise InputDefect(f"flight {self.id}: arr must be after dep")
        if self.origin == self.destination:
            raise InputDefect(f"flight {self.id}: origin equals destination")

    @property
    def block_minutes(self) -> int:
        return self.arr - self.dep


@dataclass(frozen=True, slots=True)
class Airport:
    code: str
    city: str = ""
    is_crew_base: bool = False

    def __post_init__(self):
        if not self.city:
            object.__setattr__(self, "city", self.code)


@dataclass(frozen=True)
class Schedule:
    """A flight set plus its airports; ``flights[i].id == i + 1``."""

    flights: tuple[Flight, ...]
    airports: Mapping[str, Airport]

    def __post_init__(self):
        for i, f in enumerate(self.flights):
            if f.id != i + 1:
                raise InputDefect(f"flight ids must be dense 1..F, got {f.id} at position {i + 1}")
            for code in (f.origin, f.destination):
                if code not in self.airports:
                    raise InputDefect(f"flight {f.id}: unknown airport {code}")
        if not any(a.is_crew_base for a in self.airports.values()):
            raise InputDefect("schedule has no crew base")

    def __len__(self):
        return len(self.flights)

    def flight(self, fid: int) -> Flight:
        return self.flights[fid - 1]

    @property
    def crew_bases(self) -> tuple[str, ...]:
        return tuple(sorted(a.code for a in self.airports.values() if a.is_crew_base))

    def city(self, code: str) -> str:
        return self.airports[code].city

    def subset(self, ids) -> list[Flight]:
        return [self.flights[i - 1] for i in sorted(ids)]


@dataclass(frozen=True)
class RuleSet:
    sit_min: int = 30
    sit_max: int = 240
    night_min: int = 540
    night_max: int = 2880
    briefing: int = 45
    debriefing: int = 30
    max_flights_per_duty: int = 6
    max_duty_elapsed: int = 720
    max_duty_flying: int = 480
    max_duties_per_pairing: int = 4
    forbid_overnight_in_base_city: bool = True

    def __post_init__(self):
        for name in ("sit_min", "sit_max", "night_min", "night_max", "max_flights_per_duty",
                     "max_duty_elapsed", "max_duty_flying", "max_duties_per_pairing"):
            if getattr(self, name) <= 0:
                raise InputDefect(f"rules.{name} must be positive")
        if self.briefing < 0 or self.debriefing < 0:
            raise InputDefect("briefing/debriefing must be non-negative")
        if not self.sit_min < self.sit_max:
            raise InputDefect("rules: sit_min must be below sit_max")
        if not self.night_min > self.sit_max:
            raise InputDefect("rules: night_min must exceed sit_max")
        if not self.night_min <= self.night_max:
            raise InputDefect("rules: night_min must not exceed night_max")


@dataclass(frozen=True)
class CostModel:
    flying_rate: float = 100.0
    mg_hours_per_duty: float = 4.75
    hotel_per_night: float = 120.0
    meal_rate: float = 4.0
    crew_change_cost: float = 50.0
    deadhead_penalty: float = 5000.0

    def __post_init__(self):
        for name in ("flying_rate", "mg_hours_per_duty", "hotel_per_night", "meal_rate",
                     "crew_change_cost", "deadhead_penalty"):
            if getattr(self, name) < 0:
                raise InputDefect(f"cost.{name} must be non-negative")

    def max_hard_cost(self, rules: RuleSet) -> float:
        """Upper bound on hotel + meal + excess pay of any legal pairing."""
        n = rules.max_duties_per_pairing
        tafb_h = (n * rules.max_duty_elapsed + (n - 1) * rules.night_max) / 60
        return (self.hotel_per_night * (n - 1) + self.meal_rate * tafb_h
                + self.flying_rate * self.mg_hours_per_duty * n)

    def check_penalty(self, rules: RuleSet) -> None:
        bound = self.max_hard_cost(rules)
        if self.deadhead_penalty <= bound:
            raise InputDefect(
                f"deadhead_penalty {self.deadhead_penalty} must exceed the largest "
                f"possible pairing hard cost {bound:.2f}")


@dataclass(frozen=True, slots=True)
class CostBreakdown:
    flying: float = 0.0
    hotel: float = 0.0
    meal: float = 0.0
    excess_pay: float = 0.0
    soft: float = 0.0

    @property
    def hard(self) -> float:
        return self.hotel + self.meal + self.excess_pay

    @property
    def total(self) -> float:
        return self.flying + self.hotel + self.meal + self.excess_pay + self.soft


class ConnectionKind(enum.Enum):
    SIT = "sit"
    OVERNIGHT = "overnight"
    NONE = "none"


def check_connection(f1: Flight, f2: Flight, rules: RuleSet) -> ConnectionKind:
    if f1.destination != f2.origin:
        return ConnectionKind.NONE
    gap = f2.dep - f1.arr
    if rules.sit_min <= gap <= rules.sit_max:
        return ConnectionKind.SIT
    if rules.night_min <= gap <= rules.night_max:
        return ConnectionKind.OVERNIGHT
    return ConnectionKind.NONE


@dataclass(frozen=True, slots=True)
class Duty:
    legs: tuple[Flight, ...]
    crew_base: str
    start: int
    end: int
    flying_minutes: int
    n_crew_changes: int

    @property
    def flights(self) -> tuple[int, ...]:
        return tuple(f.id for f in self.legs)

    @property
    def elapsed_minutes(self) -> int:
        return self.end - self.start

    @property
    def origin(self) -> str:
        return self.legs[0].origin

    @property
    def destination(self) -> str:
        return self.legs[-1].destination

    @property
    def key(self) -> str:
        return "_".join(str(f.id) for f in self.legs)


def make_duty(legs: Sequence[Flight], rules: RuleSet, crew_base: str = "") -> Duty:
    """Build a duty with cached totals; performs no legality checks."""
    legs = tuple(legs)
    changes = sum(1 for a, b in zip(legs, legs[1:]) if a.tail != b.tail)
    return Duty(legs=legs, crew_base=crew_base,
                start=legs[0].dep - rules.briefing,
                end=legs[-1].arr + rules.debriefing,
                flying_minutes=sum(f.arr - f.dep for f in legs),
                n_crew_changes=changes)


def check_duty(legs: Sequence[Flight], rules: RuleSet, crew_base: str = "") -> Duty:
    """Return the duty for ``legs`` or raise LegalityError naming the failed rule."""
    if not legs:
        raise LegalityError("C_duty:empty")
    for a, b in zip(legs, legs[1:]):
        if a.destination != b.origin:
            raise LegalityError("C_connect", f"{a.id}->{b.id}")
        if check_connection(a, b, rules) is not ConnectionKind.SIT:
            raise LegalityError("C_sit", f"{a.id}->{b.id} gap {b.dep - a.arr}")
    if len(legs) > rules.max_flights_per_duty:
        raise LegalityError("C_duty:max_flights", str(len(legs)))
    duty = make_duty(legs, rules, crew_base)
    if duty.elapsed_minutes > rules.max_duty_elapsed:
        raise LegalityError("C_duty:elapsed", str(duty.elapsed_minutes))
    if duty.flying_minutes > rules.max_duty_flying:
        raise LegalityError("C_duty:flying", str(duty.flying_minutes))
    return duty


@dataclass(frozen=True, slots=True)
class Pairing:
    duties: tuple[Duty, ...]
    crew_base: str
    tafb_minutes: int
    n_overnight_rests: int
    n_crew_changes: int
    cost: CostBreakdown
    artificial: bool = False
    _key: str = field(default="", repr=False, compare=False)

    def __post_init__(self):
        if not self._key:
            ids = "_".join(str(f.id) for d in self.duties for f in d.legs)
            object.__setattr__(self, "_key", f"{self.crew_base}:{ids}")

    @property
    def key(self) -> str:
        return self._key

    @property
    def flights(self) -> tuple[int, ...]:
        return tuple(f.id for d in self.duties for f in d.legs)

    @property
    def legs(self) -> tuple[Flight, ...]:
        return tuple(f for d in self.duties for f in d.legs)

    @property
    def n_flights(self) -> int:
        return sum(len(d.legs) for d in self.duties)

    @property
    def flying_minutes(self) -> int:
        return sum(d.flying_minutes for d in self.duties)


def make_pairing(duties: Sequence[Duty], base: str, cm: CostModel) -> Pairing:
    """Assemble and cost a pairing; performs no legality checks."""
    duties = tuple(duties)
    changes = sum(d.n_crew_changes for d in duties)
    p = Pairing(duties=duties, crew_base=base,
                tafb_minutes=duties[-1].end - duties[0].start,
                n_overnight_rests=len(duties) - 1,
                n_crew_changes=changes,
                cost=CostBreakdown())
    object.__setattr__(p, "cost", cost_pairing(p, cm))
    return p


def check_pairing(duties: Sequence[Duty], base: str, rules: RuleSet, cm: CostModel,
                  cities: Mapping[str, str] | None = None) -> Pairing:
    """Validate a duty sequence as a pairing from ``base``; raise LegalityError if not.

    ``cities`` maps airport codes to city names (defaults to the code itself).
    Returning to the base ends a pairing, so an intermediate duty ending at the
    base airport fails C_base.
    """
    if not duties:
        raise LegalityError("C_duty:empty")
    city = (lambda c: cities.get(c, c)) if cities is not None else (lambda c: c)
    if duties[0].origin != base:
        raise LegalityError("C_base", f"starts at {duties[0].origin}")
    for d1, d2 in zip(duties, duties[1:]):
        kind = check_connection(d1.legs[-1], d2.legs[0], rules)
        if kind is not ConnectionKind.OVERNIGHT:
            raise LegalityError("C_night", f"{d1.legs[-1].id}->{d2.legs[0].id}")
        if d1.destination == base:
            raise LegalityError("C_base", "returns to base before the last duty")
        if rules.forbid_overnight_in_base_city and city(d1.destination) == city(base):
            raise LegalityError("C_other", f"overnight at {d1.destination} in base city")
    if len(duties) > rules.max_duties_per_pairing:
        raise LegalityError("C_duty:max_duties", str(len(duties)))
    if duties[-1].destination != base:
        raise LegalityError("C_base", f"ends at {duties[-1].destination}")
    return make_pairing(duties, base, cm)


def cost_pairing(p: Pairing, cm: CostModel) -> CostBreakdown:
    flying_h = p.flying_minutes / 60
    guaranteed_h = cm.mg_hours_per_duty * len(p.duties)
    return CostBreakdown(
        flying=cm.flying_rate * flying_h,
        hotel=cm.hotel_per_night * p.n_overnight_rests,
        meal=cm.meal_rate * p.tafb_minutes / 60,
        excess_pay=cm.flying_rate * max(0.0, guaranteed_h - flying_h),
        soft=cm.crew_change_cost * p.n_crew_changes,
    )


def flying_cost(f: Flight, cm: CostModel) -> float:
    return cm.flying_rate * f.block_minutes / 60


def artificial_pairing(f: Flight, pseudo_cost: float) -> Pairing:
    """Single-flight pseudo pairing used to seed the LP; never legal."""
    duty = Duty(legs=(f,), crew_base="*", start=f.dep, end=f.arr,
                flying_minutes=f.block_minutes, n_crew_changes=0)
    return Pairing(duties=(duty,), crew_base="*", tafb_minutes=f.block_minutes,
                   n_overnight_rests=0, n_crew_changes=0,
                   cost=CostBreakdown(soft=pseudo_cost), artificial=True)


def format_hhmm(minutes: float) -> str:
    """HH:MM with any fractional minute rounded up."""
    m = math.ceil(minutes - 1e-9)
    return f"{m // 60:02d}:{m % 60:02d}"
