"""Seeded synthetic hub-and-spoke schedules with multiple hubs and crew bases.

Each tail is based at a hub and flies round trips from it, hub to spoke or
hub to hub, with turn times inside the sit window; tails overnight at their
home hub. Every round trip is by itself a legal one-duty pairing from the hub,
and crews can recombine legs across tails at hubs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpecInfeasible
from .rules import Airport, Flight, RuleSet, Schedule

DAY = 1440
FIRST_DEP = 6 * 60
LAST_ARR = 23 * 60


@dataclass(frozen=True)
class NetSpec:
    n_airports: int = 10
    n_hubs: int = 2
    n_crew_bases: int = 3
    n_flights: int = 60
    n_days: int = 3
    n_tails: int = 6
    seed: int = 0
    hub_hop_prob: float = 0.25

    def validate(self):
        if not 1 <= self.n_hubs <= self.n_crew_bases <= self.n_airports:
            raise SpecInfeasible("need 1 <= n_hubs <= n_crew_bases <= n_airports")
        if self.n_airports <= self.n_hubs:
            raise SpecInfeasible("need at least one spoke airport")
        if self.n_flights < 2 * self.n_tails:
            raise SpecInfeasible("need n_flights >= 2 * n_tails")
        if self.n_flights % 2:
            raise SpecInfeasible("round-trip rotations need an even flight count")
        if self.n_days < 1 or self.n_tails < 1:
            raise SpecInfeasible("n_days and n_tails must be positive")


# tiers used by tests and examples
TINY = NetSpec(n_airports=6, n_hubs=1, n_crew_bases=2, n_flights=16, n_days=2, n_tails=2)
SMALL = NetSpec()
MEDIUM = NetSpec(n_airports=30, n_hubs=4, n_crew_bases=6, n_flights=600, n_days=7, n_tails=30)


def _block_minutes(p, q) -> int:
    dist = math.dist(p, q)
    return int(round(40 + dist / 8))


def generate(spec: NetSpec, rules: RuleSet | None = None) -> Schedule:
    """Deterministic schedule for ``spec``; raises SpecInfeasible if rotations do not fit."""
    spec.validate()
    rules = rules or RuleSet()
    rng = np.random.default_rng(spec.seed)

    codes = [f"A{i:02d}" for i in range(spec.n_airports)]
    hubs = codes[: spec.n_hubs]
    spokes = codes[spec.n_hubs:]
    base_set = set(hubs) | set(spokes[: spec.n_crew_bases - spec.n_hubs])
    xy = {c: tuple(rng.uniform(0, 600, size=2)) for c in codes}
    home = {}
    for s in spokes:
        home[s] = min(hubs, key=lambda h: (math.dist(xy[s], xy[h]), h))
    for h in hubs:
        if not any(home[s] == h for s in spokes):
            s = min(spokes, key=lambda s: (math.dist(xy[s], xy[h]), s))
            home[s] = h
    spokes_of = {h: sorted(s for s in spokes if home[s] == h) for h in hubs}
    airports = {c: Airport(code=c, city=c, is_crew_base=c in base_set) for c in codes}

    # round trips per tail, then per tail-day
    trips_total = spec.n_flights // 2
    per_tail = [trips_total // spec.n_tails + (k < trips_total % spec.n_tails)
                for k in range(spec.n_tails)]
    turn_lo = rules.sit_min + 5
    turn_hi = min(rules.sit_max - 5, rules.sit_min + 90)

    raw = []
    for k in range(spec.n_tails):
        tail = f"T{k:02d}"
        hub = hubs[k % spec.n_hubs]
        days = [per_tail[k] // spec.n_days + (d < per_tail[k] % spec.n_days)
                for d in range(spec.n_days)]
        for d, trips in enumerate(days):
            t = d * DAY + FIRST_DEP + int(rng.integers(0, 121))
            for _ in range(trips):
                others = [h for h in hubs if h != hub]
                if others and rng.random() < spec.hub_hop_prob:
                    dest = others[int(rng.integers(len(others)))]
                else:
                    cands = spokes_of[hub]
                    dest = cands[int(rng.integers(len(cands)))]
                out_block = _block_minutes(xy[hub], xy[dest])
                back_block = out_block + int(rng.integers(-5, 6))
                turn = int(rng.integers(turn_lo, turn_hi + 1))
                dep1, arr1 = t, t + out_block
                dep2 = arr1 + turn
                arr2 = dep2 + back_block
                raw.append((dep1, arr1, hub, dest, tail))
                raw.append((dep2, arr2, dest, hub, tail))
                t = arr2 + int(rng.integers(turn_lo, turn_hi + 1))
            if trips and t > d * DAY + LAST_ARR + turn_hi:
                raise SpecInfeasible(f"tail {tail} cannot fit {trips} round trips in day {d + 1}")

    raw.sort(key=lambda r: (r[0], r[4], r[2]))
    flights = tuple(Flight(id=i + 1, origin=o, destination=dst, dep=dep, arr=arr, tail=tail)
                    for i, (dep, arr, o, dst, tail) in enumerate(raw))
    sched = Schedule(flights=flights, airports=airports)
    _validate_coverage(sched, rules)
    return sched


def _validate_coverage(sched: Schedule, rules: RuleSet) -> None:
    from .pairgen import build_duty_network, uncoverable_flights

    bad = uncoverable_flights(build_duty_network(sched, rules))
    if bad:
        raise SpecInfeasible(f"{len(bad)} generated flights have no legal pairing: {bad[:10]}")
