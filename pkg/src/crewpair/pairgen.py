"""Legal duty and pairing enumeration over a duty overnight-connection network.

Duties are enumerated once per crew base by depth-first extension along the
flight-connection graph; pairings are enumerated on demand for any flight
subset or duty subset by depth-first search over the overnight graph of each
base. Work is split one task per base and merged in key order, so output never
depends on worker scheduling.
"""

from __future__ import annotations

import bisect
import hashlib
import logging
import pickle
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CapacityError
from .rules import (ConnectionKind, CostModel, Duty, Flight, Pairing, RuleSet,
                    Schedule, check_connection, make_pairing)

log = logging.getLogger(__name__)

DEFAULT_PAIRING_CAP = 5_000_000


@dataclass(frozen=True)
class FlightConnectionGraph:
    nodes: tuple[int, ...]
    adjacency: dict[int, tuple[int, ...]]

    def successors(self, fid: int) -> tuple[int, ...]:
        return self.adjacency.get(fid, ())


def build_flight_graph(flights: Sequence[Flight], rules: RuleSet) -> FlightConnectionGraph:
    by_origin: dict[str, list[Flight]] = defaultdict(list)
    for f in flights:
        by_origin[f.origin].append(f)
    deps = {}
    for code, lst in by_origin.items():
        lst.sort(key=lambda f: (f.dep, f.id))
        deps[code] = [f.dep for f in lst]
    adjacency = {}
    for f in flights:
        cands = by_origin.get(f.destination, [])
        dl = deps.get(f.destination, [])
        lo = bisect.bisect_left(dl, f.arr + rules.sit_min)
        hi = bisect.bisect_right(dl, f.arr + rules.sit_max)
        succ = [g.id for g in cands[lo:hi]
                if check_connection(f, g, rules) is ConnectionKind.SIT]
        adjacency[f.id] = tuple(sorted(succ))
    return FlightConnectionGraph(nodes=tuple(f.id for f in flights), adjacency=adjacency)


@dataclass(frozen=True)
class BaseNetwork:
    """Legal duties of one crew base (key-sorted) and their overnight successors."""

    base: str
    duties: tuple[Duty, ...]
    successors: tuple[tuple[int, ...], ...]

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.successors)


@dataclass(frozen=True)
class DutyNetwork:
    schedule: Schedule
    rules: RuleSet
    graph: FlightConnectionGraph
    bases: dict[str, BaseNetwork]
    flights_without_duties: tuple[int, ...] = ()
    cities: dict[str, str] = field(default_factory=dict)

    def all_duties(self) -> list[Duty]:
        return [d for b in sorted(self.bases) for d in self.bases[b].duties]


def _enumerate_duties(flights: Sequence[Flight], graph: FlightConnectionGraph,
                      rules: RuleSet, base: str) -> list[Duty]:
    by_id = {f.id: f for f in flights}
    out = []
    brief, debrief = rules.briefing, rules.debriefing
    max_n, max_el, max_fly = rules.max_flights_per_duty, rules.max_duty_elapsed, rules.max_duty_flying

    def emit(legs, flying, changes):
        out.append(Duty(legs=tuple(legs), crew_base=base, start=legs[0].dep - brief,
                        end=legs[-1].arr + debrief, flying_minutes=flying,
                        n_crew_changes=changes))

    for f in flights:
        start = f.dep - brief
        if f.block_minutes > max_fly or f.arr + debrief - start > max_el:
            continue
        emit([f], f.block_minutes, 0)
        if max_n == 1:
            continue
        legs = [f]
        # stack frames: (successor tuple, next position, flying, changes)
        stack = [(graph.successors(f.id), 0, f.block_minutes, 0)]
        while stack:
            succ, pos, flying, changes = stack[-1]
            if pos >= len(succ):
                stack.pop()
                legs.pop()
                continue
            stack[-1] = (succ, pos + 1, flying, changes)
            child = by_id[succ[pos]]
            fly2 = flying + child.block_minutes
            if fly2 > max_fly or child.arr + debrief - start > max_el:
                continue
            ch2 = changes + (legs[-1].tail != child.tail)
            legs.append(child)
            emit(legs, fly2, ch2)
            nxt = graph.successors(child.id)
            if len(legs) < max_n and nxt:
                stack.append((nxt, 0, fly2, ch2))
            else:
                legs.pop()
    out.sort(key=lambda d: d.key)
    return out


def _overnight_successors(duties: Sequence[Duty], rules: RuleSet) -> tuple[tuple[int, ...], ...]:
    by_origin: dict[str, list[tuple[int, int]]] = defaultdict(list)
    for i, d in enumerate(duties):
        by_origin[d.origin].append((d.legs[0].dep, i))
    for lst in by_origin.values():
        lst.sort()
    out = []
    for d in duties:
        last = d.legs[-1]
        lst = by_origin.get(last.destination, [])
        lo = bisect.bisect_left(lst, (last.arr + rules.night_min, -1))
        hi = bisect.bisect_right(lst, (last.arr + rules.night_max, len(duties)))
        out.append(tuple(sorted(i for _, i in lst[lo:hi])))
    return tuple(out)


def _build_base(args) -> BaseNetwork:
    flights, graph, rules, base = args
    duties = _enumerate_duties(flights, graph, rules, base)
    return BaseNetwork(base=base, duties=tuple(duties),
                       successors=_overnight_successors(duties, rules))


def _run_tasks(fn, tasks, threads: int):
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def build_duty_network(schedule: Schedule, rules: RuleSet, threads: int = 1) -> DutyNetwork:
    flights = schedule.flights
    graph = build_flight_graph(flights, rules)
    bases = schedule.crew_bases
    results = _run_tasks(_build_base, [(flights, graph, rules, b) for b in bases], threads)
    nets = {bn.base: bn for bn in sorted(results, key=lambda bn: bn.base)}
    covered = {fid for bn in nets.values() for d in bn.duties for fid in d.flights}
    missing = tuple(f.id for f in flights if f.id not in covered)
    if missing:
        log.warning("%d flights have no legal duty: %s", len(missing), missing[:20])
    cities = {code: a.city for code, a in schedule.airports.items()}
    return DutyNetwork(schedule=schedule, rules=rules, graph=graph, bases=nets,
                       flights_without_duties=missing, cities=cities)


def _fingerprint(obj) -> str:
    return hashlib.sha256(repr(obj).encode()).hexdigest()[:16]


def load_or_build(schedule: Schedule, rules: RuleSet, cache_dir: str | Path | None,
                  threads: int = 1) -> DutyNetwork:
    """Build the duty network, reusing an on-disk pickle keyed by schedule and rules."""
    if cache_dir is None:
        return build_duty_network(schedule, rules, threads)
    key = _fingerprint((schedule.flights, sorted(schedule.airports.items()))) + "-" + _fingerprint(rules)
    path = Path(cache_dir) / f"dutynet-{key}.pkl"
    if path.exists():
        with path.open("rb") as fh:
            return pickle.load(fh)
    net = build_duty_network(schedule, rules, threads)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        pickle.dump(net, fh, protocol=pickle.HIGHEST_PROTOCOL)
    return net


def _allowed_mask(bn: BaseNetwork, flights: frozenset | None, duty_keys: frozenset | None):
    if duty_keys is not None:
        return [(bn.base, d.key) in duty_keys or ("", d.key) in duty_keys for d in bn.duties]
    if flights is not None:
        return [all(fid in flights for fid in d.flights) for d in bn.duties]
    return [True] * len(bn.duties)


def _walk_base(args):
    """Depth-first pairing search for one base. Returns pairings or a count."""
    bn, allowed, rules, cm, cities, cap, materialize = args
    base = bn.base
    base_city = cities.get(base, base)
    forbid = rules.forbid_overnight_in_base_city
    max_d = rules.max_duties_per_pairing
    duties, succ = bn.duties, bn.successors

    def can_extend(i, depth):
        d = duties[i]
        if depth >= max_d or not succ[i]:
            return False
        return not (forbid and cities.get(d.destination, d.destination) == base_city)

    found = [] if materialize else None
    count = 0
    for s in range(len(duties)):
        if not allowed[s] or duties[s].origin != base:
            continue
        path = [s]
        if duties[s].destination == base:
            count += 1
            if materialize:
                found.append(make_pairing([duties[s]], base, cm))
            continue
        if not can_extend(s, 1):
            continue
        stack = [(succ[s], 0)]
        while stack:
            nxt, pos = stack[-1]
            if pos >= len(nxt):
                stack.pop()
                path.pop()
                continue
            stack[-1] = (nxt, pos + 1)
            c = nxt[pos]
            if not allowed[c]:
                continue
            path.append(c)
            if duties[c].destination == base:
                count += 1
                if count > cap:
                    raise CapacityError(f"base {base}: more than {cap} pairings")
                if materialize:
                    found.append(make_pairing([duties[i] for i in path], base, cm))
                path.pop()
            elif can_extend(c, len(path)):
                stack.append((succ[c], 0))
            else:
                path.pop()
    if count > cap:
        raise CapacityError(f"base {base}: more than {cap} pairings")
    return found if materialize else count


def _tasks(net: DutyNetwork, cm, flights, duties, cap, materialize):
    fset = frozenset(flights) if flights is not None else None
    dkeys = None
    if duties is not None:
        dkeys = frozenset((d.crew_base, d.key) for d in duties)
    return [(bn, _allowed_mask(bn, fset, dkeys), net.rules, cm, net.cities, cap, materialize)
            for _, bn in sorted(net.bases.items())]


def enumerate_pairings(net: DutyNetwork, cm: CostModel, flights: Iterable[int] | None = None,
                       duties: Iterable[Duty] | None = None, threads: int = 1,
                       cap: int = DEFAULT_PAIRING_CAP) -> list[Pairing]:
    """All legal pairings over a flight subset or duty subset, sorted by key.

    With neither ``flights`` nor ``duties`` the whole schedule is used. A duty is
    dropped when it covers any flight outside ``flights``.
    """
    if flights is not None and duties is not None:
        raise ValueError("pass either flights or duties, not both")
    flights = None if flights is None else list(flights)
    duties = None if duties is None else list(duties)
    parts = _run_tasks(_walk_base, _tasks(net, cm, flights, duties, cap, True), threads)
    seen = {}
    for part in parts:
        for p in part:
            seen.setdefault(p.key, p)
    if len(seen) > cap:
        raise CapacityError(f"more than {cap} pairings")
    return [seen[k] for k in sorted(seen)]


def count_pairings(net: DutyNetwork, flights: Iterable[int] | None = None,
                   duties: Iterable[Duty] | None = None, threads: int = 1,
                   cap: int = DEFAULT_PAIRING_CAP) -> int:
    flights = None if flights is None else list(flights)
    duties = None if duties is None else list(duties)
    if flights is not None and not flights:
        return 0
    return sum(_run_tasks(_walk_base, _tasks(net, None, flights, duties, cap, False), threads))


def coverable_flights(net: DutyNetwork) -> set[int]:
    """Flights that appear in at least one legal pairing, without enumerating pairings.

    A duty is usable when the fewest duties needed to reach it from a base
    departure plus the fewest needed to get back fit within the duty limit.
    """
    rules = net.rules
    max_d = rules.max_duties_per_pairing
    covered: set[int] = set()
    inf = max_d + 1
    for base, bn in net.bases.items():
        base_city = net.cities.get(base, base)
        duties, succ = bn.duties, bn.successors
        n = len(duties)

        def may_continue(d):
            if d.destination == base:
                return False
            return not (rules.forbid_overnight_in_base_city
                        and net.cities.get(d.destination, d.destination) == base_city)

        # duties are time-ordered along edges, so sorting by start gives a topological order
        order = sorted(range(n), key=lambda i: (duties[i].start, i))
        fwd = [inf] * n
        for i in order:
            if duties[i].origin == base:
                fwd[i] = 1
        for i in order:
            if fwd[i] < max_d and may_continue(duties[i]):
                for j in succ[i]:
                    if fwd[i] + 1 < fwd[j]:
                        fwd[j] = fwd[i] + 1
        bwd = [inf] * n
        for i in reversed(order):
            d = duties[i]
            if d.destination == base:
                bwd[i] = 1
            elif may_continue(d):
                best = min((bwd[j] for j in succ[i]), default=inf)
                bwd[i] = min(inf, best + 1)
        for i in range(n):
            if fwd[i] + bwd[i] - 1 <= max_d:
                covered.update(duties[i].flights)
    return covered


def uncoverable_flights(net: DutyNetwork) -> list[int]:
    ok = coverable_flights(net)
    return [f.id for f in net.schedule.flights if f.id not in ok]
