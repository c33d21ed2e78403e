"""Exact reference solutions for small instances.

Enumeration here shares nothing with the pairing generator beyond the legality
checks themselves, and the covering IP is handed to HiGHS, so both halves are
independent of the production pipeline.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .errors import InfeasibleError, InputDefect, LegalityError
from .rules import (ConnectionKind, CostModel, Duty, Pairing, RuleSet, Schedule,
                    check_connection, check_duty, check_pairing)

ORACLE_MAX_FLIGHTS = 60
_BRUTE_MAX_FLIGHTS = 25


def _time_sorted(schedule: Schedule):
    return sorted(schedule.flights, key=lambda f: (f.dep, f.id))


def brute_force_duties(schedule: Schedule, rules: RuleSet) -> list[Duty]:
    """Every time-ordered flight subset of legal size that passes check_duty."""
    if len(schedule) > _BRUTE_MAX_FLIGHTS:
        raise InputDefect(f"brute force is limited to {_BRUTE_MAX_FLIGHTS} flights")
    fl = _time_sorted(schedule)
    out = []
    for k in range(1, rules.max_flights_per_duty + 1):
        for combo in itertools.combinations(fl, k):
            try:
                out.append(check_duty(combo, rules))
            except LegalityError:
                pass
    return sorted(out, key=lambda d: d.key)


def search_duties(schedule: Schedule, rules: RuleSet) -> list[Duty]:
    """Exhaustive search over time-ordered flight sequences, cut once a prefix is illegal.

    Every duty rule is monotone in the leg sequence, so no legal duty extends an
    illegal prefix.
    """
    fl = _time_sorted(schedule)
    out = []

    def extend(seq, start):
        for i in range(start, len(fl)):
            cand = seq + [fl[i]]
            try:
                out.append(check_duty(cand, rules))
            except LegalityError:
                continue
            if len(cand) < rules.max_flights_per_duty:
                extend(cand, i + 1)

    extend([], 0)
    return sorted(out, key=lambda d: d.key)


def search_pairings(schedule: Schedule, rules: RuleSet, cm: CostModel,
                    duties: list[Duty] | None = None) -> list[Pairing]:
    """All legal pairings: duty sequences chained by overnight rests, filtered by check_pairing."""
    duties = duties if duties is not None else search_duties(schedule, rules)
    duties = sorted(duties, key=lambda d: (d.legs[0].dep, d.key))
    deps = [d.legs[0].dep for d in duties]
    cities = {a.code: a.city for a in schedule.airports.values()}
    out = {}
    for base in schedule.crew_bases:
        def extend(seq):
            try:
                p = check_pairing(seq, base, rules, cm, cities)
                out[p.key] = p
            except LegalityError:
                pass
            if len(seq) >= rules.max_duties_per_pairing:
                return
            last = seq[-1].legs[-1]
            # only departures inside the rest window can connect; check_connection decides
            lo = bisect.bisect_left(deps, last.arr + rules.night_min)
            hi = bisect.bisect_right(deps, last.arr + rules.night_max)
            for d in duties[lo:hi]:
                if check_connection(last, d.legs[0], rules) is ConnectionKind.OVERNIGHT:
                    extend(seq + [d])

        for d in duties:
            if d.origin == base:
                extend([d])
    return [out[k] for k in sorted(out)]


@dataclass
class OracleResult:
    objective: float
    pairings: list[Pairing]
    n_candidates: int


def solve_covering_exact(pairings: list[Pairing], rows, psi: float, costs=None) -> OracleResult:
    """Optimal covering of ``rows`` by HiGHS branch-and-cut; objective recomputed from the rounded x."""
    rows = sorted(rows)
    index = {fid: i for i, fid in enumerate(rows)}
    a = np.zeros((len(rows), len(pairings)))
    for j, p in enumerate(pairings):
        for fid in p.flights:
            if fid in index:
                a[index[fid], j] = 1.0
    if len(rows) and not a.any(axis=1).all():
        missing = [rows[i] for i in np.flatnonzero(~a.any(axis=1))]
        raise InfeasibleError(f"{len(missing)} flights have no legal pairing", missing)
    base = np.array([p.cost.total for p in pairings]) if costs is None else np.asarray(costs, float)
    c = base + psi * a.sum(axis=0)
    if not rows:
        return OracleResult(0.0, [], len(pairings))
    res = milp(c, constraints=LinearConstraint(a, lb=1.0, ub=np.inf),
               integrality=np.ones(len(pairings)), bounds=Bounds(0, 1),
               options={"mip_rel_gap": 0.0})
    if res.x is None:
        raise InfeasibleError(f"exact covering failed: {res.message}", [])
    x = np.round(res.x)
    chosen = [pairings[j] for j in np.flatnonzero(x > 0.5)]
    z = float(c @ x) - len(rows) * psi
    return OracleResult(z, chosen, len(pairings))


def exact_optimum(schedule: Schedule, rules: RuleSet, cm: CostModel,
                  max_flights: int = ORACLE_MAX_FLIGHTS) -> OracleResult:
    """Exact minimum covering cost over every legal pairing of a small schedule."""
    if len(schedule) > max_flights:
        raise InputDefect(f"oracle refuses {len(schedule)} flights (limit {max_flights})")
    pairings = search_pairings(schedule, rules, cm)
    return solve_covering_exact(pairings, [f.id for f in schedule.flights], cm.deadhead_penalty)
