"""Shared builders for hand-made schedules, random covering pools and engine runs."""

from __future__ import annotations

import functools

import numpy as np

from crewpair.colgen import CgConfig
from crewpair.engine import EngineConfig, run
from crewpair.ifs import IfsConfig, artificial_pairings, ipdch
from crewpair.lp import ColumnPool
from crewpair.netgen import NetSpec, generate
from crewpair.pairgen import build_duty_network
from crewpair.rules import Airport, CostBreakdown, CostModel, Flight, RuleSet, Schedule

RULES = RuleSet()
CM = CostModel()
PSI = CM.deadhead_penalty

# exact optima of NetSpec(seed=s), frozen from exhaustive enumeration + HiGHS
ORACLE_OPTIMA = {0: 9686.266666666666, 1: 10561.8, 2: 9521.6}


def t(day: int, hh: int, mm: int = 0) -> int:
    return day * 1440 + hh * 60 + mm


def flight(fid, origin, dest, dep, arr, tail="T1") -> Flight:
    return Flight(id=fid, origin=origin, destination=dest, dep=dep, arr=arr, tail=tail)


def schedule(flights, bases=("DAL",), cities=None) -> Schedule:
    cities = cities or {}
    codes = {c for f in flights for c in (f.origin, f.destination)} | set(bases)
    airports = {c: Airport(c, cities.get(c, c), c in bases) for c in sorted(codes)}
    return Schedule(flights=tuple(flights), airports=airports)


def round_trip(gap: int = 45) -> Schedule:
    """DAL->ORD then ORD->DAL ``gap`` minutes later."""
    return schedule([flight(1, "DAL", "ORD", t(0, 8), t(0, 10)),
                     flight(2, "ORD", "DAL", t(0, 10) + gap, t(0, 12) + gap)])


class FakePairing:
    """Column stand-in for random pools: only key, flights and cost are read."""

    artificial = False

    def __init__(self, key, flights, cost):
        self.key = key
        self.flights = tuple(flights)
        self.cost = CostBreakdown(flying=float(cost))
        self.n_flights = len(self.flights)


def random_pool(rng: np.random.Generator) -> ColumnPool:
    """At most 40 rows and 300 columns; singleton columns guarantee coverage."""
    m = int(rng.integers(10, 41))
    n = int(rng.integers(max(m, 40), 301))
    cols = {}
    for i in range(1, m + 1):
        cols[(i,)] = FakePairing(f"s{i:03d}", (i,), rng.integers(800, 1600))
    while len(cols) < n:
        k = int(rng.integers(2, 7))
        fl = tuple(sorted(rng.choice(np.arange(1, m + 1), k, replace=False).tolist()))
        if fl in cols:
            continue
        cost = float(sum(rng.integers(300, 900) for _ in fl)) + float(rng.integers(0, 400))
        cols[fl] = FakePairing("c" + "_".join(map(str, fl)), fl, cost)
    return ColumnPool(sorted(cols.values(), key=lambda p: p.key), range(1, m + 1))


def random_pools(seed: int = 0, count: int = 20) -> list[ColumnPool]:
    rng = np.random.default_rng(seed)
    return [random_pool(rng) for _ in range(count)]


@functools.lru_cache(maxsize=None)
def instance(seed: int):
    """60-flight synthetic schedule and its duty network."""
    s = generate(NetSpec(seed=seed), RULES)
    return s, build_duty_network(s, RULES)


@functools.lru_cache(maxsize=None)
def engine_run(seed: int, method: str = "IPDCH", engine_seed: int | None = None,
               th_cost: float = 100.0, th_t: int = 10):
    """Engine result on instance ``seed``; returns (initial pairings, result)."""
    s, net = instance(seed)
    es = seed if engine_seed is None else engine_seed
    if method == "IPDCH":
        init = ipdch(net, CM, IfsConfig(seed=es)).pairings
    else:
        init = artificial_pairings(s.flights, IfsConfig())
    cfg = EngineConfig(th_cost=th_cost, th_t=th_t, th_ipt=60, wall_max=600, seed=es)
    return init, run(net, init, cfg, CgConfig(seed=es), CM)
