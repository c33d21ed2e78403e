"""Initial feasible solutions: IPDCH divide-and-cover, or single-flight artificial pairings."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, InputDefect, NoProgress
from .lp import ColumnPool
from .mip import MipResult, solve_ip
from .pairgen import DutyNetwork, enumerate_pairings, uncoverable_flights
from .rules import CostModel, Pairing, artificial_pairing

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IfsConfig:
    method: str = "IPDCH"
    k_lo_frac: float = 0.125
    k_hi_frac: float = 0.25
    artificial_pseudo_cost: float = 1e6
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("IPDCH", "Artificial"):
            raise InputDefect(f"ifs.method must be IPDCH or Artificial, not {self.method!r}")
        if not 0 < self.k_lo_frac <= self.k_hi_frac < 1:
            raise InputDefect("need 0 < k_lo_frac <= k_hi_frac < 1")
        if self.artificial_pseudo_cost <= 0:
            raise InputDefect("artificial_pseudo_cost must be positive")


def k_range(n_flights: int, cfg: IfsConfig) -> tuple[int, int]:
    lo = max(1, math.ceil(cfg.k_lo_frac * n_flights - 1e-9))
    hi = max(lo, math.floor(cfg.k_hi_frac * n_flights + 1e-9))
    return lo, hi


@dataclass
class IpdchResult:
    pairings: list[Pairing]
    iterations: int
    subproblems: list[tuple[ColumnPool, MipResult]] = field(default_factory=list)


def ipdch(net: DutyNetwork, cm: CostModel, cfg: IfsConfig, flights=None,
          keep_subproblems: bool = False) -> IpdchResult:
    """Cover every flight by repeatedly solving small covering IPs on random flight subsets.

    The sampling pool holds uncovered flights. A flight whose every legal
    pairing runs through already-covered flights can never be covered from
    that pool, so after an iteration that covers nothing new the retry adds all
    covered flights to the sample, and every further miss doubles K; a miss
    with every flight in the sample raises NoProgress. Overlap with covered flights is priced at the
    deadhead penalty inside each sub-IP.
    """
    all_ids = sorted(flights) if flights is not None else [f.id for f in net.schedule.flights]
    if not all_ids:
        return IpdchResult([], 0)
    bad = set(uncoverable_flights(net)) & set(all_ids)
    if bad:
        raise InfeasibleError(f"{len(bad)} flights have no legal pairing", sorted(bad))
    rng = np.random.default_rng(cfg.seed)
    psi = cm.deadhead_penalty
    lo, hi = k_range(len(all_ids), cfg)
    covered: set[int] = set()
    chosen: dict[str, Pairing] = {}
    pool = list(all_ids)
    subproblems = []
    misses = 0
    it = 0
    while len(covered) < len(all_ids):
        it += 1
        if not pool:
            pool = [f for f in all_ids if f not in covered]
        k = int(rng.integers(lo, hi + 1)) << max(0, misses - 1)
        sample = set(rng.choice(pool, size=min(k, len(pool)), replace=False).tolist())
        if misses:
            sample |= covered
        cands = enumerate_pairings(net, cm, flights=sample)
        target = sorted({fid for p in cands for fid in p.flights} - covered)
        if not target:
            if len(sample) == len(all_ids):
                raise NoProgress(f"IPDCH iteration {it}: no new flight coverable "
                                 f"({len(all_ids) - len(covered)} uncovered)")
            misses += 1
            continue
        tset = set(target)
        cols = [p for p in cands if tset.intersection(p.flights)]
        costs = [p.cost.total + psi * sum(1 for f in p.flights if f in covered) for p in cols]
        sub = ColumnPool(cols, target, costs)
        res = solve_ip(sub, psi)
        if keep_subproblems:
            subproblems.append((sub, res))
        for p in res.columns:
            chosen.setdefault(p.key, p)
            covered.update(p.flights)
        pool = [f for f in pool if f not in covered]
        misses = 0
        log.debug("IPDCH it %d: K=%d covered %d/%d", it, k, len(covered), len(all_ids))
    return IpdchResult([chosen[k] for k in sorted(chosen)], it, subproblems)


def artificial_pairings(flights, cfg: IfsConfig) -> list[Pairing]:
    """One non-legal single-flight pairing per flight at the pseudo cost."""
    return sorted((artificial_pairing(f, cfg.artificial_pseudo_cost) for f in flights),
                  key=lambda p: p.key)


def initial_solution(net: DutyNetwork, cm: CostModel, cfg: IfsConfig) -> list[Pairing]:
    if cfg.method == "Artificial":
        return artificial_pairings(net.schedule.flights, cfg)
    return ipdch(net, cm, cfg).pairings
