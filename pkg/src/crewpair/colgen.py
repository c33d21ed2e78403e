"""Pricing: negative reduced-cost pairings from four strategies plus a pairing archive.

CGD favours columns that pack together without deadheads, CGU favours high crew
utilization, CGR samples the duty space at random and CGA re-uses archived
pairings ranked by a cheap reduced-cost estimate on flight connections.
"""

from __future__ import annotations

import math
from collections import OrderedDict, defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputDefect
from .pairgen import DutyNetwork, enumerate_pairings
from .rules import CostModel, Flight, Pairing, RuleSet, flying_cost

# a column must price below -MU_TOL to count as improving
MU_TOL = 1e-6
STRATEGIES = ("CGD", "CGU", "CGR", "CGA")


@dataclass(frozen=True)
class CgConfig:
    target_size: int = 4000
    quota_cgd: int | None = None
    quota_cgu: int | None = None
    quota_cgr: int | None = None
    quota_cga: int | None = None
    cgr_duty_sample: int = 200
    cgd_subset_frac: float = 0.25
    cgu_top_frac: float = 0.25
    archive_cap: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.target_size < 1:
            raise InputDefect("cg.target_size must be positive")
        given = [self.quota_cgd, self.quota_cgu, self.quota_cgr, self.quota_cga]
        if all(q is None for q in given):
            share, rest = divmod(self.target_size, 4)
            given = [share + (i < rest) for i in range(4)]
        elif any(q is None for q in given):
            raise InputDefect("set all four cg quotas or none")
        if any(q < 0 for q in given) or sum(given) != self.target_size:
            raise InputDefect(f"cg quotas {given} must be non-negative and sum to {self.target_size}")
        for name, q in zip(("quota_cgd", "quota_cgu", "quota_cgr", "quota_cga"), given):
            object.__setattr__(self, name, int(q))
        for name in ("cgd_subset_frac", "cgu_top_frac"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise InputDefect(f"cg.{name} must lie in (0, 1]")
        if self.cgr_duty_sample < 1:
            raise InputDefect("cg.cgr_duty_sample must be positive")
        if self.archive_cap is not None and self.archive_cap < 1:
            raise InputDefect("cg.archive_cap must be positive")

    @property
    def quotas(self) -> dict[str, int]:
        return {"CGD": self.quota_cgd, "CGU": self.quota_cgu,
                "CGR": self.quota_cgr, "CGA": self.quota_cga}


def reduced_cost(p: Pairing, y: np.ndarray, psi: float) -> tuple[float, float]:
    """(mu, mud) for one pairing; ``y`` is dense by ``flight_id - 1``.

    The deadhead-adjusted cost is used so that mu agrees with the dual constraints.
    """
    mud = float(sum(y[f - 1] for f in p.flights))
    return p.cost.total + psi * p.n_flights - mud, mud


def crew_utilization(p: Pairing, rules: RuleSet) -> float:
    """Mean over duties of elapsed duty time (with briefing pads) over the elapsed limit."""
    return sum(d.elapsed_minutes / rules.max_duty_elapsed for d in p.duties) / len(p.duties)


def rc_estimator(fm: Flight, fn: Flight, y: np.ndarray, cm: CostModel) -> float:
    return (flying_cost(fm, cm) - y[fm.id - 1]) + (flying_cost(fn, cm) - y[fn.id - 1])


def connection_pairs(p: Pairing) -> list[tuple[int, int]]:
    ids = p.flights
    return list(zip(ids, ids[1:]))


class PairingArchive:
    """Generated pairings indexed by each consecutive flight pair they contain.

    With ``cap`` set, the least recently retrieved pairing is evicted first.
    """

    def __init__(self, cap: int | None = None):
        self.cap = cap
        self._pairings: OrderedDict[str, Pairing] = OrderedDict()
        self._index: dict[tuple[int, int], set[str]] = defaultdict(set)

    def __len__(self):
        return len(self._pairings)

    def __contains__(self, key: str):
        return key in self._pairings

    def add(self, p: Pairing) -> bool:
        if p.key in self._pairings:
            return False
        self._pairings[p.key] = p
        for pair in connection_pairs(p):
            self._index[pair].add(p.key)
        if self.cap is not None:
            while len(self._pairings) > self.cap:
                self._evict(next(iter(self._pairings)))
        return True

    def _evict(self, key: str):
        p = self._pairings.pop(key)
        for pair in connection_pairs(p):
            keys = self._index[pair]
            keys.discard(key)
            if not keys:
                del self._index[pair]

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self._index)

    def retrieve(self, pair: tuple[int, int]) -> list[Pairing]:
        out = []
        for key in sorted(self._index.get(pair, ())):
            self._pairings.move_to_end(key)
            out.append(self._pairings[key])
        return out

    def snapshot(self) -> dict[tuple[int, int], tuple[str, ...]]:
        return {pair: tuple(sorted(keys)) for pair, keys in sorted(self._index.items())}


@dataclass
class CgResult:
    pairings: list[Pairing]
    yields: dict[str, int]
    mus: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def min_mu(self) -> float:
        return float(self.mus.min()) if self.mus.size else math.nan

    @property
    def median_mu(self) -> float:
        return float(np.median(self.mus)) if self.mus.size else math.nan

    @property
    def max_mu(self) -> float:
        return float(self.mus.max()) if self.mus.size else math.nan


class _Pricer:
    def __init__(self, y, psi, exclude):
        self.y, self.psi, self.exclude = y, psi, exclude
        self.cache: dict[str, tuple[float, float]] = {}

    def mu(self, p: Pairing) -> float:
        got = self.cache.get(p.key)
        if got is None:
            got = self.cache[p.key] = reduced_cost(p, self.y, self.psi)
        return got[0]

    def negatives(self, pairings) -> list[Pairing]:
        return [p for p in pairings if p.key not in self.exclude and self.mu(p) < -MU_TOL]


def _flights_of(pairings) -> set[int]:
    return {f for p in pairings for f in p.flights}


def _cgd(p_lp, x_lp, pricer, quota, cfg, net, cm, rng, threads):
    """Disjoint packings of negative columns first, then the rest by mu."""
    if not quota or not p_lp:
        return []
    k = max(1, math.ceil(cfg.cgd_subset_frac * len(p_lp)))
    k = min(k, len(p_lp))
    # LP weight biases the draw toward columns the relaxation actually uses
    w = np.clip(np.asarray(x_lp, dtype=float), 0.0, None)
    prob = w / w.sum() if np.count_nonzero(w) >= k else None
    pick = rng.choice(len(p_lp), size=k, replace=False, p=prob)
    cands = pricer.negatives(enumerate_pairings(net, cm, flights=_flights_of(p_lp[i] for i in pick),
                                                threads=threads))
    cands.sort(key=lambda p: (pricer.mu(p), p.key))
    out, rest = [], cands
    while rest and len(out) < quota:
        used, left = set(), []
        for p in rest:
            if len(out) < quota and used.isdisjoint(p.flights):
                out.append(p)
                used.update(p.flights)
            else:
                left.append(p)
        rest = left
    return out


def _cgu(p_lp, pricer, quota, cfg, net, cm, threads):
    """Harvest flights of the highest-mud support columns; rank negatives by utilization."""
    if not quota or not p_lp:
        return []
    k = max(1, math.ceil(cfg.cgu_top_frac * len(p_lp)))
    ranked = sorted(p_lp, key=lambda p: (-reduced_cost(p, pricer.y, pricer.psi)[1], p.key))
    cands = pricer.negatives(enumerate_pairings(net, cm, flights=_flights_of(ranked[:k]),
                                                threads=threads))
    rules = net.rules
    cands.sort(key=lambda p: (-crew_utilization(p, rules), pricer.mu(p), p.key))
    return cands[:quota]


def _cgr(pricer, quota, cfg, net, cm, rng, threads):
    """Pairings buildable from a uniform random sample of legal duties."""
    if not quota:
        return []
    pool = [d for _, bn in sorted(net.bases.items()) for d in bn.duties]
    if not pool:
        return []
    pick = rng.choice(len(pool), size=min(cfg.cgr_duty_sample, len(pool)), replace=False)
    cands = pricer.negatives(enumerate_pairings(net, cm, duties=[pool[i] for i in pick],
                                                threads=threads))
    order = rng.permutation(len(cands))
    return [cands[i] for i in order[:quota]]


def _cga(pricer, quota, archive, net, cm):
    """Archived pairings through the connections with the lowest estimated reduced cost."""
    if not quota or not len(archive):
        return []
    sched = net.schedule
    ranked = sorted(archive.pairs(), key=lambda pr: (
        rc_estimator(sched.flight(pr[0]), sched.flight(pr[1]), pricer.y, cm), pr))
    out, seen = [], set()
    for pair in ranked:
        for p in archive.retrieve(pair):
            if p.key in seen:
                continue
            seen.add(p.key)
            if p.key not in pricer.exclude and pricer.mu(p) < -MU_TOL:
                out.append(p)
                if len(out) >= quota:
                    return out
    return out


def generate(p_lp: Sequence[Pairing], x_lp, y: np.ndarray, archive: PairingArchive,
             cfg: CgConfig, net: DutyNetwork, cm: CostModel, rng: np.random.Generator | None = None,
             threads: int = 1) -> CgResult:
    """P_CG: key-sorted union of the four strategies, excluding anything already in P_LP.

    ``y`` is dense by ``flight_id - 1``. Generated pairings are archived.
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    y = np.asarray(y, dtype=float)
    p_lp = list(p_lp)
    psi = cm.deadhead_penalty
    pricer = _Pricer(y, psi, {p.key for p in p_lp})
    q = cfg.quotas
    # each strategy gets its own stream so quotas do not perturb one another
    r_cgd, r_cgr = rng.spawn(2)
    found = {
        "CGD": _cgd(p_lp, x_lp, pricer, q["CGD"], cfg, net, cm, r_cgd, threads),
        "CGU": _cgu(p_lp, pricer, q["CGU"], cfg, net, cm, threads),
        "CGR": _cgr(pricer, q["CGR"], cfg, net, cm, r_cgr, threads),
        "CGA": _cga(pricer, q["CGA"], archive, net, cm),
    }
    merged: dict[str, Pairing] = {}
    for name in STRATEGIES:
        for p in found[name]:
            merged.setdefault(p.key, p)
    out = [merged[k] for k in sorted(merged)]
    for p in out:
        archive.add(p)
    mus = np.array([pricer.mu(p) for p in out])
    return CgResult(out, {name: len(found[name]) for name in STRATEGIES}, mus)
