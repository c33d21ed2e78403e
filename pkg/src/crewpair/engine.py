"""Optimization engine: column-generation LP phases alternating with integerization.

Each interaction T runs the LPP loop (restricted master, explicit dual, pricing)
until the objective stops improving, then solves the covering IP over the LP
support. Interactions stop once the IP cost locks in at its LP bound.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .colgen import CgConfig, PairingArchive, generate
from .errors import InputDefect
from .lp import ColumnPool, solve_dual, solve_primal
from .mip import gap_closed, ip_objective, solve_ip
from .pairgen import DutyNetwork
from .rules import CostModel, Pairing

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineConfig:
    th_cost: float = 100.0
    th_t: int = 10
    th_ipt: float | None = 1200.0  # None: no limit on integerization time
    t_max: int = 30
    wall_max: float = 30 * 3600.0
    seed: int = 0
    keep_priced: bool = False

    def __post_init__(self):
        for name in ("th_cost", "th_t", "th_ipt", "t_max", "wall_max"):
            v = getattr(self, name)
            if v is None and name == "th_ipt":
                continue
            if v is None or not v > 0:
                raise InputDefect(f"engine.{name} must be positive")


@dataclass
class PhaseRow:
    T: int
    phase: str  # IFS, LP or IP
    cost: float
    n_pairings: int
    seconds: float
    status: str = ""


@dataclass
class IterationRow:
    T: int
    t: int
    z_p: float
    n_pool: int
    n_support: int
    yields: dict[str, int] = field(default_factory=dict)
    n_priced: int = 0
    min_mu: float = math.nan
    median_mu: float = math.nan
    max_mu: float = math.nan
    seconds: float = 0.0


PHASE_FIELDS = ["T", "phase", "cost", "n_pairings", "status"]
ITER_FIELDS = ["T", "t", "z_p", "n_pool", "n_support", "CGD", "CGU", "CGR", "CGA",
               "n_priced", "min_mu", "median_mu", "max_mu"]


def _num(v) -> str:
    return "" if isinstance(v, float) and math.isnan(v) else repr(v)


@dataclass
class EngineTrace:
    phases: list[PhaseRow] = field(default_factory=list)
    iterations: list[IterationRow] = field(default_factory=list)
    stop_reason: str = ""

    def phase_csv(self) -> str:
        """Cost trace without wall times, so equal seeds give byte-identical files."""
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(PHASE_FIELDS)
        for r in self.phases:
            w.writerow([r.T, r.phase, _num(r.cost), r.n_pairings, r.status])
        w.writerow(["", "stop", "", "", self.stop_reason])
        return out.getvalue()

    def iteration_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(ITER_FIELDS)
        for r in self.iterations:
            w.writerow([r.T, r.t, _num(r.z_p), r.n_pool, r.n_support,
                        *(r.yields.get(k, 0) for k in ("CGD", "CGU", "CGR", "CGA")),
                        r.n_priced, _num(r.min_mu), _num(r.median_mu), _num(r.max_mu)])
        return out.getvalue()

    def timing_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["T", "phase", "t", "seconds"])
        for r in self.phases:
            w.writerow([r.T, r.phase, "", f"{r.seconds:.3f}"])
        for r in self.iterations:
            w.writerow([r.T, "LPP", r.t, f"{r.seconds:.3f}"])
        return out.getvalue()

    def table(self) -> str:
        """Interaction-by-interaction cost and time, one line per phase."""
        lines = [f"{'T':>3}  {'Phase':<6}{'Pairings':>10}{'Cost':>16}{'Time (s)':>11}  Status"]
        for r in self.phases:
            lines.append(f"{r.T:>3}  {r.phase:<6}{r.n_pairings:>10}{r.cost:>16.2f}"
                         f"{r.seconds:>11.2f}  {r.status}")
        lines.append(f"stop: {self.stop_reason}")
        return "\n".join(lines)

    def lpp_iterations(self) -> int:
        return len(self.iterations)


@dataclass
class EngineResult:
    pairings: list[Pairing]
    objective: float
    best_T: int
    trace: EngineTrace


def run(net: DutyNetwork, p_init: Sequence[Pairing], cfg: EngineConfig, cg: CgConfig,
        cm: CostModel, threads: int = 1,
        clock: Callable[[], float] = time.perf_counter) -> EngineResult:
    """Alternate LPP and IPP solutioning starting from the covering set ``p_init``."""
    start = clock()
    psi = cm.deadhead_penalty
    rows = [f.id for f in net.schedule.flights]
    n_f = len(rows)
    trace = EngineTrace()

    def elapsed():
        return clock() - start

    init_pool = ColumnPool(sorted(p_init, key=lambda p: p.key), rows)
    z_init = ip_objective(init_pool, range(len(init_pool)), psi)
    trace.phases.append(PhaseRow(0, "IFS", z_init, len(init_pool), elapsed()))
    best = (z_init, list(init_pool.columns), 0)

    archive = PairingArchive(cg.archive_cap)
    carry = list(init_pool.columns)
    for T in range(1, cfg.t_max + 1):
        history: list[float] = []
        pool_cols = carry
        t = 0
        while True:
            t += 1
            t_start = clock()
            pool = ColumnPool(pool_cols, rows)
            prim = solve_primal(pool, psi)
            history.append(prim.objective)
            support = prim.support_pool()
            row = IterationRow(T, t, prim.objective, len(pool), len(support))
            trace.iterations.append(row)
            if t > cfg.th_t and history[-1 - cfg.th_t] - history[-1] <= cfg.th_cost:
                reason = "converged"
            elif elapsed() >= cfg.wall_max:
                reason = "wall"
            else:
                dual = solve_dual(support, psi)
                rng = np.random.default_rng([cfg.seed, T, t])
                res = generate(support.columns, prim.x[prim.support], dual.by_flight(n_f),
                               archive, cg, net, cm, rng=rng, threads=threads)
                row.yields, row.n_priced = res.yields, len(res.pairings)
                row.min_mu, row.median_mu, row.max_mu = res.min_mu, res.median_mu, res.max_mu
                reason = "" if res.pairings else "exhausted"
            row.seconds = clock() - t_start
            if reason:
                break
            pool_cols = list(support.columns) + res.pairings
        log.info("T=%d LPP stop (%s) after %d iterations, Z_LP=%.2f", T, reason, t, prim.objective)

        p_lp = list(pool.columns) if cfg.keep_priced else list(support.columns)
        z_lp = prim.objective
        trace.phases.append(PhaseRow(T, "LP", z_lp, len(p_lp), elapsed(), reason))
        ip_pool = ColumnPool(p_lp, rows)
        ip = solve_ip(ip_pool, psi, th_ipt=cfg.th_ipt)
        trace.phases.append(PhaseRow(T, "IP", ip.objective, len(ip.columns), elapsed(),
                                     ip.status.value))
        log.info("T=%d IP %s Z_IP=%.2f (%d nodes)", T, ip.status.value, ip.objective, ip.nodes)
        if ip.objective < best[0] - 1e-9 * max(1.0, abs(best[0])):
            best = (ip.objective, list(ip.columns), T)
        carry = list(ip.columns)
        if gap_closed(ip.objective, z_lp):
            trace.stop_reason = "lock-in"
            break
        if elapsed() >= cfg.wall_max:
            trace.stop_reason = "wall"
            break
    else:
        trace.stop_reason = "t_max"

    z, cols, best_t = best
    return EngineResult(sorted(cols, key=lambda p: p.key), z, best_t, trace)
