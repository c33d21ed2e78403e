"""Depth-first branch-and-bound for the set-covering integer program.

Objective: sum of pairing costs plus ``psi`` per deadhead, a deadhead being
each coverage of a flight beyond the first.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, UncoveredFlight
from . import simplex
from .lp import ColumnPool
from .rules import Pairing

DEFAULT_NODE_CAP = 10_000_000
INT_TOL = 1e-9


class MipStatus(enum.Enum):
    OPTIMAL = "Optimal"
    TIME_LIMIT = "TimeLimit"
    NODE_LIMIT = "NodeLimit"


@dataclass
class MipResult:
    incumbent: list[int]
    columns: list[Pairing]
    objective: float
    bound: float
    status: MipStatus
    nodes: int
    log: list[dict] = field(default_factory=list)


def gap_closed(upper: float, lower: float) -> bool:
    return upper - lower <= 1e-6 * max(1.0, abs(upper))


def count_deadheads(columns: Sequence[Pairing], rows: Sequence[int]) -> dict[int, int]:
    """Per-flight overcoverage of a selection; raises UncoveredFlight if any row is missed."""
    hits = {fid: 0 for fid in rows}
    for p in columns:
        for fid in p.flights:
            if fid in hits:
                hits[fid] += 1
    missing = [fid for fid, n in hits.items() if n == 0]
    if missing:
        raise UncoveredFlight(f"{len(missing)} flights uncovered", missing)
    return {fid: n - 1 for fid, n in hits.items()}


def ip_objective(pool: ColumnPool, selected: Sequence[int], psi: float) -> float:
    """Covering cost of a column selection including deadhead penalties."""
    dead = count_deadheads([pool.columns[j] for j in selected], pool.rows)
    return float(sum(pool.costs[j] for j in selected)) + psi * sum(dead.values())


def solve_ip(pool: ColumnPool, psi: float, th_ipt: float | None = None,
             node_cap: int = DEFAULT_NODE_CAP) -> MipResult:
    """Exact set-covering IP over a fixed pool.

    Branches on the most fractional variable (ties: lower cost, then key),
    exploring ``x_j = 0`` first. The root incumbent selects every column.
    Node LPs keep every row and column, express fixings as bounds, and are
    reoptimised by the dual simplex from the parent's optimal basis.
    """
    t0 = time.perf_counter()
    a = pool.matrix() > 0
    m, n = a.shape
    missing = pool.uncovered_rows()
    if missing:
        raise InfeasibleError(f"{len(missing)} flights not covered by any column", missing)
    cadj = pool.costs + psi * a.sum(axis=0)
    const = -m * psi
    key_rank = np.empty(n, dtype=int)
    key_rank[sorted(range(n), key=pool.keys.__getitem__)] = np.arange(n)
    # a x - s = 1 with surplus s >= 0
    A = np.hstack([a.astype(float), -np.eye(m)])
    c = np.concatenate([cadj, np.zeros(m)])
    root = simplex.solve(c, A, np.ones(m))

    best_sel = list(range(n))
    best = float(cadj.sum()) + const
    log = [{"node": 0, "event": "root-incumbent", "incumbent": best, "time": 0.0}]

    def tol(z):
        return 1e-6 * max(1.0, abs(z))

    # node: (columns fixed to one, mask of columns fixed to zero, parent bound,
    #        parent basis, its inverse and the inverse's update count)
    stack = [((), np.zeros(n, dtype=bool), -np.inf, root.basis, None, 0)]
    nodes = 0
    status = MipStatus.OPTIMAL
    while stack:
        if th_ipt is not None and time.perf_counter() - t0 >= th_ipt:
            status = MipStatus.TIME_LIMIT
            break
        if nodes >= node_cap:
            status = MipStatus.NODE_LIMIT
            break
        ones, zeros, parent_bound, basis, binv, age = stack.pop()
        if parent_bound > best - tol(best):
            continue
        nodes += 1
        lower = np.zeros(n + m)
        upper = np.full(n + m, np.inf)
        lower[list(ones)] = upper[list(ones)] = 1.0
        upper[:n][zeros] = 0.0
        try:
            lp = simplex.dual_simplex(c, A, np.ones(m), lower, upper, basis,
                                      basis_inverse=binv, inverse_age=age)
        except InfeasibleError:
            continue
        x = lp.x[:n]
        bound = float(cadj @ x) + const
        if bound > best - tol(best):
            continue
        free = np.isinf(upper[:n])
        # reduced-cost fixing: raising x_j from 0 costs at least its reduced cost
        red = cadj - lp.duals @ A[:, :n]
        drop = free & (x <= INT_TOL) & (red > best - bound - tol(best))
        drop[lp.basis[lp.basis < n]] = False
        if drop.any():
            zeros = zeros | drop
            free &= ~drop
        frac = np.abs(x - np.round(x))
        if frac.max() <= INT_TOL:
            chosen = [int(j) for j in np.flatnonzero(x > 0.5)]
            z = float(cadj[chosen].sum()) + const
            if z < best - 1e-9 * max(1.0, abs(best)):
                best, best_sel = z, chosen
                log.append({"node": nodes, "event": "incumbent", "incumbent": best,
                            "bound": bound, "time": time.perf_counter() - t0})
            continue
        cand = np.flatnonzero(free & (frac > INT_TOL))
        closeness = np.round(np.abs(x[cand] - 0.5), 12)
        j = int(cand[np.lexsort((key_rank[cand], pool.costs[cand], closeness))[0]])
        down = zeros.copy()
        down[j] = True
        # LIFO: push the up-branch first so the down-branch is explored first
        warm = (lp.basis, lp.basis_inverse, lp.inverse_age)
        stack.append((ones + (j,), zeros, bound, *warm))
        stack.append((ones, down, bound, *warm))

    if status is MipStatus.OPTIMAL:
        lower_bound = best
    else:
        open_bounds = [node[2] for node in stack]
        lower_bound = min(open_bounds + [best]) if open_bounds else best
    log.append({"node": nodes, "event": "stop", "status": status.value, "incumbent": best,
                "bound": lower_bound, "time": time.perf_counter() - t0})
    return MipResult(incumbent=sorted(best_sel), columns=[pool.columns[j] for j in sorted(best_sel)],
                     objective=ip_objective(pool, best_sel, psi), bound=lower_bound,
                     status=status, nodes=nodes, log=log)
