"""Restricted master LP: the set-covering relaxation and its explicitly solved dual.

Column costs are carried deadhead-adjusted (``c_j + psi * |p_j|``); the constant
``-F * psi`` is added back to every reported objective so it matches the
covering cost with deadhead penalties.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import ipm, simplex
from .errors import DimensionMismatch, InfeasibleError
from .rules import Pairing

SUPPORT_EPS = 1e-6


class ColumnPool:
    """Columns (pairings) over a fixed row set of flight ids.

    ``costs`` defaults to each pairing's total cost; callers may override it
    (IPDCH does, to price overlap with already-covered flights).
    """

    def __init__(self, columns: Sequence[Pairing], rows: Sequence[int], costs=None):
        self.columns = list(columns)
        self.rows = tuple(rows)
        keys = [p.key for p in self.columns]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate pairing keys in column pool")
        if costs is None:
            costs = [p.cost.total for p in self.columns]
        self.costs = np.asarray(costs, dtype=float)
        self._matrix = None

    def __len__(self):
        return len(self.columns)

    @property
    def keys(self) -> list[str]:
        return [p.key for p in self.columns]

    def matrix(self) -> np.ndarray:
        """Dense 0/1 coverage matrix, rows x columns."""
        if self._matrix is None:
            index = {fid: i for i, fid in enumerate(self.rows)}
            a = np.zeros((len(self.rows), len(self.columns)))
            for j, p in enumerate(self.columns):
                for fid in p.flights:
                    i = index.get(fid)
                    if i is not None:
                        a[i, j] += 1.0
            self._matrix = a
        return self._matrix

    def adjusted_costs(self, psi: float) -> np.ndarray:
        return self.costs + psi * self.matrix().sum(axis=0)

    def uncovered_rows(self) -> list[int]:
        a = self.matrix()
        return [fid for fid, hit in zip(self.rows, a.sum(axis=1) > 0) if not hit]

    def subset(self, idx) -> "ColumnPool":
        idx = list(idx)
        return ColumnPool([self.columns[j] for j in idx], self.rows, self.costs[idx])


# A covering solver maps (adjusted costs, 0/1 matrix) to (x, row duals).
CoveringSolver = Callable[[np.ndarray, np.ndarray], "tuple[np.ndarray, np.ndarray]"]


def simplex_covering(cost: np.ndarray, a: np.ndarray):
    """min cost.x  s.t.  a x >= 1, x >= 0 via the built-in revised simplex."""
    m, n = a.shape
    A = np.hstack([a, -np.eye(m)])
    c = np.concatenate([cost, np.zeros(m)])
    res = simplex.solve(c, A, np.ones(m))
    return res.x[:n], res.duals


def highs_covering(cost: np.ndarray, a: np.ndarray):
    """Same problem through SciPy's HiGHS interior-point method."""
    from scipy.optimize import linprog

    res = linprog(cost, A_ub=-a, b_ub=-np.ones(a.shape[0]), bounds=(0, None),
                  method="highs-ipm")
    if res.status != 0:
        raise InfeasibleError(f"HiGHS: {res.message}")
    return res.x, -res.ineqlin.marginals


@dataclass
class PrimalSolution:
    pool: ColumnPool
    x: np.ndarray
    objective: float
    basis_duals: np.ndarray
    support: list[int] = field(default_factory=list)

    @property
    def support_columns(self) -> list[Pairing]:
        return [self.pool.columns[j] for j in self.support]

    def support_pool(self) -> ColumnPool:
        return self.pool.subset(self.support)


@dataclass
class DualVector:
    rows: tuple[int, ...]
    y: np.ndarray
    objective: float

    def by_flight(self, n_flights: int) -> np.ndarray:
        """Dense vector indexed by ``flight_id - 1``; rows outside the pool get 0."""
        out = np.zeros(n_flights)
        for fid, v in zip(self.rows, self.y):
            out[fid - 1] = v
        return out


def solve_primal(pool: ColumnPool, psi: float, solver: CoveringSolver | None = None,
                 support_eps: float = SUPPORT_EPS) -> PrimalSolution:
    missing = pool.uncovered_rows()
    if missing:
        raise InfeasibleError(f"{len(missing)} flights not covered by any column", missing)
    solver = solver or simplex_covering
    cost = pool.adjusted_costs(psi)
    x, y = solver(cost, pool.matrix())
    x = np.where(np.abs(x) < 1e-12, 0.0, x)
    z = float(cost @ x) - len(pool.rows) * psi
    support = [int(j) for j in np.flatnonzero(x > support_eps)]
    return PrimalSolution(pool=pool, x=x, objective=z, basis_duals=np.asarray(y, dtype=float),
                          support=support)


def solve_dual(support: ColumnPool, psi: float, rows: Sequence[int] | None = None,
               method: str = "ipm") -> DualVector:
    """max sum(y) - F psi  s.t.  a_j . y <= c_j + psi |p_j| for each support column, y >= 0.

    Solved as an LP in its own right rather than read off the primal basis. The
    support alone leaves the dual badly underdetermined; the default interior
    point method returns prices near the centre of the optimal face, while
    ``method="simplex"`` returns a vertex, which can put a column's whole cost
    on a single flight and stall pricing.
    """
    if rows is not None and tuple(rows) != support.rows:
        raise DimensionMismatch("dual rows differ from the support pool rows")
    a = support.matrix()
    m, k = a.shape
    missing = support.uncovered_rows()
    if missing:
        raise DimensionMismatch(f"flights {missing[:10]} appear in no support column")
    cost = support.adjusted_costs(psi)
    # variables [y (m), slack (k)]; rows: a^T y + s = cost
    A = np.hstack([a.T, np.eye(k)])
    c = np.concatenate([-np.ones(m), np.zeros(k)])
    if method == "ipm":
        y = np.clip(ipm.solve(c, A, cost).x[:m], 0.0, None)
    elif method == "simplex":
        y = simplex.solve(c, A, cost, basis=np.arange(m, m + k)).x[:m]
    else:
        raise ValueError(f"unknown dual method {method!r}")
    return DualVector(rows=support.rows, y=y, objective=float(y.sum()) - m * psi)


def reduced_costs(pool: ColumnPool, psi: float, y: np.ndarray) -> np.ndarray:
    """mu_j over a pool, with ``y`` aligned to ``pool.rows``."""
    return pool.adjusted_costs(psi) - y @ pool.matrix()


def dump_debug(path, pool: ColumnPool, x, y) -> None:
    """Line-oriented dump of pool, primal and dual values for cross-checking."""
    with open(path, "w") as fh:
        fh.write("# crewpair lp-dump v1\n")
        fh.write("rows " + " ".join(map(str, pool.rows)) + "\n")
        for fid, v in zip(pool.rows, y):
            fh.write(f"y {fid} {float(v)!r}\n")
        for p, c, v in zip(pool.columns, pool.costs, x):
            fh.write(f"col {p.key} {float(c)!r} {float(v)!r} {','.join(map(str, p.flights))}\n")
