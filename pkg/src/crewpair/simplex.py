"""Dense revised simplex for ``min c.x  s.t.  A x = b, x >= 0`` with ``b >= 0``.

Dantzig pricing by default; after a run of degenerate pivots the solver
switches to Bland's rule until the objective moves again, which rules out
cycling. The basis inverse is updated in product form and refactorised
periodically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, IterationLimit

REFACTOR_EVERY = 64
DEGENERATE_RUN = 30


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    duals: np.ndarray       # y = c_B B^-1, one per equality row
    basis: np.ndarray
    iterations: int
    basis_inverse: np.ndarray | None = None
    inverse_age: int = 0    # product-form updates since basis_inverse was factorised


class Unbounded(Exception):
    pass


def _iterate(A, b, c, basis, enterable, opt_tol, max_iter, it0=0, Binv=None):
    if Binv is None:
        Binv = np.linalg.inv(A[:, basis])
    xB = Binv @ b
    blocked = np.flatnonzero(~enterable)
    bland = False
    degenerate = 0
    it = it0
    since_refactor = 0
    piv_tol = 1e-9
    while True:
        if since_refactor >= REFACTOR_EVERY:
            Binv = np.linalg.inv(A[:, basis])
            xB = Binv @ b
            since_refactor = 0
        # the iterate is primal feasible; clear rounding drift below zero
        np.maximum(xB, 0.0, out=xB)
        y = c[basis] @ Binv
        d = c - y @ A
        d[basis] = 0.0
        if blocked.size:
            d[blocked] = 0.0
        if bland:
            cand = np.flatnonzero(d < -opt_tol)
            if cand.size == 0:
                return Binv, xB, y, it
            q = int(cand[0])
        else:
            q = int(np.argmin(d))
            if d[q] >= -opt_tol:
                return Binv, xB, y, it
        if it >= max_iter:
            raise IterationLimit(f"simplex exceeded {max_iter} iterations")
        u = Binv @ A[:, q]
        rows = (u > piv_tol).nonzero()[0]
        if rows.size == 0:
            raise Unbounded()
        ratios = xB[rows] / u[rows]
        theta = ratios.min()
        ties = rows[ratios <= theta + 1e-12 * max(1.0, abs(theta))]
        if bland or ties.size == 1:
            r = int(ties[np.argmin(basis[ties])])
        else:
            r = int(ties[np.argmax(u[ties])])
        # product-form update of the basis inverse
        piv = u[r]
        row_r = Binv[r] / piv
        Binv -= u[:, None] * row_r
        Binv[r] = row_r
        step = xB[r] / piv
        xB -= step * u
        xB[r] = step
        basis[r] = q
        it += 1
        since_refactor += 1
        if step <= 1e-12:
            degenerate += 1
            if degenerate >= DEGENERATE_RUN:
                bland = True
        else:
            degenerate = 0
            bland = False


def solve(c, A, b, basis=None, max_iter=None, opt_tol=None) -> SimplexResult:
    """Solve the standard-form LP; ``basis`` may give a known feasible starting basis."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be non-negative")
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    if opt_tol is None:
        opt_tol = 1e-11 * max(1.0, float(np.abs(c).max(initial=0.0)))
    if m == 0:
        if np.any(c < -opt_tol):
            raise Unbounded()
        return SimplexResult(np.zeros(n), 0.0, np.zeros(0), np.zeros(0, dtype=int), 0)

    it = 0
    if basis is None:
        # phase one on artificial columns
        A1 = np.hstack([A, np.eye(m)])
        c1 = np.concatenate([np.zeros(n), np.ones(m)])
        basis = np.arange(n, n + m)
        enter1 = np.ones(n + m, dtype=bool)
        Binv, xB, _, it = _iterate(A1, b, c1, basis, enter1, 1e-11, max_iter)
        infeas = float(xB[basis >= n].sum())
        if infeas > 1e-9 * max(1.0, float(b.sum())):
            raise InfeasibleError(f"LP infeasible (phase-one residual {infeas:.3g})")
        # pivot zero-level artificials out where a structural column can replace them
        for r in np.flatnonzero(basis >= n):
            row = Binv[r] @ A
            row[basis[basis < n]] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-9:
                basis[r] = j
                Binv = np.linalg.inv(A1[:, basis])
        if np.any(basis >= n):
            # redundant rows: keep the artificial basic at zero, never let it re-enter
            A2, c2 = A1, np.concatenate([c, np.zeros(m)])
            enter2 = np.concatenate([np.ones(n, dtype=bool), np.zeros(m, dtype=bool)])
        else:
            A2, c2, enter2 = A, c, np.ones(n, dtype=bool)
    else:
        basis = np.asarray(basis, dtype=int).copy()
        A2, c2, enter2 = A, c, np.ones(n, dtype=bool)
        Binv = None

    Binv, xB, y, it = _iterate(A2, b, c2, basis, enter2, opt_tol, max_iter, it, Binv)
    x = np.zeros(A2.shape[1])
    x[basis] = xB
    x = x[:n]
    return SimplexResult(x=x, objective=float(c @ x), duals=y, basis=basis, iterations=it)


def dual_simplex(c, A, b, lower, upper, basis, max_iter=None, tol=1e-9,
                 basis_inverse=None, inverse_age=0) -> SimplexResult:
    """Reoptimise ``min c.x  s.t.  A x = b, lower <= x <= upper`` from a dual-feasible basis.

    Every nonbasic variable sits at its lower bound, so an upper bound may only be
    finite where it equals the lower one (a fixed variable). This is the
    branch-and-bound case: the parent's optimal basis stays dual feasible when a
    variable is fixed, and usually a handful of pivots restore primal feasibility.
    ``basis_inverse`` (left untouched; ``inverse_age`` updates old) saves the
    initial factorisation. Raises
    InfeasibleError when a bound violation cannot be repaired.
    """
    A = np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m, n = A.shape
    fixed = upper <= lower
    if np.any(np.isfinite(upper) & ~fixed):
        raise ValueError("finite upper bounds are only supported on fixed variables")
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    basis = np.asarray(basis, dtype=int).copy()
    b = np.asarray(b, dtype=float)
    movable = ~fixed
    movable[basis] = False
    scale = max(1.0, float(np.abs(c).max(initial=0.0)))
    it = 0
    if basis_inverse is None or inverse_age >= REFACTOR_EVERY:
        Binv, since_refactor = np.linalg.inv(A[:, basis]), 0
    else:
        Binv, since_refactor = np.array(basis_inverse, dtype=float), inverse_age
    fresh = True
    while True:
        if fresh or since_refactor >= REFACTOR_EVERY:
            if not fresh:
                Binv = np.linalg.inv(A[:, basis])
                since_refactor = 0
            fresh = False
            at_lower = lower.copy()
            at_lower[basis] = 0.0
            xB = Binv @ (b - A @ at_lower)
            d = c - (c[basis] @ Binv) @ A
            d[basis] = 0.0
            lo_b, hi_b = lower[basis], upper[basis]
        viol = np.maximum(lo_b - xB, xB - hi_b)
        bad = (viol > tol).nonzero()[0]
        if bad.size == 0:
            break
        if it >= max_iter:
            raise IterationLimit(f"dual simplex exceeded {max_iter} iterations")
        # dual steepest edge: violation scaled by the norm of the row of B^-1
        if bad.size == 1:
            r = int(bad[0])
        else:
            r = int(bad[np.argmax(viol[bad] ** 2 / np.square(Binv[bad]).sum(axis=1))])
        leaving = basis[r]
        target = lo_b[r]
        alpha = Binv[r] @ A
        # the leaving variable moves to its violated bound; entering must push it there
        push = -alpha if xB[r] < target else alpha
        cand = ((push > 1e-9) & movable).nonzero()[0]
        if cand.size == 0:
            raise InfeasibleError("bounds admit no feasible point")
        ratios = np.maximum(d[cand], 0.0) / push[cand]
        k = int(np.argmin(ratios))
        ties = cand[ratios <= ratios[k] + 1e-12 * scale]
        q = int(ties[0]) if ties.size == 1 else int(ties[np.argmax(push[ties])])
        u = Binv @ A[:, q]
        # dual step zeroes d_q; primal step puts the leaving variable on its bound
        d -= (d[q] / alpha[q]) * alpha
        d[q] = 0.0
        step = (xB[r] - target) / u[r]
        xB -= step * u
        xB[r] = lower[q] + step
        row_r = Binv[r] / u[r]
        Binv -= u[:, None] * row_r
        Binv[r] = row_r
        basis[r] = q
        lo_b[r], hi_b[r] = lower[q], upper[q]
        movable[q] = False
        movable[leaving] = not fixed[leaving]
        it += 1
        since_refactor += 1
    y = c[basis] @ Binv
    x = lower.copy()
    x[basis] = xB
    return SimplexResult(x=x, objective=float(c @ x), duals=y, basis=basis, iterations=it,
                         basis_inverse=Binv, inverse_age=since_refactor)

