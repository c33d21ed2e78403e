"""Mehrotra predictor-corrector interior-point method for small dense LPs.

Solves ``min c.x  s.t.  A x = b, x >= 0`` without crossover. On degenerate
problems the iterates approach the analytic centre of the optimal face, which
is what makes it useful for well-centred dual prices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, IterationLimit


@dataclass
class IpmResult:
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    objective: float
    iterations: int


def _solve_normal(a, d, r, refine: int = 3):
    """Solve (A D A^T) u = r with a tiny ridge plus iterative refinement.

    Late iterations make D wildly scaled; the ridge keeps the factorisation
    alive and refinement against the unregularised matrix removes its bias.
    """
    m = a @ (d[:, None] * a.T)
    reg = m.copy()
    reg[np.diag_indices_from(reg)] += 1e-14 * max(1.0, float(np.abs(np.diag(m)).max()))
    try:
        l = np.linalg.cholesky(reg)

        def back(v):
            return np.linalg.solve(l.T, np.linalg.solve(l, v))
    except np.linalg.LinAlgError:
        def back(v):
            return np.linalg.lstsq(reg, v, rcond=None)[0]
    u = back(r)
    for _ in range(refine):
        u = u + back(r - m @ u)
    return u


def _step(v, dv):
    neg = dv < 0
    if not neg.any():
        return 1.0
    return min(1.0, float((-v[neg] / dv[neg]).min()))


def solve(c, a, b, tol: float = 1e-10, max_iter: int = 200) -> IpmResult:
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    # Mehrotra's starting point
    aat = a @ a.T
    aat[np.diag_indices_from(aat)] += 1e-12
    x = a.T @ np.linalg.solve(aat, b)
    y = np.linalg.solve(aat, a @ c)
    s = c - a.T @ y
    x += max(-1.5 * x.min(), 0.0)
    s += max(-1.5 * s.min(), 0.0)
    xs = float(x @ s)
    x += 0.5 * xs / max(s.sum(), 1e-300) + 1e-8
    s += 0.5 * xs / max(x.sum(), 1e-300) + 1e-8

    bnorm = 1.0 + np.abs(b).max()
    cnorm = 1.0 + np.abs(c).max()
    for it in range(1, max_iter + 1):
        rp = b - a @ x
        rd = c - a.T @ y - s
        mu = float(x @ s) / n
        pobj, dobj = float(c @ x), float(b @ y)
        if (np.abs(rp).max() <= tol * bnorm and np.abs(rd).max() <= tol * cnorm
                and abs(pobj - dobj) <= tol * (1.0 + abs(pobj))):
            return IpmResult(x, y, s, pobj, it)
        d = x / s

        def direction(rxs):
            # rxs is the complementarity residual target for x*s
            rhs = rp + a @ (d * rd - rxs / s)
            dy = _solve_normal(a, d, rhs)
            ds = rd - a.T @ dy
            dx = (rxs - x * ds) / s
            return dx, dy, ds

        dx_a, dy_a, ds_a = direction(-x * s)
        ap, ad = _step(x, dx_a), _step(s, ds_a)
        mu_aff = float((x + ap * dx_a) @ (s + ad * ds_a)) / n
        sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0
        dx, dy, ds = direction(-x * s - dx_a * ds_a + sigma * mu)
        ap = min(1.0, 0.995 * _step(x, dx))
        ad = min(1.0, 0.995 * _step(s, ds))
        x = x + ap * dx
        y = y + ad * dy
        s = s + ad * ds
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            break
        if float(np.abs(x).max()) > 1e15 or float(np.abs(y).max()) > 1e15:
            raise InfeasibleError("interior-point iterates diverged; LP infeasible or unbounded", [])
    raise IterationLimit(f"interior point did not converge in {max_iter} iterations")
