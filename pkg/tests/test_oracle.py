import itertools

import numpy as np
import pytest

from crewpair import netgen
from crewpair.errors import InfeasibleError, InputDefect, UncoveredFlight
from crewpair.lp import ColumnPool
from crewpair.mip import ip_objective
from crewpair.oracle import (brute_force_duties, exact_optimum, search_duties, search_pairings,
                             solve_covering_exact)

from helpers import CM, ORACLE_OPTIMA, PSI, RULES, FakePairing, instance


@pytest.mark.parametrize("seed", range(3))
def test_frozen_optima(seed):
    res = exact_optimum(instance(seed)[0], RULES, CM)
    assert res.objective == pytest.approx(ORACLE_OPTIMA[seed], abs=1e-6)
    rows = [f.id for f in instance(seed)[0].flights]
    pool = ColumnPool(res.pairings, rows)
    assert ip_objective(pool, range(len(pool)), PSI) == pytest.approx(res.objective)


def test_pruned_search_equals_brute_force():
    s = netgen.generate(netgen.TINY, RULES)
    assert [d.key for d in search_duties(s, RULES)] == [d.key for d in brute_force_duties(s, RULES)]


def test_limits():
    with pytest.raises(InputDefect):
        brute_force_duties(instance(0)[0], RULES)
    with pytest.raises(InputDefect):
        exact_optimum(instance(0)[0], RULES, CM, max_flights=10)


def test_exact_covering_against_subset_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = int(rng.integers(2, 6))
        cols = [FakePairing(f"s{i}", (i,), rng.integers(100, 900)) for i in range(1, m + 1)]
        for j in range(int(rng.integers(1, 6))):
            fl = rng.choice(np.arange(1, m + 1), int(rng.integers(2, m + 1)), replace=False)
            cols.append(FakePairing(f"c{j}", sorted(fl.tolist()), rng.integers(100, 1500)))
        pool = ColumnPool(cols, range(1, m + 1))
        best = np.inf
        for r in range(1, len(cols) + 1):
            for sel in itertools.combinations(range(len(cols)), r):
                try:
                    best = min(best, ip_objective(pool, sel, PSI))
                except UncoveredFlight:
                    pass
        assert solve_covering_exact(cols, pool.rows, PSI).objective == pytest.approx(best)


def test_uncoverable():
    with pytest.raises(InfeasibleError):
        solve_covering_exact([FakePairing("a", (1,), 1)], [1, 2], PSI)
    assert solve_covering_exact([], [], PSI).objective == 0.0


def test_search_pairings_accepts_duties():
    s = netgen.generate(netgen.TINY, RULES)
    full = search_pairings(s, RULES, CM)
    again = search_pairings(s, RULES, CM, duties=search_duties(s, RULES))
    assert [p.key for p in full] == [p.key for p in again]
