import pytest

from crewpair.errors import InfeasibleError, InputDefect
from crewpair.ifs import IfsConfig, artificial_pairings, initial_solution, ipdch, k_range
from crewpair.lp import ColumnPool, solve_primal
from crewpair.mip import count_deadheads, ip_objective
from crewpair.oracle import solve_covering_exact
from crewpair.pairgen import build_duty_network, enumerate_pairings

from helpers import CM, ORACLE_OPTIMA, PSI, RULES, flight, instance, round_trip, schedule, t


def test_round_trip():
    net = build_duty_network(round_trip(), RULES)
    res = ipdch(net, CM, IfsConfig())
    assert [p.key for p in res.pairings] == ["DAL:1_2"]


def test_k_range():
    assert k_range(3200, IfsConfig()) == (400, 800)
    assert k_range(3, IfsConfig()) == (1, 1)


def test_config_validation():
    with pytest.raises(InputDefect):
        IfsConfig(method="Greedy")
    with pytest.raises(InputDefect):
        IfsConfig(k_lo_frac=0.5, k_hi_frac=0.25)


@pytest.mark.parametrize("seed", range(3))
def test_full_coverage_and_oracle_bound(seed):
    s, net = instance(seed)
    res = ipdch(net, CM, IfsConfig(seed=seed))
    rows = [f.id for f in s.flights]
    count_deadheads(res.pairings, rows)
    z = ip_objective(ColumnPool(res.pairings, rows), range(len(res.pairings)), PSI)
    assert z >= ORACLE_OPTIMA[seed] - 1e-6


def test_deterministic():
    _, net = instance(0)
    a = ipdch(net, CM, IfsConfig(seed=4))
    b = ipdch(net, CM, IfsConfig(seed=4))
    assert [p.key for p in a.pairings] == [p.key for p in b.pairings]
    assert a.iterations == b.iterations


def test_sub_ips_are_exact():
    _, net = instance(1)
    res = ipdch(net, CM, IfsConfig(seed=1), keep_subproblems=True)
    assert res.subproblems
    for sub, mip in res.subproblems:
        ref = solve_covering_exact(sub.columns, sub.rows, PSI, costs=sub.costs)
        assert mip.objective == pytest.approx(ref.objective, abs=1e-6)


def test_uncoverable_flight_is_reported():
    s = schedule([flight(1, "DAL", "ORD", t(0, 8), t(0, 10)),
                  flight(2, "ORD", "DAL", t(0, 11), t(0, 13)),
                  flight(3, "ATL", "MSP", t(0, 8), t(0, 10))])
    with pytest.raises(InfeasibleError) as e:
        ipdch(build_duty_network(s, RULES), CM, IfsConfig())
    assert list(e.value.flights) == [3]


def test_artificial_pairings():
    s, net = instance(0)
    five = artificial_pairings(s.flights[:5], IfsConfig())
    assert len(five) == 5 and sum(p.cost.total for p in five) == pytest.approx(5e6)
    assert artificial_pairings([], IfsConfig()) == []
    assert initial_solution(net, CM, IfsConfig(method="Artificial"))[0].artificial


def test_artificials_leave_the_lp_once_real_columns_exist():
    s, net = instance(0)
    rows = [f.id for f in s.flights]
    cols = artificial_pairings(s.flights, IfsConfig()) + enumerate_pairings(net, CM)
    prim = solve_primal(ColumnPool(cols, rows), PSI)
    for p, x in zip(cols, prim.x):
        if p.artificial:
            assert x < 1e-6
