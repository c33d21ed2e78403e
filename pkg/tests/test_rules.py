
import pytest
from hypothesis import given, settings, strategies as st

from crewpair.errors import InputDefect, LegalityError
from crewpair.rules import (ConnectionKind, CostModel, RuleSet, artificial_pairing,
                            check_connection, check_duty, check_pairing, cost_pairing,
                            format_hhmm, make_duty, make_pairing)

from helpers import CM, RULES, flight, schedule, t


def test_connection_kinds():
    f1 = flight(1, "ORD", "DAL", t(0, 8), t(0, 10))
    assert check_connection(f1, flight(2, "DAL", "ORD", t(0, 10, 45), t(0, 12)), RULES) is ConnectionKind.SIT
    assert check_connection(f1, flight(2, "ORD", "DAL", t(0, 11), t(0, 13)), RULES) is ConnectionKind.NONE
    assert check_connection(f1, flight(2, "DAL", "ORD", t(1, 8), t(1, 10)), RULES) is ConnectionKind.OVERNIGHT


@pytest.mark.parametrize("gap,kind", [(29, "none"), (30, "sit"), (240, "sit"), (241, "none"),
                                      (539, "none"), (540, "overnight"), (2880, "overnight"),
                                      (2881, "none")])
def test_connection_window_edges(gap, kind):
    f1 = flight(1, "ORD", "DAL", 0, 100)
    f2 = flight(2, "DAL", "ORD", 100 + gap, 200 + gap)
    assert check_connection(f1, f2, RULES).value == kind


def test_single_flight_duty():
    d = check_duty([flight(1, "DAL", "ORD", t(0, 8), t(0, 10))], RULES)
    assert d.flying_minutes == 120
    assert d.elapsed_minutes == 120 + 45 + 30


def chain(n, block=30, gap=30):
    out, clock = [], t(0, 6)
    for i in range(n):
        o, d = ("DAL", "ORD") if i % 2 == 0 else ("ORD", "DAL")
        out.append(flight(i + 1, o, d, clock, clock + block))
        clock += block + gap
    return out


def test_too_many_flights():
    with pytest.raises(LegalityError) as e:
        check_duty(chain(7), RULES)
    assert e.value.constraint == "C_duty:max_flights"


def test_elapsed_limit_includes_pads():
    # span 655 + 45 + 30 = 730 > 720
    legs = [flight(1, "DAL", "ORD", 0, 60), flight(2, "ORD", "DAL", 240, 300),
            flight(3, "DAL", "ORD", 480, 540), flight(4, "ORD", "DAL", 600, 655)]
    with pytest.raises(LegalityError) as e:
        check_duty(legs, RULES)
    assert e.value.constraint == "C_duty:elapsed"
    # shaving 10 minutes gives exactly 720 and passes
    legs[-1] = flight(4, "ORD", "DAL", 600, 645)
    assert check_duty(legs, RULES).elapsed_minutes == 720


def test_flying_limit():
    legs = [flight(1, "DAL", "ORD", 0, 250), flight(2, "ORD", "DAL", 280, 520)]
    with pytest.raises(LegalityError) as e:
        check_duty(legs, RuleSet(max_duty_elapsed=900))
    assert e.value.constraint == "C_duty:flying"


@pytest.mark.parametrize("legs,name", [
    ([], "C_duty:empty"),
    ([flight(1, "DAL", "ORD", 0, 60), flight(2, "DAL", "ORD", 120, 180)], "C_connect"),
    ([flight(1, "DAL", "ORD", 0, 60), flight(2, "ORD", "DAL", 70, 130)], "C_sit"),
])
def test_duty_violations(legs, name):
    with pytest.raises(LegalityError) as e:
        check_duty(legs, RULES)
    assert e.value.constraint == name


def two_day():
    s = schedule([flight(1, "DAL", "ORD", t(0, 8), t(0, 10)),
                  flight(2, "ORD", "DAL", t(1, 8), t(1, 10))])
    return [check_duty([f], RULES) for f in s.flights]


def test_pairing_round_trip_one_duty():
    legs = [flight(1, "DAL", "ORD", t(0, 8), t(0, 10)), flight(2, "ORD", "DAL", t(0, 11), t(0, 13))]
    p = check_pairing([check_duty(legs, RULES)], "DAL", RULES, CM)
    assert p.key == "DAL:1_2" and p.n_overnight_rests == 0


def test_pairing_two_duties():
    p = check_pairing(two_day(), "DAL", RULES, CM)
    assert p.n_overnight_rests == 1
    assert p.tafb_minutes == t(1, 10) + 30 - (t(0, 8) - 45)


def test_pairing_short_rest():
    d1 = check_duty([flight(1, "DAL", "ORD", t(0, 8), t(0, 10))], RULES)
    d2 = check_duty([flight(2, "ORD", "DAL", t(0, 11, 40), t(0, 13))], RULES)
    with pytest.raises(LegalityError) as e:
        check_pairing([d1, d2], "DAL", RULES, CM)
    assert e.value.constraint == "C_night"


def test_overnight_in_base_city():
    # DFW shares a city with base DAL; resting there is not allowed
    legs = [flight(1, "DAL", "DFW", t(0, 8), t(0, 9)), flight(2, "DFW", "DAL", t(1, 8), t(1, 9))]
    duties = [check_duty([f], RULES) for f in legs]
    cities = {"DAL": "Dallas", "DFW": "Dallas"}
    with pytest.raises(LegalityError) as e:
        check_pairing(duties, "DAL", RULES, CM, cities)
    assert e.value.constraint == "C_other"
    relaxed = RuleSet(forbid_overnight_in_base_city=False)
    assert check_pairing(duties, "DAL", relaxed, CM, cities).n_overnight_rests == 1


def test_pairing_base_violations():
    d1, d2 = two_day()
    with pytest.raises(LegalityError) as e:
        check_pairing([d2], "DAL", RULES, CM)
    assert e.value.constraint == "C_base"
    with pytest.raises(LegalityError) as e:
        check_pairing([d1], "DAL", RULES, CM)
    assert e.value.constraint == "C_base"


def test_return_to_base_ends_pairing():
    legs = [flight(1, "DAL", "ORD", t(0, 8), t(0, 10)), flight(2, "ORD", "DAL", t(1, 8), t(1, 10)),
            flight(3, "DAL", "ORD", t(2, 8), t(2, 10)), flight(4, "ORD", "DAL", t(3, 8), t(3, 10))]
    duties = [check_duty([f], RULES) for f in legs]
    with pytest.raises(LegalityError) as e:
        check_pairing(duties, "DAL", RULES, CM)
    assert e.value.constraint == "C_base"


def test_max_duties():
    codes = ["DAL", "A", "B", "C", "D", "DAL"]
    legs = [flight(i + 1, codes[i], codes[i + 1], t(i, 8), t(i, 9)) for i in range(5)]
    with pytest.raises(LegalityError) as e:
        check_pairing([check_duty([f], RULES) for f in legs], "DAL", RULES, CM)
    assert e.value.constraint == "C_duty:max_duties"


def cost_fixture(n_duties, flying_minutes, nights_hours=20):
    duties, clock = [], t(0, 6)
    per = flying_minutes // n_duties
    codes = ["DAL"] + [f"X{i}" for i in range(1, n_duties)] + ["DAL"]
    for i in range(n_duties):
        half = per // 2
        legs = [flight(2 * i + 1, codes[i], f"M{i}", clock, clock + half),
                flight(2 * i + 2, f"M{i}", codes[i + 1], clock + half + 30, clock + per + 30)]
        duties.append(make_duty(legs, RULES))
        clock += per + nights_hours * 60
    return make_pairing(duties, "DAL", CostModel(mg_hours_per_duty=5))


def test_cost_flying_covers_guarantee():
    c = cost_fixture(1, 360).cost
    assert c.flying == pytest.approx(600) and c.excess_pay == 0


def test_cost_excess_pay():
    c = cost_fixture(2, 420).cost
    assert c.excess_pay == pytest.approx(300)


def test_cost_hotel_and_meal():
    p = cost_fixture(3, 360)
    assert p.cost.hotel == pytest.approx(240)
    assert p.cost.meal == pytest.approx(4 * p.tafb_minutes / 60)


def test_cost_crew_changes_are_soft():
    legs = [flight(1, "DAL", "ORD", t(0, 8), t(0, 10), "A"), flight(2, "ORD", "DAL", t(0, 11), t(0, 13), "B")]
    p = check_pairing([check_duty(legs, RULES)], "DAL", RULES, CM)
    assert p.n_crew_changes == 1 and p.cost.soft == 50
    assert p.cost.total == pytest.approx(p.cost.flying + p.cost.hard + 50)
    assert cost_pairing(p, CM) == p.cost


def test_artificial_pairing():
    p = artificial_pairing(flight(3, "A", "B", 0, 60), 1e6)
    assert p.artificial and p.cost.total == 1e6 and p.flights == (3,)


def test_invalid_rules_and_costs():
    with pytest.raises(InputDefect):
        RuleSet(sit_min=300)
    with pytest.raises(InputDefect):
        CostModel(hotel_per_night=-1)
    with pytest.raises(InputDefect):
        CostModel(deadhead_penalty=100).check_penalty(RULES)
    CM.check_penalty(RULES)


def test_format_hhmm():
    assert format_hhmm(61) == "01:01"
    assert format_hhmm(60.2) == "01:01"


@st.composite
def small_chains(draw):
    n = draw(st.integers(1, 7))
    clock, legs = 0, []
    for i in range(n):
        block = draw(st.integers(20, 200))
        legs.append(flight(i + 1, "DAL" if i % 2 == 0 else "ORD", "ORD" if i % 2 == 0 else "DAL",
                           clock, clock + block))
        clock += block + draw(st.integers(30, 240))
    return legs


@settings(max_examples=150, deadline=None)
@given(small_chains())
def test_duty_legality_is_prefix_closed(legs):
    """A legal duty has only legal prefixes, which lets enumeration prune."""
    try:
        check_duty(legs, RULES)
    except LegalityError:
        return
    for k in range(1, len(legs)):
        check_duty(legs[:k], RULES)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(30, 400), min_size=1, max_size=4), st.integers(0, 120))
def test_cost_monotone_in_flying(blocks, extra):
    """Lengthening one flight never lowers the pairing cost."""
    codes = ["DAL"] + [f"X{i}" for i in range(1, len(blocks))] + ["DAL"]
    def build(bl):
        clock, duties = 0, []
        for i, b in enumerate(bl):
            legs = [flight(2 * i + 1, codes[i], f"M{i}", clock, clock + b),
                    flight(2 * i + 2, f"M{i}", codes[i + 1], clock + b + 30, clock + b + 90)]
            duties.append(make_duty(legs, RULES))
            clock += 2000
        return make_pairing(duties, "DAL", CM)
    longer = list(blocks)
    longer[0] += extra
    assert build(longer).cost.total >= build(blocks).cost.total - 1e-9
