import pytest

from crewpair import netgen
from crewpair.cli import main
from crewpair.rules import Airport, Schedule
from crewpair.schedule_io import write_schedule

from helpers import ORACLE_OPTIMA, RULES, flight, t


@pytest.fixture
def sched60(tmp_path):
    path = tmp_path / "s.csv"
    assert main(["gen", "--flights", "60", "--seed", "0", "-o", str(path)]) == 0
    return path


def test_gen_matches_library(sched60, tmp_path):
    write_schedule(tmp_path / "lib.csv", netgen.generate(netgen.NetSpec(seed=0), RULES))
    assert sched60.read_bytes() == (tmp_path / "lib.csv").read_bytes()


def test_gen_tier(tmp_path, capsys):
    assert main(["gen", "--tier", "tiny", "-o", str(tmp_path / "t.csv")]) == 0
    assert "wrote 16 flights" in capsys.readouterr().out


def test_gen_infeasible_spec(tmp_path):
    assert main(["gen", "--flights", "7", "-o", str(tmp_path / "x.csv")]) == 2


def test_enumerate(sched60, tmp_path, capsys):
    assert main(["enumerate", str(sched60), "--cache-dir", str(tmp_path / "cache")]) == 0
    out = capsys.readouterr().out
    assert "uncoverable flights: 0" in out and "total" in out


def test_enumerate_reports_uncoverable(tmp_path):
    s = Schedule(flights=(flight(1, "ATL", "ORD", t(0, 8), t(0, 10)),),
                 airports={"ATL": Airport("ATL"), "ORD": Airport("ORD"), "DAL": Airport("DAL", "", True)})
    write_schedule(tmp_path / "u.csv", s)
    assert main(["enumerate", str(tmp_path / "u.csv")]) == 3
    assert main(["ifs", str(tmp_path / "u.csv"), "-o", str(tmp_path / "i.txt")]) == 3


def test_oracle_prints_optimum(sched60, tmp_path, capsys):
    assert main(["oracle", str(sched60), "-o", str(tmp_path / "opt.txt")]) == 0
    out = capsys.readouterr().out
    z = float(out.split("optimum")[1])
    assert z == pytest.approx(ORACLE_OPTIMA[0], abs=1e-6)
    assert main(["report", str(sched60), str(tmp_path / "opt.txt")]) == 0
    assert f"{z:.6f}" in capsys.readouterr().out


def test_solve_twice_identical(sched60, tmp_path):
    for run in ("a", "b"):
        assert main(["solve", str(sched60), "--seed", "0", "-o", str(tmp_path / run)]) == 0
    for name in ("solution.txt", "trace.csv", "iterations.csv", "features.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "timing.csv").exists()


def test_solve_from_ifs_file(sched60, tmp_path, capsys):
    ifs = tmp_path / "ifs.txt"
    assert main(["ifs", str(sched60), "--method", "Artificial", "-o", str(ifs)]) == 0
    assert main(["solve", str(sched60), "--init", str(ifs), "-o", str(tmp_path / "out")]) == 0
    art = float(capsys.readouterr().out.split("final cost ")[1].split()[0])
    assert main(["solve", str(sched60), "-o", str(tmp_path / "out2")]) == 0
    ipd = float(capsys.readouterr().out.split("final cost ")[1].split()[0])
    assert abs(art - ipd) <= 0.02 * min(art, ipd)


def test_config_file(sched60, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[engine]\nt_max = 1\n")
    assert main(["solve", str(sched60), "--config", str(cfg), "-o", str(tmp_path / "o")]) == 0
    cfg.write_text("[engine]\nbogus = 1\n")
    assert main(["solve", str(sched60), "--config", str(cfg), "-o", str(tmp_path / "o")]) == 2


def test_malformed_schedule(tmp_path, capsys):
    (tmp_path / "bad.csv").write_text("id,origin\n")
    assert main(["enumerate", str(tmp_path / "bad.csv")]) == 2
    assert "bad.csv:1" in capsys.readouterr().err
