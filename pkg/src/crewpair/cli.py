"""Command-line entry point: ``crewpair {gen,enumerate,ifs,solve,report,oracle}``.

Exit codes: 0 success, 2 input defect, 3 infeasibility.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import netgen, oracle, report
from .config import Config, load_config
from .engine import run
from .errors import CapacityError, InfeasibleError, InputDefect, NoProgress
from .ifs import artificial_pairings, ipdch
from .pairgen import count_pairings, load_or_build, uncoverable_flights
from .schedule_io import read_schedule, write_schedule

log = logging.getLogger("crewpair")

EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
TIERS = {"tiny": netgen.TINY, "small": netgen.SMALL, "medium": netgen.MEDIUM}


def _config(args) -> Config:
    cfg = load_config(args.config)
    return cfg.with_seed(args.seed) if args.seed is not None else cfg


def _network(args, cfg, schedule):
    return load_or_build(schedule, cfg.rules, args.cache_dir, threads=args.threads)


def cmd_gen(args) -> int:
    spec = TIERS[args.tier] if args.tier else netgen.NetSpec()
    overrides = {k: v for k, v in (("n_flights", args.flights), ("n_airports", args.airports),
                                   ("n_hubs", args.hubs), ("n_crew_bases", args.bases),
                                   ("n_days", args.days), ("n_tails", args.tails),
                                   ("seed", args.seed)) if v is not None}
    spec = dataclasses.replace(spec, **overrides)
    schedule = netgen.generate(spec, _config(args).rules)
    write_schedule(args.output, schedule)
    print(f"wrote {len(schedule)} flights, bases {','.join(schedule.crew_bases)} to {args.output}")
    return 0


def cmd_enumerate(args) -> int:
    cfg = _config(args)
    schedule = read_schedule(args.schedule)
    net = _network(args, cfg, schedule)
    total = 0
    print(f"{'base':<8}{'duties':>10}{'edges':>10}{'pairings':>12}")
    for base, bn in sorted(net.bases.items()):
        sub = count_pairings(dataclasses.replace(net, bases={base: bn}), threads=args.threads)
        total += sub
        print(f"{base:<8}{len(bn.duties):>10}{bn.n_edges:>10}{sub:>12}")
    print(f"{'total':<8}{'':>10}{'':>10}{total:>12}")
    bad = uncoverable_flights(net)
    print(f"uncoverable flights: {len(bad)}" + (f" {bad[:20]}" if bad else ""))
    return EXIT_INFEASIBLE if bad else 0


def _initial(args, cfg, net):
    method = args.method or cfg.ifs.method
    if method == "Artificial":
        return artificial_pairings(net.schedule.flights, cfg.ifs)
    return ipdch(net, cfg.cost, cfg.ifs).pairings


def cmd_ifs(args) -> int:
    cfg = _config(args)
    schedule = read_schedule(args.schedule)
    net = _network(args, cfg, schedule)
    pairings = _initial(args, cfg, net)
    report.write_pairings(args.output, pairings)
    feats = report.features(pairings, [f.id for f in schedule.flights])
    print(f"{len(pairings)} pairings, cost {feats.objective(cfg.cost.deadhead_penalty):.2f}, "
          f"{feats.n_deadheads} deadheads -> {args.output}")
    return 0


def cmd_solve(args) -> int:
    cfg = _config(args)
    schedule = read_schedule(args.schedule)
    net = _network(args, cfg, schedule)
    if args.init:
        p_init = report.read_pairings(args.init, schedule, cfg.rules, cfg.cost)
    else:
        p_init = _initial(args, cfg, net)
    result = run(net, p_init, cfg.engine, cfg.cg, cfg.cost, threads=args.threads)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.write_pairings(out / "solution.txt", result.pairings)
    (out / "trace.csv").write_text(result.trace.phase_csv())
    (out / "iterations.csv").write_text(result.trace.iteration_csv())
    (out / "timing.csv").write_text(result.trace.timing_csv())
    feats = report.features(result.pairings, [f.id for f in schedule.flights])
    (out / "features.txt").write_text(feats.to_text() + "\n")
    print(result.trace.table())
    print(f"final cost {result.objective:.2f} (interaction {result.best_T}); files in {out}")
    return 0


def cmd_report(args) -> int:
    cfg = _config(args)
    schedule = read_schedule(args.schedule)
    pairings = report.read_pairings(args.solution, schedule, cfg.rules, cfg.cost)
    feats = report.features(pairings, [f.id for f in schedule.flights])
    print(feats.to_text())
    print(f"objective with deadhead penalty: {feats.objective(cfg.cost.deadhead_penalty):.6f}")
    return 0


def cmd_oracle(args) -> int:
    cfg = _config(args)
    schedule = read_schedule(args.schedule)
    res = oracle.exact_optimum(schedule, cfg.rules, cfg.cost)
    if args.output:
        report.write_pairings(args.output, res.pairings)
    print(f"candidates {res.n_candidates}")
    print(f"optimum {res.objective!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--seed", type=int, help="overrides every seed in the config")
    common.add_argument("--threads", type=int, default=1, help="worker processes for enumeration")
    common.add_argument("--cache-dir", help="directory for cached duty networks")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="crewpair", description="Airline crew pairing optimizer")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a synthetic schedule")
    g.add_argument("--tier", choices=sorted(TIERS))
    g.add_argument("--flights", type=int)
    g.add_argument("--airports", type=int)
    g.add_argument("--hubs", type=int)
    g.add_argument("--bases", type=int)
    g.add_argument("--days", type=int)
    g.add_argument("--tails", type=int)
    g.add_argument("-o", "--output", default="schedule.csv")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("enumerate", parents=[common], help="count duties and pairings per base")
    e.add_argument("schedule")
    e.set_defaults(func=cmd_enumerate)

    i = sub.add_parser("ifs", parents=[common], help="build an initial feasible solution")
    i.add_argument("schedule")
    i.add_argument("--method", choices=["IPDCH", "Artificial"])
    i.add_argument("-o", "--output", default="ifs.txt")
    i.set_defaults(func=cmd_ifs)

    s = sub.add_parser("solve", parents=[common], help="run the optimization engine")
    s.add_argument("schedule")
    s.add_argument("--init", help="initial pairing-set file (default: build one)")
    s.add_argument("--method", choices=["IPDCH", "Artificial"])
    s.add_argument("-o", "--output-dir", default="solution")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("report", parents=[common], help="feature panel of a solution file")
    r.add_argument("schedule")
    r.add_argument("solution")
    r.set_defaults(func=cmd_report)

    o = sub.add_parser("oracle", parents=[common], help="exact optimum of a small schedule")
    o.add_argument("schedule")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InfeasibleError, NoProgress) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputDefect, CapacityError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
