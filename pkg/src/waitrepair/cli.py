"""Command line: gen, plan, validate, bench, summary."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .grid import load_map
from .instances import Instance, generate_wfi_instance, read_agents, read_cells, write_agents
from .repair import PlanningError, RepairConfig, RepairError

log = logging.getLogger("waitrepair")


def _range(text: str) -> list:
    """``50:250:50`` -> [50, 100, 150, 200, 250]; a plain ``N`` or ``a,b,c`` also works."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        lo, hi, step = parts
        return list(range(lo, hi + 1, step))
    return [int(p) for p in text.split(",")]


def cmd_gen(args) -> int:
    m = load_map(args.map)
    pool = read_cells(args.endpoint_pool) if args.endpoint_pool else None
    inst = generate_wfi_instance(m, args.num_agents, args.seed, pool)
    write_agents(inst.agents, args.out)
    log.info("wrote %d agents to %s", len(inst.agents), args.out)
    return 0


def cmd_plan(args) -> int:
    inst = Instance(load_map(args.map), read_agents(Path(args.agents)))
    cfg = RepairConfig(delta=args.delta, radius=args.radius, speed=args.speed)
    try:
        sol = bench.solve(inst, args.algo, cfg)
    except (PlanningError, RepairError) as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return 2
    bench.save_solution(sol, args.out)
    print(f"{args.algo}: {len(inst.agents)} agents, runtime {sol.runtime * 1000:.1f} ms, "
          f"flowtime {sol.flowtime:.4f}, makespan {sol.makespan:.4f}")
    return 0


def cmd_validate(args) -> int:
    inst = Instance(load_map(args.map), read_agents(Path(args.agents)))
    sol = bench.load_solution(args.solution)
    report = bench.validate_solution(inst, sol, 2 * args.radius, args.speed)
    print(report.summary())
    return 0 if report.ok else 1


def cmd_bench(args) -> int:
    pool = read_cells(args.endpoint_pool) if args.endpoint_pool else None
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    try:
        rows = bench.run_benchmark(
            args.map, algos, _range(args.agents_range), args.instances, args.seed,
            args.delta, args.radius, args.speed, pool, args.csv, args.workers,
        )
    except bench.ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 3
    for rec in bench.summarize(rows):
        med = rec["median_runtime_ms"]
        print(f"{rec['algorithm']:>10} n={rec['n_agents']:<4} success={rec['success_rate']:.2f} "
              f"median_ms={'-' if med is None else f'{med:.1f}'}")
    return 0


def cmd_summary(args) -> int:
    text = bench.summary_csv(bench.summarize(bench.read_metrics_csv(args.csv)))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="waitrepair", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def planning_opts(sp):
        sp.add_argument("--delta", type=float, default=0.1, help="wait quantum")
        sp.add_argument("--radius", type=float, default=0.5, help="agent radius")
        sp.add_argument("--speed", type=float, default=1.0)

    g = sub.add_parser("gen", help="generate a well-formed instance")
    g.add_argument("--map", required=True)
    g.add_argument("--num-agents", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--endpoint-pool", help="CSV of x,y cells endpoints are drawn from")
    g.set_defaults(func=cmd_gen)

    pl = sub.add_parser("plan", help="solve an instance")
    pl.add_argument("--map", required=True)
    pl.add_argument("--agents", required=True)
    pl.add_argument("--algo", choices=bench.ALGORITHMS, default="c-repair")
    planning_opts(pl)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plan)

    v = sub.add_parser("validate", help="check a solution for collisions")
    v.add_argument("--map", required=True)
    v.add_argument("--agents", required=True)
    v.add_argument("--solution", required=True)
    v.add_argument("--radius", type=float, default=0.5)
    v.add_argument("--speed", type=float, default=None, help="speed bound (default: per-trajectory speed)")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="run a benchmark sweep")
    b.add_argument("--map", required=True)
    b.add_argument("--algos", default="c-repair,c-sipp")
    b.add_argument("--agents-range", default="50:250:50")
    b.add_argument("--instances", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv", required=True)
    b.add_argument("--endpoint-pool")
    b.add_argument("--workers", type=int, default=1)
    planning_opts(b)
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("summary", help="per-n means of a benchmark CSV")
    s.add_argument("--csv", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_summary)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
