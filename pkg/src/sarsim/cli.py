"""Command-line entry point: ``sarsim {run,sweep,gen-workload,validate}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import expctl, metrics, workload
from .engine import InvariantViolation, check_report
from .engine import run as run_engine
from .metrics import PolicyPair
from .model import ConfigurationError
from .rsp import RspKind
from .scenario import ScenarioError, build_topology, default_scenario, load_scenario
from .tsp import TspKind

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _scenario(path):
    return load_scenario(path) if path else default_scenario()


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return value == "on"


def _sign(value: str) -> int:
    table = {"plus": 1, "+1": 1, "1": 1, "minus": -1, "-1": -1}
    if value not in table:
        raise argparse.ArgumentTypeError("expected plus or minus")
    return table[value]


def cmd_run(args) -> int:
    scenario = _scenario(args.scenario)
    sweep = scenario.sweep
    if args.covert_k is not None:
        sweep.covert_k = args.covert_k
    if args.pora_k is not None:
        sweep.pora_k = args.pora_k
    seed = args.seed if args.seed is not None else scenario.seeds[0]
    if args.rsp == "sars":
        pair = PolicyPair(
            args.tsp, "sars", args.pora,
            args.alpha if args.alpha is not None else sweep.alpha[0],
            args.beta if args.beta is not None else sweep.beta,
            args.beta_sign if args.beta_sign is not None else sweep.beta_sign,
        )
    else:
        if args.pora:
            raise ConfigurationError("--pora", "reserved-PU escalation is only available with --rsp sars")
        pair = PolicyPair(args.tsp, args.rsp)
    config = expctl.engine_config(scenario, pair, seed, debug=args.debug)
    report = run_engine(config)
    m = metrics.compute_tcr(report)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write_trace(out / "trace.ndjson")
    metrics.write_csv([(pair, seed, m)], out / "metrics.csv")
    groups = " ".join(f"g{g}={v:.2f}" for g, v in m.per_group_tcr.items())
    reserved = " ".join(f"{k}.{j}" for k, j in report.reserved) or "-"
    print(f"{pair.label} seed={seed} TCR={m.tcr:.2f}% ({m.n_pt}/{m.n_tasks}) {groups} reserved={reserved}")
    if args.debug:
        problems = check_report(report, m.n_tasks)
        if problems:
            raise InvariantViolation("; ".join(problems))
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _scenario(args.scenario)
    seeds = scenario.seeds
    if args.seeds is not None:
        seeds = list(range(args.base_seed, args.base_seed + args.seeds))
    results = expctl.run_sweep(scenario, seeds=seeds, workers=args.workers, keep_traces=args.traces, debug=args.debug)
    if args.debug:
        bad = [(r.pair.label, r.seed, v) for r in results for v in (r.violations or [])]
        if bad:
            raise InvariantViolation(f"{len(bad)} invariant violations, first: {bad[0]}")
    paths = expctl.write_outputs(results, Path(args.out), traces=args.traces)
    sys.stdout.write(paths["summary"].read_text())
    return EXIT_OK


def cmd_gen_workload(args) -> int:
    scenario = _scenario(args.scenario)
    tasks = workload.generate(scenario.workload_plan(args.seed))
    workload.write_csv(tasks, args.out)
    print(f"wrote {len(tasks)} tasks to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    for seed in scenario.seeds[:1]:
        build_topology(scenario.topology, seed)
    print(f"{args.scenario}: ok ({len(expctl.cells(scenario))} cells x {len(scenario.seeds)} seeds)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sarsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one simulation run")
    p.add_argument("--scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--tsp", choices=[k.value for k in TspKind], default="edf")
    p.add_argument("--rsp", choices=[k.value for k in RspKind], default="sars")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--beta-sign", type=_sign)
    p.add_argument("--pora", type=_on_off, default=False)
    p.add_argument("--pora-k", type=int)
    p.add_argument("--covert-k", type=float)
    p.add_argument("--debug", action="store_true", help="check invariants every tick")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="all policy cells over many seeds")
    p.add_argument("--scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--seeds", type=int, help="number of consecutive seeds")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--workers", type=int, help=f"default: ${expctl.WORKERS_ENV} or CPU count")
    p.add_argument("--traces", action="store_true", help="also write per-run traces")
    p.add_argument("--debug", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen-workload", help="export a generated task set as CSV")
    p.add_argument("--scenario")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_workload)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, ConfigurationError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantViolation, expctl.CellFailure, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
