"""Run the three comparison experiments and print their tables.

  placement   every classical queue ordering x every placement policy
  standby     COVERT ordering: SARS with standby PUs vs the baselines
  priority    ERA / PQM orderings with their original placement vs SARS

Each experiment writes metrics.csv and summary.txt under --out/<name>/.
"""

import argparse
import logging
from collections import defaultdict
from pathlib import Path

from sarsim import expctl
from sarsim.metrics import PolicyPair, mean_sd, paired_comparison
from sarsim.scenario import default_scenario, load_scenario

CLASSICAL = ["fcfs", "edf", "edd", "efdf", "cr", "covert"]
BASELINES = ["shortest", "random", "latest"]


def experiment_pairs(alpha, beta, sign):
    def sars(tsp, pora=False):
        return PolicyPair(tsp, "sars", pora, alpha, beta, sign)

    return {
        "placement": [PolicyPair(t, b) for t in CLASSICAL for b in BASELINES] + [sars(t) for t in CLASSICAL],
        "standby": [PolicyPair("covert", b) for b in BASELINES] + [sars("covert"), sars("covert", True)],
        "priority": [PolicyPair(t, "shortest") for t in ("era", "pqm")] + [sars(t) for t in ("era", "pqm")],
    }, sars


def main(argv=None):
    p = argparse.ArgumentParser(description="placement policy comparison experiments")
    p.add_argument("--scenario", type=Path, help="scenario JSON (defaults to the reference setup)")
    p.add_argument("--seeds", type=int, default=30)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--beta-sign", type=int, choices=[1, -1], default=1)
    p.add_argument("--only", choices=["placement", "standby", "priority"], nargs="+")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", type=Path, default=Path("results"))
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    scenario = load_scenario(args.scenario) if args.scenario else default_scenario()
    seeds = list(range(args.base_seed, args.base_seed + args.seeds))
    experiments, sars = experiment_pairs(args.alpha, args.beta, args.beta_sign)
    print(f"SARS weights: alpha={args.alpha} beta={args.beta} sign={args.beta_sign:+d}; {len(seeds)} seeds")

    for name, pairs in experiments.items():
        if args.only and name not in args.only:
            continue
        results = expctl.run_sweep(scenario, seeds, pairs, workers=args.workers)
        expctl.write_outputs(results, args.out / name)
        tcr = defaultdict(list)
        for r in results:
            tcr[r.pair].append(r.metrics.tcr)
        print(f"\n== {name} ==")
        for pair in pairs:
            m, sd = mean_sd(tcr[pair])
            print(f"  {pair.label:<30} {m:7.3f} +/- {sd:.3f}")
        if name == "placement":
            for t in CLASSICAL:
                best = max(BASELINES, key=lambda b: mean_sd(tcr[PolicyPair(t, b)])[0])
                c = paired_comparison(tcr[sars(t)], tcr[PolicyPair(t, best)])
                print(f"  {t}: SARS - {best} = {c.mean_diff:+.3f} pp (one-sided p={c.p_value:.4f})")
        elif name == "standby":
            for b in ("latest", "shortest"):
                c = paired_comparison(tcr[sars("covert", True)], tcr[PolicyPair("covert", b)])
                print(f"  SARS+PORA - {b} = {c.mean_diff:+.3f} pp (one-sided p={c.p_value:.4f})")
        else:
            for t in ("era", "pqm"):
                c = paired_comparison(tcr[sars(t)], tcr[PolicyPair(t, "shortest")])
                print(f"  {t}: SARS - shortest = {c.mean_diff:+.3f} pp (one-sided p={c.p_value:.4f})")


if __name__ == "__main__":
    main()
