"""Grid search for the suitability weights on held-out tuning seeds.

The tuning seeds must not overlap the evaluation seeds (0..29 by default).
For every classical queue ordering the script prints the SARS mean TCR for
each (alpha, sign) pair next to the best baseline placement policy.
"""

import argparse
import itertools
from collections import defaultdict

from sarsim import expctl
from sarsim.metrics import PolicyPair, mean_sd
from sarsim.scenario import default_scenario
from sarsim.tsp import CLASSICAL

BASELINES = ("shortest", "random", "latest")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--base-seed", type=int, default=1000)
    p.add_argument("--alpha", type=float, nargs="+", default=[0.25, 0.5, 0.75, 1.0])
    p.add_argument("--sign", type=int, nargs="+", default=[1, -1])
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--pora", action="store_true", help="tune with reserved PUs enabled")
    p.add_argument("--workers", type=int, default=None)
    args = p.parse_args(argv)

    scenario = default_scenario()
    seeds = range(args.base_seed, args.base_seed + args.seeds)
    tsps = [k.value for k in CLASSICAL]
    pairs = [PolicyPair(t, b) for t in tsps for b in BASELINES]
    grid = list(itertools.product(args.alpha, args.sign))
    pairs += [PolicyPair(t, "sars", args.pora, a, args.beta, s) for t in tsps for a, s in grid]
    results = expctl.run_sweep(scenario, seeds, pairs, workers=args.workers)

    tcr = defaultdict(list)
    for r in results:
        tcr[r.pair].append(r.metrics.tcr)
    mean = {pair: mean_sd(v)[0] for pair, v in tcr.items()}

    margins = defaultdict(list)
    print(f"{'tsp':<8} {'best baseline':>16} " + " ".join(f"a={a:g},s={s:+d}".rjust(12) for a, s in grid))
    for t in tsps:
        best = max(BASELINES, key=lambda b: mean[PolicyPair(t, b)])
        ref = mean[PolicyPair(t, best)]
        cols = []
        for a, s in grid:
            m = mean[PolicyPair(t, "sars", args.pora, a, args.beta, s)]
            margins[(a, s)].append(m - ref)
            cols.append(f"{m:6.2f}({m - ref:+.2f})")
        print(f"{t:<8} {best + f' {ref:6.2f}':>16} " + " ".join(c.rjust(12) for c in cols))
    print("mean margin vs best baseline:")
    for (a, s), v in sorted(margins.items(), key=lambda kv: -sum(kv[1])):
        print(f"  alpha={a:g} sign={s:+d}: {sum(v) / len(v):+.3f} (worst {min(v):+.3f})")


if __name__ == "__main__":
    main()
