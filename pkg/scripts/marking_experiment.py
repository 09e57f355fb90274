"""Empirical check of the rounding statistics on one instance.

Solves the relaxation, then estimates three quantities by Monte Carlo
and prints them next to their analytic targets:

* per-tree-edge marking frequency vs the clamped fractional value,
* root-to-group connection rate vs the mu/(2 D) lower bound,
* mean cost of one full sampling iteration vs the L * beta * LP budget.

    python3 scripts/marking_experiment.py instance.json --depth 2 --rounds 20000
"""

import argparse
from pathlib import Path

import numpy as np

from twodst.graph import DstInstance
from twodst.io import load_instance
from twodst.lp_model import build_lp, congestion_parameter
from twodst.lp_solver import solve
from twodst.rounding import IterationSampler, RoundingConfig, gkr_round
from twodst.shallow_tree import ShallowTreeConfig, build_shallow_tree
from twodst.verify import group_flow_via_maxflow


def group_connected(tree, marked, group) -> bool:
    for node in group:
        cur, ok = node, True
        while cur != 0:
            if (cur - 1) not in marked:
                ok = False
                break
            cur = tree.parents[cur]
        if ok:
            return True
    return False


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("instance", type=Path)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--rounds", type=int, default=20_000)
    p.add_argument("--cost-trials", type=int, default=2_000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    inst = load_instance(args.instance)
    if not isinstance(inst, DstInstance):
        p.error("needs a rooted instance")
    tree = build_shallow_tree(inst, ShallowTreeConfig(depth=args.depth))
    beta = congestion_parameter(args.depth, inst.num_terminals)
    lp = solve(build_lp(inst, tree, beta))
    if lp.status != "optimal":
        print(f"relaxation not solved: {lp.status}")
        return 1
    sampler = IterationSampler(inst, tree, lp, RoundingConfig(seed=args.seed))
    print(f"lp objective {lp.objective:.6g}, beta {beta}, "
          f"{tree.num_edges} tree edges, L = {sampler.samples}")

    rng = np.random.default_rng(args.seed)
    counts = np.zeros(tree.num_edges)
    connected = {t: 0 for t in tree.groups}
    for _ in range(args.rounds):
        marked = gkr_round(tree, sampler.clamped, rng)
        for e in marked:
            counts[e] += 1
        for t, group in tree.groups.items():
            if group_connected(tree, marked, group):
                connected[t] += 1

    print(f"\nmarking frequencies over {args.rounds} rounds "
          "(support edges only):")
    print(f"{'edge':>6} {'target':>9} {'observed':>9} {'dev':>8}")
    for e in range(tree.num_edges):
        if sampler.clamped[e] <= 0:
            continue
        freq = counts[e] / args.rounds
        print(f"{e:>6} {sampler.clamped[e]:>9.4f} {freq:>9.4f} "
              f"{freq - sampler.clamped[e]:>+8.4f}")

    print("\ngroup connection rates:")
    for t in sorted(tree.groups, key=str):
        mu = group_flow_via_maxflow(tree, sampler.clamped, tree.groups[t])
        rate = connected[t] / args.rounds
        bound = mu / (2.0 * tree.depth)
        print(f"  {t}: rate {rate:.4f}, flow {mu:.4f}, lower bound {bound:.4f}")

    total = 0.0
    for _ in range(args.cost_trials):
        total += inst.graph.total_cost(sampler.sample_edges(rng))
    mean = total / args.cost_trials
    budget = sampler.samples * beta * lp.objective
    print(f"\nmean iteration cost over {args.cost_trials} trials: "
          f"{mean:.4f} (budget {budget:.4f}, ratio {mean / budget:.4f})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
