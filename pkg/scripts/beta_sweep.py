"""Sweep the congestion multiplier and record its effect on one instance.

Larger beta loosens the relaxation (lower objective, weaker lower
bound) but raises the per-edge sample count L, so rounding gets more
chances per iteration. The sweep solves and rounds once per multiplier
and prints a CSV-ish table for eyeballing the tradeoff.

    python3 scripts/beta_sweep.py instance.json --mults 0.5 1 2 4
"""

import argparse
from pathlib import Path

from twodst.graph import DstInstance
from twodst.io import load_instance
from twodst.pipeline import PipelineConfig, run_pipeline


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("instance", type=Path)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mults", type=float, nargs="+", default=(0.5, 1.0, 2.0, 4.0))
    args = p.parse_args(argv)

    inst = load_instance(args.instance)
    if not isinstance(inst, DstInstance):
        p.error("needs a rooted instance")

    print("mult,beta,lp,cost,ratio,feasible,samples,iterations,seconds")
    for mult in args.mults:
        config = PipelineConfig(depth=args.depth, seed=args.seed, beta_multiplier=mult)
        try:
            r = run_pipeline(inst, config)
        except Exception as exc:
            print(f"{mult:g},,,,,error: {type(exc).__name__}: {exc},,,")
            continue
        ratio = "" if r.ratio_vs_lp is None else f"{r.ratio_vs_lp:.4f}"
        total = sum(r.timings.values())
        print(
            f"{mult:g},{r.beta},{r.lp_objective:.6g},{r.solution.cost:.6g},"
            f"{ratio},{'yes' if r.feasible else 'no'},"
            f"{r.solution.meta['samples']},{r.solution.meta['iterations']},"
            f"{total:.3f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
