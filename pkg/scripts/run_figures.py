#!/usr/bin/env python3
"""Run figure presets and print, per curve, the empirical guarantee edge next to theory.

Usage: python scripts/run_figures.py [--trials 1000] [--out figures] [--workers 1] [fig2 fig4 ...]

Designed matrices are cached on disk under ``<out>/matrices`` so repeated runs
skip the coherence optimization.
"""

import argparse
import os
import time

from sompkit.harness import empirical_guarantee_edge, figure_preset, preset_names, run_experiment, run_norm_cdf
from sompkit.harness.experiment import MATRIX_CACHE_ENV, stderr_progress
from sompkit.harness.output import write_norm_cdf, write_results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("figures", nargs="*", default=list(preset_names()))
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    os.environ.setdefault(MATRIX_CACHE_ENV, os.path.join(args.out, "matrices"))

    for name in args.figures:
        cfg = figure_preset(name, trials=args.trials if name != "fig1" else max(args.trials, 10000),
                            base_seed=args.seed, workers=args.workers, output_dir=args.out)
        t0 = time.perf_counter()
        if cfg.kind == "norm-cdf":
            res = run_norm_cdf(cfg, stderr_progress(name))
            write_norm_cdf(res, args.out, name)
            gaps = ", ".join(f"d={d}: {g:.4f}" for d, g in res.sup_gap.items())
            print(f"{name}: sup |empirical - TW| {gaps}  ({time.perf_counter() - t0:.1f} s)")
            continue
        curves = run_experiment(cfg, stderr_progress(name))
        write_results(curves, args.out, name)
        target = 1.0 if cfg.noise == "bounded" else 1.0 - cfg.delta
        print(f"{name}: {time.perf_counter() - t0:.1f} s, target SRP {target:g}")
        for alg, c in curves.items():
            edge = empirical_guarantee_edge(c, target)
            print(f"  {alg}: empirical edge {edge}")
        for o in next(iter(curves.values())).overlays:
            print(f"  theory {o.method}: {[round(v, 4) for v in o.values]}")


if __name__ == "__main__":
    main()
