"""Command-line entry point: ``sompkit <subcommand>`` or ``python -m sompkit``.

Exit codes: 0 success, 1 invalid input (bad flags, config or parameters),
2 runtime failure (I/O, numerical breakdown).
"""

import argparse
import configparser
import csv
import io
import math
import sys

import numpy as np

from .. import bounds as B
from ..coherence import mutual_coherence
from ..dictionary import DesignParams, MeasurementMatrix, design_low_coherence, load_matrix, save_matrix
from ..errors import ConfigError, DomainError
from ..tracywidom import load_table
from .config import ExperimentConfig, config_to_text, load_config
from .experiment import experiment_matrix, run_experiment, run_norm_cdf, stderr_progress
from .output import write_norm_cdf, write_results
from .presets import figure_preset, preset_names


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _report(rep, out):
    i, j = rep.argmax_pair
    print(f"mu                {rep.mu:.10f}", file=out)
    print(f"welch_lower_bound {rep.welch_lower_bound:.10f}", file=out)
    print(f"argmax_pair       {i} {j}", file=out)
    print(f"gram_offdiag_max  {rep.gram_offdiag_max_abs:.10f}", file=out)


def cmd_coherence(args, out):
    if args.design:
        m, n = args.design
        mm = design_low_coherence(m, n, seed=args.seed)
    elif args.matrix:
        mm = MeasurementMatrix.from_array(load_matrix(args.matrix))
    else:
        raise UsageError("coherence: give a matrix file or --design M N")
    _report(mm.coherence, out)
    return 0


def cmd_design(args, out):
    params = DesignParams(
        iters=args.iters if args.iters is not None else DesignParams.iters,
        gamma=args.gamma if args.gamma is not None else DesignParams.gamma,
    )
    if not 0 < params.gamma < 1:
        raise DomainError("gamma must lie in (0, 1)")
    mm = design_low_coherence(args.M, args.N, params=params, seed=args.seed)
    path = args.output or f"designed_{args.M}x{args.N}_seed{args.seed}.txt"
    save_matrix(mm, path)
    print(f"wrote {path}", file=out)
    _report(mm.coherence, out)
    return 0


_BOUNDS_KEYS = {"l": int, "mu": float, "m": int, "n": int, "d": int, "c_min": float, "sigma": float,
                "epsilon": float, "delta": float, "c_m": float, "matrix": str, "seed": int}


def read_bounds_config(path):
    """``[bounds]`` section: L, mu, M, N, d, c_min, sigma, epsilon, delta, c_m.

    Instead of mu, ``matrix`` may name a matrix file, ``designed`` or ``gaussian``
    (with M, N and optional seed) and mu is computed from it.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if cp.sections() != ["bounds"]:
        raise ConfigError("bounds config must contain exactly one [bounds] section")
    vals = {}
    for key, raw in cp.items("bounds"):
        if key not in _BOUNDS_KEYS:
            raise ConfigError(f"unknown key {key!r} in [bounds]")
        text = raw.strip()
        if text:
            conv = _BOUNDS_KEYS[key]
            try:
                vals[key] = int(float(text)) if conv is int else conv(text)
            except ValueError as exc:
                raise ConfigError(f"[bounds] {key} = {raw!r}: {exc}") from exc
    if "l" not in vals:
        raise ConfigError("[bounds] needs L")
    if "mu" not in vals:
        if "matrix" not in vals:
            raise ConfigError("[bounds] needs mu or matrix")
        src = vals["matrix"]
        if src in ("designed", "gaussian"):
            if "m" not in vals or "n" not in vals:
                raise ConfigError(f"matrix = {src} needs M and N")
            cfg = ExperimentConfig(matrix=src, M=vals["m"], N=vals["n"], matrix_seed=vals.get("seed", 0))
            vals["mu"] = experiment_matrix(cfg).mu
        else:
            try:
                a = load_matrix(src)
            except OSError as exc:
                raise ConfigError(f"cannot read matrix file {src}: {exc.strerror}") from exc
            vals["mu"] = mutual_coherence(a).mu
            vals.setdefault("m", a.shape[0])
            vals.setdefault("n", a.shape[1])
    return B.GuaranteeInputs(
        L=vals["l"], mu=vals["mu"], M=vals.get("m"), N=vals.get("n"), d=vals.get("d"),
        c_min=vals.get("c_min"), sigma=vals.get("sigma"), epsilon=vals.get("epsilon"),
        delta=vals.get("delta", 1e-3), c_m=vals.get("c_m"),
    )


def cmd_bounds(args, out):
    g = read_bounds_config(args.config)
    rows = B.guarantee_table(g)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "value", "note"])
        for label, value, note in rows:
            w.writerow([label, "nan" if math.isnan(value) else format(value, ".17g"), note])
        out.write(buf.getvalue())
        return 0
    print(f"inputs: L={g.L} mu={g.mu:.6g} M={g.M} N={g.N} d={g.d} c_min={g.c_min} "
          f"sigma={g.sigma} epsilon={g.epsilon} delta={g.delta} c_m={g.c_m}", file=out)
    width = max(len(r[0]) for r in rows)
    for label, value, note in rows:
        shown = "n/a" if math.isnan(value) else f"{value:.6g}"
        print(f"{label:<{width}}  {shown:>12}" + (f"  ({note})" if note else ""), file=out)
    if g.sigma is not None:
        print(f"note: {B.GAUSSIAN_CAVEAT}", file=out)
    return 0


def _resolve_run_config(args):
    overrides = dict(trials=args.trials, base_seed=args.seed, output_dir=args.output_dir, workers=args.workers)
    if args.figure:
        try:
            cfg = figure_preset(args.figure, **overrides)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from exc
    elif args.config:
        cfg = load_config(args.config)
        cfg = cfg.replace(**{k: v for k, v in overrides.items() if v is not None})
    else:
        raise UsageError("run: give --config FILE or --figure NAME")
    return cfg


def cmd_run(args, out):
    cfg = _resolve_run_config(args)
    if args.print_config:
        out.write(config_to_text(cfg))
        return 0
    progress = None if args.quiet else stderr_progress(cfg.name)
    if cfg.kind == "norm-cdf":
        files = write_norm_cdf(run_norm_cdf(cfg, progress), cfg.output_dir, cfg.name)
    else:
        files = write_results(run_experiment(cfg, progress), cfg.output_dir, cfg.name)
    for f in files:
        print(f"wrote {f}", file=out)
    return 0


def cmd_tw_table(args, out):
    t = load_table()
    out.write(t.to_csv())
    return 0


def build_parser():
    p = _Parser(prog="sompkit", description="SOMP support recovery: algorithms, guarantees, experiments")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("coherence", help="print the mutual coherence report of a matrix")
    c.add_argument("matrix", nargs="?", help="matrix file ('M N' header, then rows)")
    c.add_argument("--design", nargs=2, type=int, metavar=("M", "N"), help="design a matrix instead of reading one")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_coherence)

    d = sub.add_parser("design", help="design a low-coherence matrix and write it to a file")
    d.add_argument("M", type=int)
    d.add_argument("N", type=int)
    d.add_argument("--iters", type=int, help="shrinkage iterations")
    d.add_argument("--gamma", type=float, help="shrinkage factor in (0, 1)")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--output", "-o", help="output path")
    d.set_defaults(func=cmd_design)

    b = sub.add_parser("bounds", help="print every applicable threshold and SRP bound")
    b.add_argument("--config", required=True, help="INI file with a [bounds] section")
    b.add_argument("--csv", action="store_true", help="print CSV instead of a text table")
    b.set_defaults(func=cmd_bounds)

    r = sub.add_parser("run", help="run an experiment and write CSV + SVG")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--config", help="experiment INI file")
    src.add_argument("--figure", help=f"figure preset: {', '.join(preset_names())}")
    r.add_argument("--trials", type=int)
    r.add_argument("--seed", type=int, help="base seed")
    r.add_argument("--output-dir")
    r.add_argument("--workers", type=int)
    r.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    r.add_argument("--quiet", action="store_true", help="no progress line")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("tw-table", help="dump the embedded Tracy-Widom F1 table as CSV")
    t.set_defaults(func=cmd_tw_table)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(out)
            return 1
        return args.func(args, out)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return 1
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
