"""Command-line front end.

    frte <tag|run> [config-path] [key=value ...] [--out DIR] [--stride N]

Tags: ex1 ex2 ex3 table1 coeffs converge ap-gray ap-fddl, or `run` with a
config file.  Any config key can be overridden with key=value arguments.
Exit codes: 0 success, 2 config error, 3 solver non-convergence, 4 I/O
error.
"""

import argparse
import os
import sys

from .config import ConfigError, parse_config
from .csvio import profile_rows, write_csv
from .experiments import EXPERIMENT_TAGS, run_experiment
from .solver import ConvergenceError, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _parser():
    p = argparse.ArgumentParser(
        prog="frte",
        description="1-D multigroup thermal radiative transfer benchmarks")
    p.add_argument("tag", help="experiment tag (%s) or 'run'" % ", ".join(EXPERIMENT_TAGS))
    p.add_argument("args", nargs="*",
                   help="config path (for 'run') and key=value overrides")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--stride", type=int, default=None, help="snapshot stride")
    p.add_argument("--reference", action="store_true",
                   help="ex2 only: rerun with the fine reference time step (slow)")
    return p


def _split_args(items):
    config_path = None
    overrides = []
    for item in items:
        if "=" in item:
            overrides.append(item)
        elif config_path is None:
            config_path = item
        else:
            raise ConfigError(f"unexpected positional argument {item!r}")
    return config_path, overrides


def run_config_file(config_path, overrides, out_dir, stride):
    cfg = parse_config(config_path, overrides)
    if stride is not None:
        if stride < 1:
            raise ConfigError("--stride must be at least 1")
        cfg.snapshot_stride = stride
    snaps = run(cfg)
    final = snaps[-1]
    name = os.path.splitext(os.path.basename(config_path))[0]
    path = os.path.join(out_dir, f"{name}_profile_t{final.t:g}.csv")
    header, rows = profile_rows(cfg.mesh.centers, final.T, final.T_r, final.rho)
    write_csv(path, header, rows)
    return [path]


def main(argv=None):
    opts = _parser().parse_args(argv)
    try:
        config_path, overrides = _split_args(opts.args)
        if opts.tag == "run":
            if config_path is None:
                raise ConfigError("'run' requires a config file path")
            os.makedirs(opts.out, exist_ok=True)
            paths = run_config_file(config_path, overrides, opts.out, opts.stride)
        elif opts.tag in EXPERIMENT_TAGS:
            if config_path is not None:
                raise ConfigError(
                    f"tag {opts.tag!r} takes key=value overrides only, "
                    f"got config path {config_path!r}")
            paths = run_experiment(opts.tag, out_dir=opts.out, overrides=overrides,
                                   stride=opts.stride, reference=opts.reference)
        else:
            raise ConfigError(f"unknown tag {opts.tag!r}")
    except ConfigError as exc:
        print(f"frte: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"frte: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"frte: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"frte: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
