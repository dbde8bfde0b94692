"""Command-line interface: window solver, figure emission, verification.

Exit codes: 0 success, 1 gate/numerical failure, 2 configuration error.
Diagnostics go to stderr; results to stdout.
"""

from __future__ import annotations

import argparse
import sys

from .caldeira_leggett import QuadratureError
from .config import ConfigError, load_config_file, resolve_config
from .figures import generate_figure
from .params import ParameterError
from .schrodinger import DomainError
from .verify import run_suite
from .windows import overlap_window


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--framework", choices=["schrodinger", "cl", "both"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--temperature", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--separation", type=float)
    p.add_argument("--sigma0", type=float)
    p.add_argument("--kick", type=float)
    p.add_argument("--gravity", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument(
        "--x0-offset", type=float, action="append", dest="x0_offset",
        help="trajectory start offset in units of sigma0; repeatable",
    )
    p.add_argument("--out")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--support-factor", type=float, dest="support_factor")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="modvar",
        description="Modular-variable observables for superposed wave packets "
        "under gravity, with and without environmental friction/diffusion.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    w = sub.add_parser("window", help="latest time the packet supports stay disjoint")
    _add_common_flags(w)

    f = sub.add_parser("figure", help="emit CSV data for a standard figure")
    f.add_argument("name", choices=["fig1", "fig2", "fig3", "fig4"])
    _add_common_flags(f)

    v = sub.add_parser("verify", help="run the oracle verification gates")
    v.add_argument("--suite", choices=["fast", "full"], default="fast")
    return p


def _flag_updates(args) -> dict:
    flags = {}
    if args.framework is not None:
        flags["framework"] = args.framework
    for attr, field_name in (
        ("gamma", "gamma"),
        ("separation", "separation"),
        ("sigma0", "sigma0"),
        ("kick", "kick"),
        ("gravity", "gravity"),
        ("tmax", "tmax"),
        ("samples", "samples"),
        ("out", "out"),
        ("support_factor", "support_factor"),
    ):
        value = getattr(args, attr)
        if value is not None:
            flags[field_name] = value
    if args.temperature is not None:
        flags["temperatures"] = (args.temperature,)
    if args.alpha is not None:
        flags["alphas"] = (args.alpha,)
    if args.x0_offset:
        flags["x0_offsets"] = tuple(args.x0_offset)
    return flags


def _resolved(args, figure=None):
    file_updates = load_config_file(args.config) if args.config else {}
    return resolve_config(figure, file_updates, _flag_updates(args))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "window":
            cfg = _resolved(args)
            if cfg.framework not in ("schrodinger", "cl"):
                raise ConfigError("window needs --framework schrodinger or cl")
            spec = cfg.superposition(cfg.alphas[0])
            bath = cfg.bath() if cfg.framework == "cl" else None
            win = overlap_window(
                cfg.framework, spec, bath, cfg.constants(), cfg.support_factor
            )
            print("t_max = %.6f" % win.t_max)
            print("criterion: %s" % win.criterion)
            return 0
        if args.command == "figure":
            cfg = _resolved(args, figure=args.name)
            for path in generate_figure(args.name, cfg):
                print(path)
            return 0
        if args.command == "verify":
            return run_suite(args.suite)
        raise ConfigError("unknown command %r" % (args.command,))
    except (ConfigError, ParameterError) as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 2
    except (DomainError, QuadratureError, FloatingPointError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
