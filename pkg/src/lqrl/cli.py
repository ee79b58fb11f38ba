"""Command-line front-end: ``lqrl {train,simulate,analyze,compare}``.

Exit codes: 0 success, 2 configuration error, 3 numeric divergence,
4 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import config as config_mod
from . import experiment, logio
from .errors import ConfigError, DivergenceError

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("lqrl")


def _load(args) -> config_mod.ExperimentConfig:
    cfg = config_mod.load_config(args.config) if args.config else config_mod.from_dict({})
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def cmd_train(args) -> int:
    cfg = _load(args)
    agent = experiment.run_train(cfg, args.out, args.history)
    print(f"trained {agent.episodes} episodes (seed {agent.seed}); final J = {agent.final_objective:.6g}")
    print(f"agent written to {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args)
    agent = logio.load_agent(args.agent)
    out_dir = args.out_dir or cfg.out_dir
    try:
        res = experiment.run_simulate(cfg, agent, out_dir)
    except DivergenceError as exc:
        print(f"simulation diverged at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    _print_metrics(res.metrics)
    print(f"outputs written to {out_dir}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    m = experiment.run_analyze(args.log, args.out_dir)
    _print_metrics(m)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _load(args)
    agent = None
    if args.agent:
        if Path(args.agent).exists():
            agent = logio.load_agent(args.agent)
        else:
            log.warning("agent file %s not found, LQRL row omitted", args.agent)
    _, text = experiment.run_compare(cfg, agent, args.out_dir or cfg.out_dir)
    print(text, end="")
    return EXIT_OK


def _print_metrics(m) -> None:
    print(f"RMSE of spacing error   {m.rmse_z:.6g} m")
    print(f"mean control effort     {m.mean_abs_u:.6g} m/s^2")
    print(f"mean Lyapunov deriv.    {m.mean_vdot:.6g}")
    print(f"final Lyapunov value    {m.final_v:.6g}")
    print(f"duration                {m.duration:.6g} s ({m.n_steps} steps)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lqrl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the quantum policy and save an agent file")
    p.add_argument("--config", help="JSON config (defaults if omitted)")
    p.add_argument("--out", required=True, help="agent file to write")
    p.add_argument("--history", help="history CSV path (default: history.csv next to the agent)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("simulate", help="closed-loop run of a trained agent")
    p.add_argument("--config")
    p.add_argument("--agent", required=True)
    p.add_argument("--out-dir", help="output directory (default: config out_dir)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="recompute metrics and plots from a simulation log")
    p.add_argument("--log", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="PID vs linear feedback vs LQRL on one scenario")
    p.add_argument("--config")
    p.add_argument("--agent")
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"numeric divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (OSError, logio.LogFormatError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
