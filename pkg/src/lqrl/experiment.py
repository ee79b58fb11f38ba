"""High-level runs behind the CLI subcommands.

Every output is a pure function of the configuration and the agent file,
so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

from . import logio, plots
from .baselines import (
    STABILITY_DEFINITION,
    ComparisonRow,
    PidController,
    compare,
    linear_policy,
    train_linear,
    zero_policy,
)
from .config import ExperimentConfig
from .errors import DivergenceError
from .logio import AgentFile
from .metrics import MetricsReport, report
from .trainer import qpolicy, run_episode, train_qpolicy
from .trajectory import TrajectoryLog

log = logging.getLogger(__name__)

SIM_LOG = "simulation_log.csv"
METRICS = "metrics.csv"
SIM_PLOTS = "simulation_plots.svg"
HISTORY = "history.csv"
COMPARISON_CSV = "comparison.csv"
COMPARISON_TXT = "comparison.txt"

LINEAR_LABEL = "linear feedback (DRL substitute)"
CONTROLLER_LABELS = {"pid": "PID", "linear": LINEAR_LABEL, "lqrl": "LQRL", "zero": "zero action"}


@dataclass
class SimulationOutput:
    trajectory: TrajectoryLog
    metrics: MetricsReport
    files: list[Path]


def run_simulate(cfg: ExperimentConfig, agent: AgentFile, out_dir: str | Path) -> SimulationOutput:
    """Closed-loop run of the trained agent over ``cfg.sim_duration`` seconds.

    On divergence the rows simulated so far are still written to the log
    before the error propagates.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if agent.enc != cfg.enc:
        log.info("simulate: using the encoding stored in the agent file")
    policy = qpolicy(agent.theta, agent.enc, cfg.env)
    try:
        ep = run_episode(policy, cfg.x0, cfg.env, cfg.lyap, cfg.weights, cfg.sim_steps, record=True)
    except DivergenceError as exc:
        if exc.trajectory is not None and len(exc.trajectory):
            logio.write_trajectory(exc.trajectory, out / SIM_LOG)
            log.error("partial log with %d rows written to %s", len(exc.trajectory), out / SIM_LOG)
        raise
    traj = ep.trajectory
    m = report(traj, cfg.lyap, cfg.env.dt)
    files = [out / SIM_LOG, out / METRICS, out / SIM_PLOTS]
    logio.write_trajectory(traj, files[0])
    logio.write_metrics(m, files[1])
    plots.write_simulation_svg(traj, files[2])
    return SimulationOutput(traj, m, files)


def run_train(cfg: ExperimentConfig, agent_path: str | Path, history_path: str | Path | None = None) -> AgentFile:
    """Train the quantum policy and persist the agent and its objective history."""
    agent_path = Path(agent_path)
    history_path = agent_path.with_name(HISTORY) if history_path is None else Path(history_path)

    def progress(ep, j):
        log.debug("episode %d: J = %.6g", ep + 1, j)

    theta, result = train_qpolicy(
        cfg.env, cfg.lyap, cfg.weights, cfg.enc, cfg.train, cfg.init_range, progress=progress
    )
    agent = AgentFile(
        theta=theta,
        enc=cfg.enc,
        episodes=cfg.train.episodes,
        seed=cfg.train.seed,
        final_objective=result.history[-1],
    )
    agent_path.parent.mkdir(parents=True, exist_ok=True)
    history_path.parent.mkdir(parents=True, exist_ok=True)
    logio.save_agent(agent, agent_path)
    logio.write_history(result.history, history_path)
    plots.write_history_svg(result.history, history_path.with_suffix(".svg"))
    return agent


def run_analyze(log_path: str | Path, out_dir: str | Path) -> MetricsReport:
    """Metrics and figures recomputed from a simulation log alone."""
    traj = logio.read_trajectory(log_path)
    m = report(traj)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    logio.write_metrics(m, out / METRICS)
    plots.write_simulation_svg(traj, out / SIM_PLOTS)
    return m


def run_compare(
    cfg: ExperimentConfig, agent: AgentFile | None, out_dir: str | Path | None = None
) -> tuple[list[ComparisonRow], str]:
    """Run the configured controllers on the shared scenario.

    The linear policy is first trained without the stability penalty using
    the configured training settings. A missing agent drops the LQRL row.
    """
    factories = []
    for name in cfg.controllers:
        if name == "pid":
            factories.append((CONTROLLER_LABELS[name], lambda: PidController(cfg.pid, cfg.env)))
        elif name == "linear":
            lin, _ = train_linear(cfg.linear, cfg.env, cfg.weights, cfg.train, cfg.v_set, cfg.init_range)
            factories.append((CONTROLLER_LABELS[name], lambda lin=lin: linear_policy(lin, cfg.env, cfg.v_set)))
        elif name == "lqrl":
            if agent is None:
                log.warning("compare: no agent file given, LQRL row omitted")
                continue
            factories.append((CONTROLLER_LABELS[name], lambda: qpolicy(agent.theta, agent.enc, cfg.env)))
        elif name == "zero":
            factories.append((CONTROLLER_LABELS[name], lambda: zero_policy))
    rows = compare(factories, cfg.x0, cfg.env, cfg.lyap, cfg.weights, cfg.sim_steps, cfg.z_bound)
    text = format_table(rows, cfg.z_bound)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        logio.write_csv(
            out / COMPARISON_CSV,
            ("controller", "rmse_z", "mean_abs_u", "stable"),
            ([r.controller, logio.fmt(r.rmse_z), logio.fmt(r.mean_abs_u), r.flag] for r in rows),
        )
        (out / COMPARISON_TXT).write_text(text, encoding="utf-8")
    return rows, text


def format_table(rows: list[ComparisonRow], z_bound: float) -> str:
    header = ("Controller", "RMSE_z (m)", "mean |u| (m/s^2)", "Stable")
    body = [
        (
            r.controller,
            "nan" if math.isnan(r.rmse_z) else f"{r.rmse_z:.3f}",
            "nan" if math.isnan(r.mean_abs_u) else f"{r.mean_abs_u:.3f}",
            r.flag,
        )
        for r in rows
    ]
    widths = [max(len(line[i]) for line in [header, *body]) for i in range(len(header))]

    def line(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first, *rest])

    lines = [line(header), "  ".join("-" * w for w in widths), *(line(b) for b in body)]
    lines.append("")
    lines.append(STABILITY_DEFINITION.format(z_bound=z_bound))
    return "\n".join(lines) + "\n"
