"""Readers and writers for the CSV logs and the plain-text agent file.

Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from .metrics import MetricsReport
from .qpolicy import EncodingConfig, PolicyParams
from .trajectory import COLUMNS, TrajectoryLog

AGENT_FORMAT_VERSION = 1
AGENT_MAGIC = "# lqrl agent"
_THETA_KEYS = ("theta1", "theta2", "theta3", "theta4", "theta5", "s", "b")
_ENC_KEYS = ("z_scale", "v_scale", "ve_scale", "angle_gain")
METRIC_FIELDS = ("rmse_z", "mean_abs_u", "mean_vdot", "final_v", "duration", "n_steps")


class LogFormatError(ValueError):
    """Malformed CSV or agent file."""


def fmt(x: float) -> str:
    return format(x, ".17g")


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_trajectory(traj: TrajectoryLog, path: str | Path) -> None:
    write_csv(path, COLUMNS, ([fmt(v) for v in row] for row in traj.rows()))


def read_trajectory(path: str | Path) -> TrajectoryLog:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise LogFormatError(f"{path}: empty file")
        if tuple(header) != COLUMNS:
            raise LogFormatError(f"{path}: header must be {','.join(COLUMNS)}, got {','.join(header)}")
        traj = TrajectoryLog()
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(COLUMNS):
                raise LogFormatError(f"{path}: row {lineno} has {len(row)} fields, expected {len(COLUMNS)}")
            values = []
            for col, cell in zip(COLUMNS, row):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise LogFormatError(f"{path}: row {lineno}, column {col!r}: not a number: {cell!r}") from None
            traj.append(*values)
    if len(traj) == 0:
        raise LogFormatError(f"{path}: no data rows")
    for k in range(1, len(traj)):
        if not traj.t[k] > traj.t[k - 1]:
            raise LogFormatError(f"{path}: row {k + 2}: t is not strictly increasing")
    return traj


def write_metrics(m: MetricsReport, path: str | Path) -> None:
    row = [fmt(getattr(m, f)) if f != "n_steps" else str(m.n_steps) for f in METRIC_FIELDS]
    write_csv(path, METRIC_FIELDS, [row])


def read_metrics(path: str | Path) -> MetricsReport:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) != 2 or tuple(rows[0]) != METRIC_FIELDS:
        raise LogFormatError(f"{path}: expected header {','.join(METRIC_FIELDS)} and one data row")
    vals = dict(zip(METRIC_FIELDS, rows[1]))
    return MetricsReport(
        **{f: float(vals[f]) for f in METRIC_FIELDS if f != "n_steps"}, n_steps=int(vals["n_steps"])
    )


def write_history(history: list[float], path: str | Path) -> None:
    write_csv(path, ("episode", "objective"), ([str(i + 1), fmt(j)] for i, j in enumerate(history)))


def read_history(path: str | Path) -> list[float]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["episode", "objective"]:
        raise LogFormatError(f"{path}: expected header episode,objective")
    return [float(r[1]) for r in rows[1:]]


@dataclass
class AgentFile:
    theta: PolicyParams
    enc: EncodingConfig = field(default_factory=EncodingConfig)
    episodes: int = 0
    seed: int = 0
    final_objective: float = math.nan
    version: int = AGENT_FORMAT_VERSION


def dumps_agent(agent: AgentFile) -> str:
    lines = [AGENT_MAGIC, f"format_version = {agent.version}"]
    lines += [f"{k} = {fmt(v)}" for k, v in zip(_THETA_KEYS, agent.theta.as_tuple())]
    lines += [f"{k} = {fmt(getattr(agent.enc, k))}" for k in _ENC_KEYS]
    lines += [
        f"episodes = {agent.episodes}",
        f"seed = {agent.seed}",
        f"final_objective = {fmt(agent.final_objective)}",
    ]
    return "\n".join(lines) + "\n"


def loads_agent(text: str, source: str = "<agent>") -> AgentFile:
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise LogFormatError(f"{source}: line {lineno}: expected 'key = value'")
        entries[key.strip()] = val.strip()
    try:
        version = int(entries.get("format_version", ""))
    except ValueError:
        raise LogFormatError(f"{source}: missing or invalid format_version") from None
    if version != AGENT_FORMAT_VERSION:
        raise LogFormatError(f"{source}: unsupported agent format version {version}")
    theta_present = [k for k in _THETA_KEYS if k in entries]
    if len(theta_present) != len(_THETA_KEYS):
        missing = [k for k in _THETA_KEYS if k not in entries]
        raise LogFormatError(f"{source}: expected 7 policy parameters, missing {', '.join(missing)}")
    try:
        theta = PolicyParams(*(float(entries[k]) for k in _THETA_KEYS))
        enc_vals = {k: float(entries[k]) for k in _ENC_KEYS if k in entries}
        enc = EncodingConfig(**enc_vals)
        return AgentFile(
            theta=theta,
            enc=enc,
            episodes=int(entries.get("episodes", 0)),
            seed=int(entries.get("seed", 0)),
            final_objective=float(entries.get("final_objective", "nan")),
            version=version,
        )
    except ValueError as exc:
        raise LogFormatError(f"{source}: {exc}") from exc


def save_agent(agent: AgentFile, path: str | Path) -> None:
    Path(path).write_text(dumps_agent(agent), encoding="utf-8")


def load_agent(path: str | Path) -> AgentFile:
    return loads_agent(Path(path).read_text(encoding="utf-8"), str(path))
