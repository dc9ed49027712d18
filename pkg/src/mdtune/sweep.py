"""Run launch configurations through an executor and pick the winner.

An executor takes (config, workload) and returns raw log text; the
orchestrator parses each log, aggregates repeats into mean/stdev, attaches
advisories, and selects the best configuration. Failed runs are recorded
and never abort the sweep.

Two executors ship with the toolkit:

 - ShellExecutor invokes a rendered engine command inside a fresh
   run_<hash>/ directory and reads back the engine's log file. It is
   exclusive: runs are strictly serialized so they do not contend for the
   node being benchmarked.
 - SyntheticExecutor evaluates the analytic node model and renders a log
   from the prediction. It is deterministic, not exclusive, and exists so
   sweeps can be tested end to end on a laptop.
"""

from __future__ import annotations

import hashlib
import io
import json
import csv
import statistics
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol, Sequence

from .balance import SyntheticNodeProfile, Workload, balance_cutoff, predict_run
from .errors import ExecutorError, InvalidConfigError, MdtuneError, RunFailure
from .hardware import NodeSpec
from .launch import (
    EngineProfile,
    LaunchConfig,
    config_from_json,
    config_to_json,
    render_command,
)
from .logparse import (
    ADVISORY_PME_OVERPROVISIONED,
    Advisory,
    PerfMetrics,
    GpuCpuRatio,
    ParsedLoadBalance,
    metrics_to_json,
    parse_metrics,
    render_log,
)

# A mesh/force load this far below 1 means the mesh ranks mostly idle.
PME_OVERPROVISION_THRESHOLD = 0.9


class Executor(Protocol):
    exclusive: bool

    def run(self, config: LaunchConfig, workload: Workload) -> str:
        """Execute one benchmark run; returns raw log text or raises RunFailure."""
        ...


class SyntheticExecutor:
    """Deterministic model-backed executor; see the module docstring."""

    exclusive = False

    def __init__(self, node: NodeSpec, profile: SyntheticNodeProfile = SyntheticNodeProfile()):
        self.node = node
        self.profile = profile

    def run(self, config: LaunchConfig, workload: Workload) -> str:
        try:
            pred = predict_run(self.profile, self.node, config, workload)
        except InvalidConfigError as exc:
            raise RunFailure(str(exc)) from exc
        metrics = PerfMetrics(performance=pred.ns_per_day)
        state = pred.balance
        if state.pp_cost_ratio > 1.0:
            st0 = balance_cutoff(workload.rc0, workload.spacing0, workload.box, 1.0)
            metrics.load_balance = ParsedLoadBalance(
                initial_rcoulomb=workload.rc0,
                initial_rlist=workload.rc0 + 0.012,
                initial_grid=st0.grid_dims,
                initial_spacing=st0.grid_spacing,
                initial_inv_beta=workload.rc0 * 0.289,
                final_rcoulomb=state.rcoulomb,
                final_rlist=state.rcoulomb + 0.012,
                final_grid=state.grid_dims,
                final_spacing=state.grid_spacing,
                final_inv_beta=state.rcoulomb * 0.289,
                cost_ratio_pp=state.pp_cost_ratio,
                cost_ratio_pme=state.pme_cost_ratio,
            )
        if config.gpu_id:
            cpu_ms = pred.cpu_overlap_time_s * 1000.0
            gpu_ms = pred.gpu_time_s * 1000.0
            if cpu_ms > 0:
                metrics.gpu_cpu = GpuCpuRatio(
                    gpu_ms=gpu_ms, cpu_ms=cpu_ms, ratio=gpu_ms / cpu_ms
                )
        if pred.pme_mesh_force_load is not None:
            metrics.pme_mesh_force_load = pred.pme_mesh_force_load
            imbalance = abs(1.0 - pred.pme_mesh_force_load) / (1.0 + pred.pme_mesh_force_load)
            metrics.pp_pme_wait_pct = round(100.0 * imbalance, 1)
            if pred.pme_mesh_force_load < PME_OVERPROVISION_THRESHOLD:
                metrics.notes.append(
                    Advisory(
                        kind=ADVISORY_PME_OVERPROVISIONED,
                        text=(
                            "NOTE: the separate PME ranks\n"
                            "      had less work to do than the PP ranks.\n"
                            "      You might want to decrease the number of PME nodes\n"
                            "      or decrease the cut-off and the grid spacing."
                        ),
                    )
                )
        return render_log(metrics)


class ShellExecutor:
    """Run rendered engine commands in per-run directories.

    Each run gets its own ``run_<hash>/`` directory under ``workdir``; the
    hash covers the config and workload, so repeated sweeps reuse distinct,
    predictable paths (a numeric suffix separates repeats).
    """

    exclusive = True

    def __init__(self, workdir: Path | str, engine: EngineProfile = EngineProfile(),
                 timeout_s: float = 3600.0):
        self.workdir = Path(workdir)
        self.engine = engine
        self.timeout_s = timeout_s
        self._counter: dict[str, int] = {}

    def run(self, config: LaunchConfig, workload: Workload) -> str:
        command = render_command(config, self.engine)
        key = hashlib.sha256(
            (command + workload.name).encode()
        ).hexdigest()[:12]
        repeat = self._counter.get(key, 0)
        self._counter[key] = repeat + 1
        rundir = self.workdir / f"run_{key}_{repeat}"
        try:
            rundir.mkdir(parents=True, exist_ok=False)
        except OSError as exc:
            raise ExecutorError(f"cannot create run directory {rundir}: {exc}") from exc
        proc = subprocess.run(
            command,
            shell=True,
            cwd=rundir,
            capture_output=True,
            text=True,
            timeout=self.timeout_s,
        )
        if proc.returncode != 0:
            raise RunFailure(
                f"command failed with exit {proc.returncode}: {command}\n{proc.stderr.strip()}"
            )
        log_path = rundir / self.engine.log_file
        if not log_path.exists():
            raise RunFailure(f"run left no log file at {log_path}")
        return log_path.read_text()


@dataclass
class SweepRow:
    config: LaunchConfig
    mean_performance: float
    stdev: float
    repeats: int
    metrics: PerfMetrics  # of the best repeat
    advisories: list[Advisory] = field(default_factory=list)


@dataclass
class SweepResult:
    rows: list[SweepRow]
    failures: list[tuple[LaunchConfig, str]]
    best_index: Optional[int]

    @property
    def best_row(self) -> SweepRow:
        if self.best_index is None:
            raise MdtuneError("sweep has no successful rows")
        return self.rows[self.best_index]


def _rank_key(row: SweepRow):
    """Sort key: performance first, then the deterministic tie-breaks."""
    return (
        -row.mean_performance,
        row.config.n_rank,
        0 if row.config.dlb == "off" else 1,
        0 if not row.config.use_ht else 1,
    )


def run_sweep(
    configs: Sequence[LaunchConfig],
    executor: Executor,
    workload: Workload,
    repeats: int = 2,
) -> SweepResult:
    """Execute every config ``repeats`` times and aggregate.

    The mean of the repeats ranks configurations (engines scatter by a few
    percent run to run, so single samples are not trusted); the stdev is
    reported alongside. A failed repeat fails the whole row, which is
    recorded in ``failures`` without stopping the sweep.
    """
    if repeats < 1:
        raise MdtuneError("repeats must be >= 1")
    rows: list[SweepRow] = []
    failures: list[tuple[LaunchConfig, str]] = []
    for config in configs:
        perfs: list[float] = []
        best_metrics: Optional[PerfMetrics] = None
        try:
            for _ in range(repeats):
                log_text = executor.run(config, workload)
                metrics = parse_metrics(log_text)
                if metrics.performance is None:
                    raise RunFailure("log contained no performance figure")
                perfs.append(metrics.performance)
                if best_metrics is None or metrics.performance >= best_metrics.performance:
                    best_metrics = metrics
        except RunFailure as exc:
            failures.append((config, str(exc)))
            continue
        rows.append(
            SweepRow(
                config=config,
                mean_performance=statistics.fmean(perfs),
                stdev=statistics.stdev(perfs) if len(perfs) > 1 else 0.0,
                repeats=repeats,
                metrics=best_metrics,
                advisories=list(best_metrics.notes),
            )
        )
    best_index = None
    if rows:
        best_index = min(range(len(rows)), key=lambda i: (_rank_key(rows[i]), i))
    return SweepResult(rows=rows, failures=failures, best_index=best_index)


def select_best(result: SweepResult) -> LaunchConfig:
    """Config with the highest mean performance.

    Ties (to the last bit) go to fewer ranks, then to DLB off, then to
    hyper-threading off, so selection is deterministic and reproducible.
    """
    if not result.rows:
        raise MdtuneError("cannot select from a sweep with no successful rows")
    return min(result.rows, key=_rank_key).config


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def result_to_json(result: SweepResult) -> str:
    doc = {
        "rows": [
            {
                "config": config_to_json(r.config),
                "mean_performance_ns_day": r.mean_performance,
                "stdev_ns_day": r.stdev,
                "repeats": r.repeats,
                "metrics": metrics_to_json(r.metrics),
                "advisories": [{"kind": a.kind, "text": a.text} for a in r.advisories],
            }
            for r in result.rows
        ],
        "failures": [
            {"config": config_to_json(c), "error": msg} for c, msg in result.failures
        ],
        "best_index": result.best_index,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def result_from_json(text: str) -> SweepResult:
    doc = json.loads(text)
    rows = []
    for r in doc["rows"]:
        m = r["metrics"]
        metrics = PerfMetrics(performance=m.get("performance_ns_day"))
        metrics.pme_mesh_force_load = m.get("pme_mesh_force_load")
        metrics.pp_pme_wait_pct = m.get("pp_pme_wait_pct")
        if m.get("gpu_cpu"):
            metrics.gpu_cpu = GpuCpuRatio(**m["gpu_cpu"])
        if m.get("load_balance"):
            lb = m["load_balance"]
            metrics.load_balance = ParsedLoadBalance(
                initial_rcoulomb=lb["initial"]["rcoulomb_nm"],
                initial_rlist=lb["initial"]["rlist_nm"],
                initial_grid=tuple(lb["initial"]["grid"]),
                initial_spacing=lb["initial"]["spacing_nm"],
                initial_inv_beta=lb["initial"]["inv_beta_nm"],
                final_rcoulomb=lb["final"]["rcoulomb_nm"],
                final_rlist=lb["final"]["rlist_nm"],
                final_grid=tuple(lb["final"]["grid"]),
                final_spacing=lb["final"]["spacing_nm"],
                final_inv_beta=lb["final"]["inv_beta_nm"],
                cost_ratio_pp=lb["cost_ratio_pp"],
                cost_ratio_pme=lb["cost_ratio_pme"],
            )
        metrics.notes = [Advisory(**n) for n in m.get("notes", [])]
        rows.append(
            SweepRow(
                config=config_from_json(r["config"]),
                mean_performance=r["mean_performance_ns_day"],
                stdev=r["stdev_ns_day"],
                repeats=r["repeats"],
                metrics=metrics,
                advisories=[Advisory(**a) for a in r.get("advisories", [])],
            )
        )
    return SweepResult(
        rows=rows,
        failures=[(config_from_json(f["config"]), f["error"]) for f in doc["failures"]],
        best_index=doc.get("best_index"),
    )


RESULT_CSV_FIELDS = [
    "n_rank", "n_th", "n_pme", "dlb", "gpu_id", "use_ht", "nstlist", "nodes",
    "mean_performance_ns_day", "stdev_ns_day", "repeats", "advisories",
]


def result_to_csv(result: SweepResult) -> str:
    """One row per configuration, ranked best first."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RESULT_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in sorted(result.rows, key=_rank_key):
        c = row.config
        writer.writerow(
            {
                "n_rank": c.n_rank,
                "n_th": c.n_th,
                "n_pme": c.n_pme,
                "dlb": c.dlb,
                "gpu_id": c.gpu_id,
                "use_ht": c.use_ht,
                "nstlist": "" if c.nstlist is None else c.nstlist,
                "nodes": c.nodes,
                "mean_performance_ns_day": row.mean_performance,
                "stdev_ns_day": row.stdev,
                "repeats": row.repeats,
                "advisories": ";".join(a.kind for a in row.advisories),
            }
        )
    return buf.getvalue()


def result_to_table(result: SweepResult) -> str:
    """Human-readable ranked table."""
    lines = [
        f"{'rank':>4}  {'P (ns/day)':>11}  {'+/-':>7}  {'ranks':>5}  "
        f"{'thr':>3}  {'pme':>3}  {'dlb':>4}  {'ht':>3}  {'gpu_id':>10}  advisories"
    ]
    for i, row in enumerate(sorted(result.rows, key=_rank_key), start=1):
        c = row.config
        lines.append(
            f"{i:>4}  {row.mean_performance:>11.3f}  {row.stdev:>7.3f}  {c.n_rank:>5}  "
            f"{c.n_th:>3}  {c.n_pme:>3}  {c.dlb:>4}  {'on' if c.use_ht else 'off':>3}  "
            f"{c.gpu_id or '-':>10}  {';'.join(a.kind for a in row.advisories) or '-'}"
        )
    if result.failures:
        lines.append("")
        lines.append(f"failed runs: {len(result.failures)}")
        for config, msg in result.failures:
            first = msg.splitlines()[0] if msg else ""
            lines.append(f"  ranks={config.n_rank} threads={config.n_th}: {first}")
    return "\n".join(lines) + "\n"
