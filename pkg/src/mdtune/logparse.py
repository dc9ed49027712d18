"""Extraction of performance and load-balance metrics from engine log text.

The interesting lines appear near the end of an engine's metrics log:

 - "Average PME mesh/force load: 0.625" with an optional companion line
   giving the percentage of runtime lost waiting on the mesh ranks,
 - "Force evaluation time GPU/CPU: 5.673 ms/8.301 ms = 0.683",
 - the "PP/PME load balancing changed the cut-off ..." table with initial
   and final cutoff/grid settings and the resulting cost ratios,
 - "NOTE:" advisory blocks,
 - the closing "Performance:" line (ns/day).

Logs from restarted runs contain several copies of a metric; the last
occurrence wins, since it reflects the balanced steady state. Parsing is
stateless and insensitive to unrelated surrounding lines. Numbers must use
'.' as the decimal separator; a recognized line whose numbers do not parse
raises LogParseError with the byte offset, it is never silently skipped.

Integrity checks (re-deriving the printed GPU/CPU ratio, cube-law check on
the cutoff scaling) produce warnings in PerfMetrics.notes, not failures:
printed values carry rounding of their own.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import LogParseError

NUMBER = r"[0-9]+(?:\.[0-9]+)?"

_PME_LOAD_RE = re.compile(r"Average PME mesh/force load:\s*(\S+)")
_PME_WAIT_RE = re.compile(
    r"spent waiting due to PP/PME imbalance:\s*(\S+)\s*%"
)
_GPU_CPU_RE = re.compile(r"Force evaluation time GPU/CPU:(.*)")
_GPU_CPU_NUMS = re.compile(
    rf"\s*({NUMBER})\s*ms/({NUMBER})\s*ms\s*=\s*({NUMBER})\s*$"
)
_PERF_RE = re.compile(rf"^\s*Performance:\s+({NUMBER})", re.MULTILINE)
_LB_HEADER_RE = re.compile(r"PP/PME load balancing changed the cut-off")
_LB_ROW_RE = re.compile(
    rf"^\s*(initial|final)\s+({NUMBER})\s*nm\s+({NUMBER})\s*nm\s+"
    rf"(\d+)\s+(\d+)\s+(\d+)\s+({NUMBER})\s*nm\s+({NUMBER})\s*nm",
    re.MULTILINE,
)
_LB_COST_RE = re.compile(rf"^\s*cost-ratio\s+({NUMBER})\s+({NUMBER})", re.MULTILINE)
_NOTE_RE = re.compile(r"^NOTE:.*(?:\n[ \t]+\S.*)*", re.MULTILINE)

RATIO_CHECK_TOLERANCE = 0.001  # printed GPU/CPU ratio vs recomputed quotient
CUBE_LAW_TOLERANCE = 0.02  # printed PP cost ratio vs cutoff-ratio cubed

ADVISORY_PME_OVERPROVISIONED = "pme_overprovisioned"
ADVISORY_GPU_UNDERUTILIZED = "gpu_underutilized"
ADVISORY_OTHER = "other"


@dataclass(frozen=True)
class Advisory:
    kind: str
    text: str


@dataclass(frozen=True)
class GpuCpuRatio:
    gpu_ms: float
    cpu_ms: float
    ratio: float  # as printed in the log


@dataclass(frozen=True)
class ParsedLoadBalance:
    initial_rcoulomb: float
    initial_rlist: float
    initial_grid: tuple[int, int, int]
    initial_spacing: float
    initial_inv_beta: float
    final_rcoulomb: float
    final_rlist: float
    final_grid: tuple[int, int, int]
    final_spacing: float
    final_inv_beta: float
    cost_ratio_pp: float
    cost_ratio_pme: float

    @property
    def shrunk(self) -> bool:
        """True when balancing reduced the cutoff (unusual, flagged upstream)."""
        return self.final_rcoulomb < self.initial_rcoulomb


@dataclass
class PerfMetrics:
    """Everything a single log contributes to a sweep row."""

    performance: Optional[float] = None  # ns/day
    pme_mesh_force_load: Optional[float] = None
    pp_pme_wait_pct: Optional[float] = None
    gpu_cpu: Optional[GpuCpuRatio] = None
    load_balance: Optional[ParsedLoadBalance] = None
    notes: list[Advisory] = field(default_factory=list)


def _parse_number(raw: str, text: str, what: str) -> float:
    if not re.fullmatch(NUMBER, raw):
        raise LogParseError(
            f"malformed {what}: {raw!r} (only '.' decimal separators are accepted)",
            offset=text.find(raw),
        )
    return float(raw)


def parse_pme_load(text: str) -> Optional[tuple[float, Optional[float]]]:
    """Last "Average PME mesh/force load" value plus the wait percentage.

    The wait line is taken from the few lines following the load line when
    present. Returns None when the log has no such line at all.
    """
    matches = list(_PME_LOAD_RE.finditer(text))
    if not matches:
        return None
    m = matches[-1]
    load = _parse_number(m.group(1), text, "PME mesh/force load")
    # the companion line sits within the next few lines when present
    window = "\n".join(text[m.end():].lstrip("\n").splitlines()[:4])
    wait = None
    wm = _PME_WAIT_RE.search(window)
    if wm:
        wait = _parse_number(wm.group(1), text, "PP/PME wait percentage")
        if not 0.0 <= wait <= 100.0:
            raise LogParseError(
                f"PP/PME wait percentage {wait} outside [0, 100]",
                offset=m.end() + wm.start(),
            )
    return load, wait


def parse_gpu_cpu_ratio(text: str) -> Optional[GpuCpuRatio]:
    """Last "Force evaluation time GPU/CPU" line as (gpu_ms, cpu_ms, ratio)."""
    matches = list(_GPU_CPU_RE.finditer(text))
    if not matches:
        return None
    m = matches[-1]
    nums = _GPU_CPU_NUMS.match(m.group(1))
    if not nums:
        raise LogParseError(
            f"malformed GPU/CPU force time line: {m.group(0).strip()!r}",
            offset=m.start(),
        )
    gpu_ms, cpu_ms, ratio = (float(g) for g in nums.groups())
    return GpuCpuRatio(gpu_ms=gpu_ms, cpu_ms=cpu_ms, ratio=ratio)


def parse_load_balance_table(text: str) -> Optional[ParsedLoadBalance]:
    """The cutoff/grid table written after PP/PME (or CPU/GPU) balancing."""
    headers = list(_LB_HEADER_RE.finditer(text))
    if not headers:
        return None
    header = headers[-1]
    block = text[header.start() :]
    rows = {m.group(1): m for m in _LB_ROW_RE.finditer(block)}
    for required in ("initial", "final"):
        if required not in rows:
            raise LogParseError(
                f"load balancing table is missing its '{required}' row",
                offset=header.start(),
            )
    cost = _LB_COST_RE.search(block)
    if not cost:
        raise LogParseError(
            "load balancing table is missing its 'cost-ratio' row",
            offset=header.start(),
        )

    def row(which: str):
        m = rows[which]
        return (
            float(m.group(2)),
            float(m.group(3)),
            (int(m.group(4)), int(m.group(5)), int(m.group(6))),
            float(m.group(7)),
            float(m.group(8)),
        )

    irc, irl, igrid, isp, ib = row("initial")
    frc, frl, fgrid, fsp, fb = row("final")
    return ParsedLoadBalance(
        initial_rcoulomb=irc,
        initial_rlist=irl,
        initial_grid=igrid,
        initial_spacing=isp,
        initial_inv_beta=ib,
        final_rcoulomb=frc,
        final_rlist=frl,
        final_grid=fgrid,
        final_spacing=fsp,
        final_inv_beta=fb,
        cost_ratio_pp=float(cost.group(1)),
        cost_ratio_pme=float(cost.group(2)),
    )


def classify_note(text: str) -> str:
    lowered = text.lower()
    if "pme" in lowered and ("less work" in lowered or "decrease the number" in lowered):
        return ADVISORY_PME_OVERPROVISIONED
    if "gpu" in lowered and ("less load" in lowered or "performance loss" in lowered):
        return ADVISORY_GPU_UNDERUTILIZED
    return ADVISORY_OTHER


def parse_advisories(text: str) -> list[Advisory]:
    """All NOTE blocks, verbatim, classified by what they complain about."""
    return [Advisory(kind=classify_note(m.group(0)), text=m.group(0)) for m in _NOTE_RE.finditer(text)]


def parse_performance(text: str) -> Optional[float]:
    matches = list(_PERF_RE.finditer(text))
    if not matches:
        return None
    value = float(matches[-1].group(1))
    if value <= 0:
        raise LogParseError(
            f"non-positive performance {value}", offset=matches[-1].start()
        )
    return value


def parse_metrics(text: str) -> PerfMetrics:
    """Full metric extraction from one log, with integrity warnings attached."""
    metrics = PerfMetrics()
    metrics.performance = parse_performance(text)
    pme = parse_pme_load(text)
    if pme:
        metrics.pme_mesh_force_load, metrics.pp_pme_wait_pct = pme
    metrics.gpu_cpu = parse_gpu_cpu_ratio(text)
    metrics.load_balance = parse_load_balance_table(text)
    metrics.notes = parse_advisories(text)

    if metrics.gpu_cpu and metrics.gpu_cpu.cpu_ms > 0:
        recomputed = metrics.gpu_cpu.gpu_ms / metrics.gpu_cpu.cpu_ms
        if abs(recomputed - metrics.gpu_cpu.ratio) > RATIO_CHECK_TOLERANCE:
            metrics.notes.append(
                Advisory(
                    kind=ADVISORY_OTHER,
                    text=(
                        f"integrity: printed GPU/CPU ratio {metrics.gpu_cpu.ratio} "
                        f"differs from recomputed {recomputed:.4f}"
                    ),
                )
            )
    lb = metrics.load_balance
    if lb and lb.initial_rcoulomb > 0 and lb.cost_ratio_pp > 0:
        cube = (lb.final_rcoulomb / lb.initial_rcoulomb) ** 3
        if abs(cube / lb.cost_ratio_pp - 1.0) > CUBE_LAW_TOLERANCE:
            metrics.notes.append(
                Advisory(
                    kind=ADVISORY_OTHER,
                    text=(
                        f"integrity: cutoff ratio cubed {cube:.3f} is more than "
                        f"{CUBE_LAW_TOLERANCE:.0%} away from printed cost ratio "
                        f"{lb.cost_ratio_pp}"
                    ),
                )
            )
    return metrics


# ---------------------------------------------------------------------------
# Rendering (synthetic logs) and serialization
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    """Plain decimal (no exponent) that parses back to the same float.

    repr() is shortest and exact but switches to scientific notation for
    extreme magnitudes, which the plain-decimal log grammar rejects; fall
    back to the full (finite) decimal expansion there.
    """
    text = repr(float(value))
    if "e" in text or "E" in text:
        text = format(float(value), ".1074f").rstrip("0")
        if text.endswith("."):
            text += "0"
    return text


def render_log(metrics: PerfMetrics) -> str:
    """Write a log that parses back to the given metrics.

    Used by the synthetic executor so that the whole sweep pipeline,
    including parsing, is exercised without an engine installed. Floats are
    written at full precision so rendering and parsing round-trip exactly.
    """
    out = ["Log file opened: synthetic run", ""]
    lb = metrics.load_balance
    if lb:
        out += [
            " PP/PME load balancing changed the cut-off and PME settings:",
            "           particle-particle                    PME",
            "            rcoulomb  rlist            grid      spacing   1/beta",
            "   initial  {} nm  {} nm     {} {} {}   {} nm  {} nm".format(
                _fmt(lb.initial_rcoulomb), _fmt(lb.initial_rlist), *lb.initial_grid,
                _fmt(lb.initial_spacing), _fmt(lb.initial_inv_beta)
            ),
            "   final    {} nm  {} nm     {} {} {}   {} nm  {} nm".format(
                _fmt(lb.final_rcoulomb), _fmt(lb.final_rlist), *lb.final_grid,
                _fmt(lb.final_spacing), _fmt(lb.final_inv_beta)
            ),
            " cost-ratio           {}             {}".format(
                _fmt(lb.cost_ratio_pp), _fmt(lb.cost_ratio_pme)
            ),
            "",
        ]
    if metrics.pme_mesh_force_load is not None:
        out.append(f" Average PME mesh/force load: {_fmt(metrics.pme_mesh_force_load)}")
        if metrics.pp_pme_wait_pct is not None:
            out.append(
                " Part of the total run time spent waiting due to PP/PME imbalance: "
                f"{_fmt(metrics.pp_pme_wait_pct)} %"
            )
        out.append("")
    if metrics.gpu_cpu is not None:
        out += [
            " Force evaluation time GPU/CPU: {} ms/{} ms = {}".format(
                _fmt(metrics.gpu_cpu.gpu_ms), _fmt(metrics.gpu_cpu.cpu_ms),
                _fmt(metrics.gpu_cpu.ratio)
            ),
            "For optimal performance this ratio should be close to 1!",
            "",
        ]
    for note in metrics.notes:
        if not note.text.startswith("NOTE:"):
            continue
        out += [note.text, ""]
    if metrics.performance is not None:
        out += [
            "               Core t (s)   Wall t (s)        (%)",
            f" Performance:     {_fmt(metrics.performance)}",
            "",
        ]
    return "\n".join(out) + "\n"


def metrics_to_json(metrics: PerfMetrics) -> dict:
    doc: dict = {
        "performance_ns_day": metrics.performance,
        "pme_mesh_force_load": metrics.pme_mesh_force_load,
        "pp_pme_wait_pct": metrics.pp_pme_wait_pct,
        "notes": [{"kind": n.kind, "text": n.text} for n in metrics.notes],
    }
    if metrics.gpu_cpu:
        doc["gpu_cpu"] = {
            "gpu_ms": metrics.gpu_cpu.gpu_ms,
            "cpu_ms": metrics.gpu_cpu.cpu_ms,
            "ratio": metrics.gpu_cpu.ratio,
        }
    if metrics.load_balance:
        lb = metrics.load_balance
        doc["load_balance"] = {
            "initial": {
                "rcoulomb_nm": lb.initial_rcoulomb,
                "rlist_nm": lb.initial_rlist,
                "grid": list(lb.initial_grid),
                "spacing_nm": lb.initial_spacing,
                "inv_beta_nm": lb.initial_inv_beta,
            },
            "final": {
                "rcoulomb_nm": lb.final_rcoulomb,
                "rlist_nm": lb.final_rlist,
                "grid": list(lb.final_grid),
                "spacing_nm": lb.final_spacing,
                "inv_beta_nm": lb.final_inv_beta,
            },
            "cost_ratio_pp": lb.cost_ratio_pp,
            "cost_ratio_pme": lb.cost_ratio_pme,
        }
    return doc


CSV_FIELDS = [
    "performance_ns_day",
    "pme_mesh_force_load",
    "pp_pme_wait_pct",
    "gpu_ms",
    "cpu_ms",
    "gpu_cpu_ratio",
    "final_rcoulomb_nm",
    "cost_ratio_pp",
    "cost_ratio_pme",
    "advisories",
]


def metrics_csv_row(metrics: PerfMetrics) -> dict:
    """One flat CSV row per log, for aggregation across runs."""
    row = {k: "" for k in CSV_FIELDS}
    if metrics.performance is not None:
        row["performance_ns_day"] = metrics.performance
    if metrics.pme_mesh_force_load is not None:
        row["pme_mesh_force_load"] = metrics.pme_mesh_force_load
    if metrics.pp_pme_wait_pct is not None:
        row["pp_pme_wait_pct"] = metrics.pp_pme_wait_pct
    if metrics.gpu_cpu:
        row["gpu_ms"] = metrics.gpu_cpu.gpu_ms
        row["cpu_ms"] = metrics.gpu_cpu.cpu_ms
        row["gpu_cpu_ratio"] = metrics.gpu_cpu.ratio
    if metrics.load_balance:
        row["final_rcoulomb_nm"] = metrics.load_balance.final_rcoulomb
        row["cost_ratio_pp"] = metrics.load_balance.cost_ratio_pp
        row["cost_ratio_pme"] = metrics.load_balance.cost_ratio_pme
    row["advisories"] = ";".join(n.kind for n in metrics.notes)
    return row


def metrics_to_csv(all_metrics: list[PerfMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for m in all_metrics:
        writer.writerow(metrics_csv_row(m))
    return buf.getvalue()
