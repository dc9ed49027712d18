"""Enumeration, validation, and rendering of candidate launch configurations.

A launch configuration fixes how an MD engine run is started on one or more
nodes: how many ranks, how many OpenMP threads per rank, how many of the
ranks do the long-range mesh work, how ranks map onto GPUs, and a few
engine toggles (dynamic load balancing, neighbor-search interval,
hyper-threading). Everything here is a pure function over immutable inputs.
"""

from __future__ import annotations

import json
import shlex
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .errors import InvalidConfigError
from .hardware import NodeSpec, total_hw_threads

# Separate-PME rank counts are tried at these fractions of the total rank
# count, rounded and deduplicated.
PME_FRACTIONS = (1 / 8, 1 / 6, 1 / 4, 1 / 3, 1 / 2)

# A rank-to-GPU map is a digit string, so at most 10 GPUs can be addressed.
MAX_MAPPED_GPUS = 10

DLB_VALUES = ("on", "off", "auto")


@dataclass(frozen=True)
class LaunchConfig:
    """One candidate run.

    ``n_rank`` counts all ranks across all nodes, ``n_pme`` of which are
    dedicated long-range mesh ranks. ``n_th`` is OpenMP threads per
    particle-particle rank; 0 means "let the engine fill the node".
    ``gpu_id`` maps the per-node PP ranks onto numeric GPU ids, one digit
    per rank, empty when no GPUs are used.
    """

    n_rank: int
    n_th: int = 0
    n_pme: int = 0
    n_th_pme: Optional[int] = None
    dlb: str = "auto"
    gpu_id: str = ""
    use_ht: bool = False
    nstlist: Optional[int] = None
    dd_grid: Optional[tuple[int, int, int]] = None
    nodes: int = 1

    def __post_init__(self):
        if self.n_rank < 1:
            raise InvalidConfigError("n_rank must be >= 1")
        if not 0 <= self.n_pme < self.n_rank:
            raise InvalidConfigError("n_pme must be in [0, n_rank)")
        if self.dlb not in DLB_VALUES:
            raise InvalidConfigError(f"dlb must be one of {DLB_VALUES}")
        if self.nodes < 1:
            raise InvalidConfigError("nodes must be >= 1")
        if self.gpu_id and not self.gpu_id.isdigit():
            raise InvalidConfigError("gpu_id must be a digit string")
        if self.dd_grid is not None:
            object.__setattr__(self, "dd_grid", tuple(self.dd_grid))

    @property
    def n_pp(self) -> int:
        return self.n_rank - self.n_pme

    @property
    def pme_threads(self) -> int:
        return self.n_th if self.n_th_pme is None else self.n_th_pme


def validate_config(config: LaunchConfig, node: NodeSpec, gpus_active: Optional[int] = None) -> None:
    """Check a config against a node; raises InvalidConfigError on violation.

    ``gpus_active`` defaults to all GPUs of the node. A config that uses
    GPUs needs at least one PP rank per GPU and a gpu_id digit per PP rank
    on a node.
    """
    n_gpus = node.n_gpus if gpus_active is None else gpus_active
    budget = total_hw_threads(node, config.use_ht)
    if config.n_rank % config.nodes != 0:
        raise InvalidConfigError(
            f"{config.n_rank} ranks do not divide evenly over {config.nodes} nodes"
        )
    n_th = config.n_th if config.n_th else budget * config.nodes // config.n_rank
    pme_th = config.n_th_pme if config.n_th_pme is not None else n_th
    used = (config.n_rank - config.n_pme) * n_th + config.n_pme * pme_th
    if used > budget * config.nodes:
        raise InvalidConfigError(
            f"thread budget exceeded: {used} threads > {budget} per node x {config.nodes} nodes"
        )
    pp_per_node = (config.n_rank - config.n_pme) // config.nodes
    if config.gpu_id:
        if len(config.gpu_id) != pp_per_node:
            raise InvalidConfigError(
                f"gpu_id length {len(config.gpu_id)} != {pp_per_node} PP ranks per node"
            )
        ids = {int(c) for c in config.gpu_id}
        if max(ids) >= n_gpus:
            raise InvalidConfigError(
                f"gpu_id references GPU {max(ids)} but only {n_gpus} active"
            )
    if n_gpus > 0 and config.gpu_id and pp_per_node < n_gpus:
        raise InvalidConfigError(
            f"{pp_per_node} PP ranks per node < {n_gpus} GPUs (one rank per GPU required)"
        )
    if config.dd_grid is not None:
        nx, ny, nz = config.dd_grid
        if nx * ny * nz != config.n_rank - config.n_pme:
            raise InvalidConfigError(
                f"DD grid {config.dd_grid} does not factor {config.n_rank - config.n_pme} PP ranks"
            )


def gpu_id_string(n_gpus: int, n_pp_ranks: int) -> str:
    """Map ``n_pp_ranks`` ranks onto ``n_gpus`` GPUs as a digit string.

    Rank i gets GPU floor(i * n_gpus / n_pp_ranks): ids come out
    non-decreasing, every GPU appears, and group sizes differ by at most
    one. (2, 6) -> "000111", (4, 10) -> "0001122233".
    """
    if n_gpus < 1:
        raise InvalidConfigError("need at least one GPU to build a gpu_id string")
    if n_gpus > MAX_MAPPED_GPUS:
        raise InvalidConfigError(
            f"cannot address {n_gpus} GPUs with single-digit ids (max {MAX_MAPPED_GPUS})"
        )
    if n_pp_ranks < n_gpus:
        raise InvalidConfigError(
            f"{n_pp_ranks} PP ranks < {n_gpus} GPUs (one rank per GPU required)"
        )
    return "".join(str(i * n_gpus // n_pp_ranks) for i in range(n_pp_ranks))


@dataclass(frozen=True)
class SweepOptions:
    """Knobs for single-node enumeration.

    ``gpus_active=None`` uses every GPU of the node; ``ht=None`` tries both
    settings when the CPU has hyper-threading. ``dlb=None`` picks the
    engine-appropriate default set (on+off with GPUs, on without).
    """

    gpus_active: Optional[int] = None
    ht: Optional[Sequence[bool]] = None
    dlb: Optional[Sequence[str]] = None
    nstlist: Sequence[Optional[int]] = (None,)
    pme_variants: bool = True


def _divisors_desc(n: int) -> list[int]:
    divs = [d for d in range(1, n + 1) if n % d == 0]
    return sorted(divs, reverse=True)


def _pme_candidates(n_rank: int) -> list[int]:
    cands = sorted({round(n_rank * f) for f in PME_FRACTIONS})
    return [c for c in cands if 0 < c < n_rank]


def _ht_settings(node: NodeSpec, options: SweepOptions) -> list[bool]:
    if options.ht is not None:
        return list(options.ht)
    if node.cpu.hardware_threads_per_core > 1:
        return [False, True]
    return [False]


def enumerate_single_node(node: NodeSpec, options: SweepOptions = SweepOptions()) -> list[LaunchConfig]:
    """All single-node launch candidates for a node.

    For each hyper-threading setting the thread budget N is factored into
    every (ranks, threads) pair with ranks * threads = N, keeping only
    configurations with at least one rank per active GPU. This covers the
    three classic scans: all-ranks (N, 1), all-threads (1, N), and the
    hybrid combinations in between. On big CPU-only nodes (N >= 20),
    separate-PME variants are added for the rank-heavy configurations.
    GPU candidates are emitted with load balancing both on and off, since
    either can win depending on the system.
    """
    n_gpus = node.n_gpus if options.gpus_active is None else options.gpus_active
    if n_gpus > node.n_gpus:
        raise InvalidConfigError(
            f"requested {n_gpus} active GPUs but node has {node.n_gpus}"
        )
    ht_settings = _ht_settings(node, options)
    if options.dlb is not None:
        dlb_settings = list(options.dlb)
    elif n_gpus > 0:
        dlb_settings = ["on", "off"]
    else:
        dlb_settings = ["on"]

    configs: list[LaunchConfig] = []
    for use_ht in ht_settings:
        budget = total_hw_threads(node, use_ht)
        for n_rank in _divisors_desc(budget):
            if n_gpus > 0 and n_rank < n_gpus:
                continue
            n_th = budget // n_rank
            pme_counts = [0]
            if options.pme_variants and n_gpus == 0 and budget >= 20 and n_rank >= 8:
                pme_counts += _pme_candidates(n_rank)
            for n_pme in pme_counts:
                for dlb in dlb_settings:
                    for nstlist in options.nstlist:
                        configs.append(
                            LaunchConfig(
                                n_rank=n_rank,
                                n_th=n_th,
                                n_pme=n_pme,
                                dlb=dlb,
                                gpu_id=gpu_id_string(n_gpus, n_rank - n_pme)
                                if n_gpus > 0
                                else "",
                                use_ht=use_ht,
                                nstlist=nstlist,
                            )
                        )
    for c in configs:
        validate_config(c, node, gpus_active=n_gpus)
    return configs


def enumerate_plan(
    node: NodeSpec, options: SweepOptions = SweepOptions(), nodes: int = 1
) -> list[LaunchConfig]:
    """The full candidate plan for a node type.

    The single-node rank/thread scan, plus, when GPUs are in play, the
    homogeneous interleaved-PME layouts (half the ranks on mesh duty, one
    PP rank per GPU) with an even and a mesh-heavy thread split.
    """
    configs = enumerate_single_node(node, options)
    n_gpus = node.n_gpus if options.gpus_active is None else options.gpus_active
    if n_gpus == 0 or not options.pme_variants:
        return configs
    ranks_per_node = 2 * n_gpus
    for use_ht in _ht_settings(node, options):
        budget = total_hw_threads(node, use_ht)
        n_th = budget // ranks_per_node
        if n_th < 1:
            continue
        splits = [(n_th, n_th)]
        if n_th >= 2:
            splits.append((n_th - 1, n_th + 1))  # shift CPU power to the mesh
        for pp_th, pme_th in splits:
            for nstlist in options.nstlist:
                layout = interleaved_pme_layout(
                    nodes, ranks_per_node, n_gpus,
                    n_th=pp_th, n_th_pme=pme_th, use_ht=use_ht,
                )
                configs.append(replace(layout, nstlist=nstlist))
    return configs


def interleaved_pme_layout(
    nodes: int,
    ranks_per_node: int,
    gpus_per_node: int,
    n_th: int = 0,
    n_th_pme: Optional[int] = None,
    use_ht: bool = False,
) -> LaunchConfig:
    """Multi-node layout with half of each node's ranks doing mesh work.

    The engine's default rank placement interleaves PP and PME ranks, so
    with ranks_per_node = 2 x gpus_per_node each node ends up with one PP
    rank per GPU plus as many PME ranks; the per-node gpu_id is then the
    one-to-one map "01...".  PP and PME ranks may use different thread
    counts to fine-tune the split of CPU power.
    """
    if ranks_per_node % 2 != 0:
        raise InvalidConfigError("interleaved PME layout needs an even ranks_per_node")
    if gpus_per_node != ranks_per_node // 2:
        raise InvalidConfigError(
            f"interleaved PME layout maps {ranks_per_node // 2} PP ranks per node "
            f"one-to-one onto GPUs; got {gpus_per_node} GPUs"
        )
    total_ranks = nodes * ranks_per_node
    return LaunchConfig(
        n_rank=total_ranks,
        n_th=n_th,
        n_pme=total_ranks // 2,
        n_th_pme=n_th_pme,
        gpu_id="".join(str(i) for i in range(gpus_per_node)),
        nodes=nodes,
        use_ht=use_ht,
    )


@dataclass(frozen=True)
class MultiSimPlan:
    """Placement plan for M independent replicas of the same system."""

    replicas: int
    threads_per_replica: int
    placement: str  # "dense" | "interleaved"
    nodes: int
    per_replica_gpu_id: str
    ranks_per_replica: int = 1
    leftover_threads: int = 0

    @property
    def total_ranks(self) -> int:
        return self.replicas * self.ranks_per_replica


def plan_multi_sim(
    node: NodeSpec,
    replicas: int,
    nodes: int = 1,
    placement: str = "interleaved",
    use_ht: bool = True,
    gpus_active: Optional[int] = None,
) -> MultiSimPlan:
    """Plan M replicas over one or more identical nodes.

    On a single node each replica gets one rank with budget // M threads;
    threads that do not divide evenly are reported as leftover, never
    silently absorbed. Across nodes, "dense" packs each replica onto
    nodes/M contiguous nodes while "interleaved" gives every node one
    domain of every replica (one rank per replica per node).
    """
    if placement not in ("dense", "interleaved"):
        raise InvalidConfigError(f"unknown placement {placement!r}")
    if replicas < 1:
        raise InvalidConfigError("replicas must be >= 1")
    n_gpus = node.n_gpus if gpus_active is None else gpus_active
    budget = total_hw_threads(node, use_ht)

    if nodes == 1:
        if replicas > budget:
            raise InvalidConfigError(
                f"{replicas} replicas exceed {budget} hardware threads"
            )
        threads = budget // replicas
        leftover = budget - threads * replicas
        gid = gpu_id_string(n_gpus, replicas) if n_gpus > 0 and replicas >= n_gpus else ""
        if n_gpus > 0 and replicas < n_gpus:
            # fewer replicas than GPUs: map one GPU per replica, rest idle
            gid = "".join(str(i) for i in range(replicas))
        return MultiSimPlan(
            replicas=replicas,
            threads_per_replica=threads,
            placement=placement,
            nodes=1,
            per_replica_gpu_id=gid,
            ranks_per_replica=1,
            leftover_threads=leftover,
        )

    if placement == "dense":
        if nodes % replicas != 0:
            raise InvalidConfigError(
                f"dense placement needs nodes divisible by replicas ({nodes} % {replicas})"
            )
        nodes_per_replica = nodes // replicas
        ranks_per_replica = nodes_per_replica * max(1, n_gpus)
        gid = gpu_id_string(n_gpus, max(1, n_gpus)) if n_gpus > 0 else ""
        threads = budget // max(1, n_gpus)
    else:
        # every node hosts one rank of every replica
        if replicas > budget:
            raise InvalidConfigError(
                f"{replicas} replicas exceed {budget} hardware threads per node"
            )
        ranks_per_replica = nodes
        threads = budget // replicas
        gid = gpu_id_string(n_gpus, replicas) if n_gpus > 0 and replicas >= n_gpus else ""
    return MultiSimPlan(
        replicas=replicas,
        threads_per_replica=threads,
        placement=placement,
        nodes=nodes,
        per_replica_gpu_id=gid,
        ranks_per_replica=ranks_per_replica,
        leftover_threads=budget - threads * replicas if placement == "interleaved" else 0,
    )


# ---------------------------------------------------------------------------
# Command rendering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EngineProfile:
    """How to spell a run command for a particular engine build.

    ``thread_mpi`` selects the single-node built-in MPI flavor (-ntmpi)
    versus an external launcher (mpirun -np). ``log_file`` is where the
    engine writes the metrics log this toolkit parses.
    """

    mdrun: str = "mdrun"
    mpirun: str = "mpirun"
    thread_mpi: bool = True
    tpr_file: str = "in.tpr"
    log_file: str = "md.log"
    nsteps: Optional[int] = None
    resetstep: Optional[int] = None


def render_command(config: LaunchConfig, profile: EngineProfile = EngineProfile()) -> str:
    """Deterministic engine command line for a config.

    Flags that are at their engine default (no separate PME ranks, automatic
    thread count, automatic DLB, no GPUs) are omitted, mirroring how such
    commands are written by hand.
    """
    parts: list[str] = []
    if profile.thread_mpi:
        parts += [profile.mdrun, "-ntmpi", str(config.n_rank)]
    else:
        parts += [profile.mpirun, "-np", str(config.n_rank), profile.mdrun]
    if config.n_th:
        parts += ["-ntomp", str(config.n_th)]
    if config.n_pme:
        parts += ["-npme", str(config.n_pme)]
        if config.n_th_pme is not None:
            parts += ["-ntomp_pme", str(config.n_th_pme)]
    if config.dlb != "auto":
        parts += ["-dlb", "yes" if config.dlb == "on" else "no"]
    if config.nstlist is not None:
        parts += ["-nstlist", str(config.nstlist)]
    if config.dd_grid is not None:
        parts += ["-dd"] + [str(d) for d in config.dd_grid]
    if config.gpu_id:
        parts += ["-gpu_id", config.gpu_id]
    parts += ["-s", profile.tpr_file]
    if profile.nsteps is not None:
        parts += ["-nsteps", str(profile.nsteps)]
    if profile.resetstep is not None:
        parts += ["-resetstep", str(profile.resetstep)]
    return " ".join(parts)


_FLAG_FIELDS = {
    "-ntmpi": ("n_rank", int),
    "-np": ("n_rank", int),
    "-ntomp": ("n_th", int),
    "-npme": ("n_pme", int),
    "-ntomp_pme": ("n_th_pme", int),
    "-nstlist": ("nstlist", int),
    "-gpu_id": ("gpu_id", str),
}


def parse_command(text: str) -> LaunchConfig:
    """Recover the config fields encoded in a rendered command line."""
    tokens = shlex.split(text)
    fields: dict = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in _FLAG_FIELDS:
            name, conv = _FLAG_FIELDS[tok]
            fields[name] = conv(tokens[i + 1])
            i += 2
        elif tok == "-dlb":
            fields["dlb"] = "on" if tokens[i + 1] == "yes" else "off"
            i += 2
        elif tok == "-dd":
            fields["dd_grid"] = tuple(int(t) for t in tokens[i + 1 : i + 4])
            i += 4
        else:
            i += 1
    if "n_rank" not in fields:
        raise InvalidConfigError(f"no rank count found in command: {text!r}")
    return LaunchConfig(**fields)


# ---------------------------------------------------------------------------
# Plan serialization
# ---------------------------------------------------------------------------


def config_to_json(config: LaunchConfig) -> dict:
    doc = {
        "n_rank": config.n_rank,
        "n_th": config.n_th,
        "n_pme": config.n_pme,
        "dlb": config.dlb,
        "gpu_id": config.gpu_id,
        "use_ht": config.use_ht,
        "nodes": config.nodes,
    }
    if config.n_th_pme is not None:
        doc["n_th_pme"] = config.n_th_pme
    if config.nstlist is not None:
        doc["nstlist"] = config.nstlist
    if config.dd_grid is not None:
        doc["dd_grid"] = list(config.dd_grid)
    return doc


def config_from_json(doc: dict) -> LaunchConfig:
    dd = doc.get("dd_grid")
    return LaunchConfig(
        n_rank=doc["n_rank"],
        n_th=doc.get("n_th", 0),
        n_pme=doc.get("n_pme", 0),
        n_th_pme=doc.get("n_th_pme"),
        dlb=doc.get("dlb", "auto"),
        gpu_id=doc.get("gpu_id", ""),
        use_ht=doc.get("use_ht", False),
        nstlist=doc.get("nstlist"),
        dd_grid=tuple(dd) if dd else None,
        nodes=doc.get("nodes", 1),
    )


def plan_to_json(configs: Iterable[LaunchConfig]) -> str:
    return json.dumps([config_to_json(c) for c in configs], indent=2, sort_keys=True) + "\n"


def plan_from_json(text: str) -> list[LaunchConfig]:
    return [config_from_json(doc) for doc in json.loads(text)]


def plan_to_script(configs: Iterable[LaunchConfig], profile: EngineProfile = EngineProfile()) -> str:
    """One command per line, ready to paste into a shell session."""
    return "\n".join(render_command(c, profile) for c in configs) + "\n"
