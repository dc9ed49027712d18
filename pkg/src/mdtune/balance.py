"""CPU-GPU static load balancing math and a synthetic performance model.

The balancing half is exact arithmetic: shifting a factor k of short-range
work onto the GPU means growing the cutoff by k^(1/3) and coarsening the
long-range mesh by the same linear factor, with grid dimensions quantized
to FFT-friendly sizes.

The synthetic half is a small analytic node model used as a stand-in
executor: it maps a launch configuration to a deterministic ns/day figure
with the right qualitative shape (rank/thread tradeoff, GPU offload,
neighbor-search frequency, multi-node efficiency). It makes no attempt to
predict absolute performance of real hardware; it exists so the sweep
orchestrator can be tested end to end without an MD engine installed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from .errors import MdtuneError
from .hardware import NodeSpec, total_hw_threads
from .launch import LaunchConfig, validate_config

# Mesh grid dimensions must factor into these primes for fast transforms.
FFT_GRID_FACTORS = (2, 3, 5, 7)


def is_fft_friendly(n: int) -> bool:
    if n < 1:
        return False
    for p in FFT_GRID_FACTORS:
        while n % p == 0:
            n //= p
    return n == 1


def fft_friendly_size(target: float) -> int:
    """Smallest FFT-friendly integer >= target (e.g. 143.8 -> 144)."""
    n = max(1, math.ceil(target - 1e-9))
    while not is_fft_friendly(n):
        n += 1
    return n


def next_fft_friendly_below(n: int) -> int:
    """Largest FFT-friendly integer < n; 1 is the floor."""
    m = n - 1
    while m > 1 and not is_fft_friendly(m):
        m -= 1
    return max(m, 1)


@dataclass(frozen=True)
class BalanceState:
    """Cutoff/grid state after shifting short-range work by a factor.

    pp_cost_ratio is the short-range work relative to the unshifted state
    (the cube of the cutoff ratio); pme_cost_ratio is the mesh work
    relative to the unshifted state (ratio of grid volumes).
    """

    rcoulomb: float
    grid_spacing: float
    grid_dims: tuple[int, int, int]
    box: tuple[float, float, float]
    pp_cost_ratio: float
    pme_cost_ratio: float


def grid_for_spacing(box: tuple[float, float, float], spacing: float) -> tuple[int, int, int]:
    """Smallest FFT-friendly grid that resolves ``spacing`` in every dimension."""
    if spacing <= 0:
        raise MdtuneError("grid spacing must be positive")
    return tuple(fft_friendly_size(length / spacing) for length in box)


def balance_cutoff(
    rc0: float,
    spacing0: float,
    box: tuple[float, float, float],
    k: float,
) -> BalanceState:
    """Scale cutoff and mesh spacing so short-range work grows by factor k.

    k = 1 is the identity; k < 1 is rejected because the balancer only
    shifts work toward the short-range side. The returned grid_spacing is
    the realized spacing max(L/n) after grid quantization, which is what
    engine logs report.
    """
    if rc0 <= 0 or spacing0 <= 0:
        raise MdtuneError("rc0 and spacing0 must be positive")
    if k < 1:
        raise MdtuneError(f"balance factor k={k} < 1: work only shifts off the CPU")
    box = tuple(float(b) for b in box)
    scale = k ** (1.0 / 3.0)
    grid0 = grid_for_spacing(box, spacing0)
    grid = grid_for_spacing(box, spacing0 * scale)
    volume_ratio = 1.0
    for a, b in zip(grid, grid0):
        volume_ratio *= a / b
    return BalanceState(
        rcoulomb=rc0 * scale,
        grid_spacing=max(length / n for length, n in zip(box, grid)),
        grid_dims=grid,
        box=box,
        pp_cost_ratio=k,
        pme_cost_ratio=volume_ratio,
    )


# ---------------------------------------------------------------------------
# Synthetic node model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Workload:
    """The simulated system, as far as performance modeling cares."""

    name: str = "bench"
    atoms: int = 80_000
    timestep_fs: float = 2.0
    rc0: float = 1.0
    spacing0: float = 0.120
    box: tuple[float, float, float] = (10.8, 10.2, 9.6)
    benchmark_steps: int = 5000
    reset_steps: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "box", tuple(self.box))
        if self.benchmark_steps <= self.reset_steps:
            raise MdtuneError("benchmark_steps must exceed reset_steps")


@dataclass(frozen=True)
class SyntheticNodeProfile:
    """Analytic cost model of one node type.

    Rates are in abstract work-units per second; only ratios matter. The
    defaults are calibrated so that the classic shapes emerge: pure-rank
    parallelism wins on CPU-only nodes, hybrid runs with a handful of
    threads per rank win on multi-GPU nodes, and the neighbor-search
    interval has a broad optimum well above the CPU-default value.
    """

    cpu_rate: float = 2e6  # work-units/s per physical core
    gpu_rate: float = 6e7  # work-units/s per GPU at base clock
    offload_fraction_base: float = 0.60  # short-range share of per-step work
    pme_fraction_base: float = 0.25  # mesh share of per-step work
    rank_overhead: float = 1.5e-5  # seconds per rank per step (comm/launch)
    thread_efficiency_decay: float = 0.05  # OpenMP scaling loss per extra thread
    gpu_share_overhead: float = 0.02  # GPU time penalty per extra rank sharing it
    nstlist_penalty: float = 1.2  # list-build work relative to one step's work
    buffer_growth: float = 0.0035  # extra short-range work per search-interval step
    ht_speedup: float = 1.08  # throughput factor from using both hw threads
    comm_per_node: float = 1.5e-4  # seconds per step per extra node
    max_balance: float = 8.0  # largest short-range shift factor the model tries
    dlb_penalty: float = 0.02  # cost of the "wrong" DLB setting for the node kind
    app_clock_mhz: Optional[float] = None  # override of the GPUs' base clock

    def thread_efficiency(self, n_th: int) -> float:
        """Per-thread efficiency of an n_th-wide rank; equals 1 at n_th = 1."""
        return 1.0 / (1.0 + self.thread_efficiency_decay * (n_th - 1))

    def __post_init__(self):
        for name in ("cpu_rate", "gpu_rate"):
            if getattr(self, name) <= 0:
                raise MdtuneError(f"{name} must be positive")
        if abs(self.thread_efficiency(1) - 1.0) > 1e-12:
            raise MdtuneError("thread_efficiency(1) must be 1")

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, doc: dict) -> "SyntheticNodeProfile":
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise MdtuneError(f"unknown profile field(s): {', '.join(sorted(unknown))}")
        return cls(**doc)


@dataclass(frozen=True)
class PredictedRun:
    """predict_performance plus the internals a log renderer needs."""

    ns_per_day: float
    balance: BalanceState
    gpu_time_s: float
    cpu_overlap_time_s: float
    pme_mesh_force_load: Optional[float]
    step_time_s: float


def _cpu_capacity(profile: SyntheticNodeProfile, node: NodeSpec, threads_used: int,
                  n_th: int, use_ht: bool) -> float:
    """Work-units/s delivered by ``threads_used`` hardware threads."""
    physical = node.cpu.total_cores
    cores_used = min(threads_used, physical)
    ht_factor = profile.ht_speedup if (use_ht and threads_used > cores_used) else 1.0
    return cores_used * profile.cpu_rate * profile.thread_efficiency(max(1, n_th)) * ht_factor


def predict_run(
    profile: SyntheticNodeProfile,
    node: NodeSpec,
    config: LaunchConfig,
    workload: Workload,
    gpus_active: Optional[int] = None,
) -> PredictedRun:
    """Deterministic per-step cost model; see predict_performance."""
    n_gpus = len(set(config.gpu_id)) if config.gpu_id else 0
    if gpus_active is not None:
        n_gpus = gpus_active
    validate_config(config, node, gpus_active=n_gpus if n_gpus else None)

    budget = total_hw_threads(node, config.use_ht)
    n_th = config.n_th if config.n_th else budget * config.nodes // config.n_rank
    nstlist = config.nstlist if config.nstlist is not None else 10
    atoms = workload.atoms

    # Per-step work split (work-units); buffer grows with the search interval.
    work = float(atoms)
    w_sr = work * profile.offload_fraction_base * (1.0 + profile.buffer_growth * nstlist)
    w_pme = work * profile.pme_fraction_base
    w_rest = work * max(0.0, 1.0 - profile.offload_fraction_base - profile.pme_fraction_base)
    w_nonoverlap = 0.5 * w_rest + work * profile.nstlist_penalty / max(1, nstlist)
    w_bonded = 0.5 * w_rest

    pp_ranks = config.n_pp
    threads_total = pp_ranks * n_th + config.n_pme * (config.pme_threads or n_th)
    cpu_cap = _cpu_capacity(profile, node, min(threads_total // config.nodes, budget),
                            n_th, config.use_ht) * config.nodes

    gpu_cap = 0.0
    if n_gpus:
        clock_factor = 1.0
        if profile.app_clock_mhz and node.gpus:
            clock_factor = profile.app_clock_mhz / node.gpus[0].base_clock_mhz
        ranks_per_gpu = max(1, pp_ranks // max(1, n_gpus * config.nodes))
        share_penalty = 1.0 + profile.gpu_share_overhead * (ranks_per_gpu - 1)
        gpu_cap = n_gpus * config.nodes * profile.gpu_rate * clock_factor / share_penalty

    if n_gpus == 0:
        state = balance_cutoff(workload.rc0, workload.spacing0, workload.box, 1.0)
        if config.n_pme:
            # split CPU power between direct-space and mesh ranks
            pme_share = config.n_pme * (config.pme_threads or n_th) / threads_total
            cap_pme = cpu_cap * pme_share
            cap_pp = cpu_cap * (1.0 - pme_share)
            t_pp = (w_sr + w_bonded) / cap_pp
            t_pme = w_pme / cap_pme
            t_force = max(t_pp, t_pme)
            pme_load = t_pme / t_pp
        else:
            t_force = (w_sr + w_pme + w_bonded) / cpu_cap
            pme_load = None
        t_gpu = 0.0
        t_cpu_overlap = t_force
        step = t_force + w_nonoverlap / cpu_cap
        if config.dlb == "off":
            step *= 1.0 + profile.dlb_penalty  # CPU nodes want dynamic balancing
    else:
        # Find the work shift that balances GPU against overlapped CPU time.
        if config.n_pme:
            pme_share = config.n_pme * (config.pme_threads or n_th) / threads_total
        else:
            pme_share = 0.0

        def times(k: float):
            state = balance_cutoff(workload.rc0, workload.spacing0, workload.box, k)
            t_gpu = w_sr * k / gpu_cap
            mesh = w_pme * state.pme_cost_ratio
            if pme_share:
                # dedicated mesh ranks: each side only has its own cores
                t_cpu = max(mesh / (cpu_cap * pme_share),
                            w_bonded / (cpu_cap * (1.0 - pme_share)))
            else:
                t_cpu = (mesh + w_bonded) / cpu_cap
            return state, t_gpu, t_cpu

        k_lo, k_hi = 1.0, profile.max_balance
        state, t_gpu, t_cpu_overlap = times(k_lo)
        if t_gpu < t_cpu_overlap:  # GPU has headroom: shift work toward it
            for _ in range(48):
                k_mid = 0.5 * (k_lo + k_hi)
                state_m, t_g, t_c = times(k_mid)
                if t_g < t_c:
                    k_lo = k_mid
                else:
                    k_hi = k_mid
            state, t_gpu, t_cpu_overlap = times(k_lo)
        pme_load = None
        step = max(t_gpu, t_cpu_overlap) + w_nonoverlap / cpu_cap
        if config.dlb == "on":
            step *= 1.0 + profile.dlb_penalty  # DD resizing caps the cutoff shift

    step += profile.rank_overhead * config.n_rank / config.nodes
    if config.nodes > 1:
        step += profile.comm_per_node * (config.nodes - 1) / config.nodes

    ns_per_day = workload.timestep_fs * 1e-6 * 86400.0 / step
    return PredictedRun(
        ns_per_day=ns_per_day,
        balance=state,
        gpu_time_s=t_gpu,
        cpu_overlap_time_s=t_cpu_overlap,
        pme_mesh_force_load=pme_load,
        step_time_s=step,
    )


def predict_performance(
    profile: SyntheticNodeProfile,
    node: NodeSpec,
    config: LaunchConfig,
    workload: Workload,
    gpus_active: Optional[int] = None,
) -> float:
    """Predicted trajectory rate in ns/day for a config on a node.

    Deterministic: identical inputs give bit-identical outputs. Raises
    InvalidConfigError for configs the node cannot run, mirroring how a
    real sweep records a failed run.
    """
    return predict_run(profile, node, config, workload, gpus_active).ns_per_day


def load_profile(path) -> SyntheticNodeProfile:
    with open(path) as fh:
        return SyntheticNodeProfile.from_json(json.load(fh))
