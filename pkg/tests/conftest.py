import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for benchdata

from mdtune.hardware import CpuSpec, GpuSpec, NodeSpec

DATA = Path(__file__).parent / "data"


def read_log(name: str) -> str:
    return (DATA / name).read_text()


@pytest.fixture
def si_pme_imbalance():
    return read_log("si_pme_imbalance.log")


@pytest.fixture
def si_pme_balanced():
    return read_log("si_pme_balanced.log")


@pytest.fixture
def si_gpu_force():
    return read_log("si_gpu_force.log")


@pytest.fixture
def si_load_balance():
    return read_log("si_load_balance.log")


def make_node(cores_per_socket=10, sockets=2, ht=True, n_gpus=0, price=4400.0):
    """A dual-socket ten-core node, optionally with consumer GPUs."""
    gpu = GpuSpec(
        model_name="GTX 980",
        cuda_cores=2048,
        base_clock_mhz=1126,
        memory_gb=4,
        price_eur=450,
        idle_power_w=24,
    )
    return NodeSpec(
        cpu=CpuSpec(
            model_name="E5-2680v2",
            sockets=sockets,
            cores_per_socket=cores_per_socket,
            hardware_threads_per_core=2 if ht else 1,
            base_clock_mhz=2800,
        ),
        gpus=(gpu,) * n_gpus,
        node_price_eur=price,
        rack_units=2,
    )


@pytest.fixture
def cpu_node():
    return make_node(n_gpus=0)


@pytest.fixture
def gpu_node():
    return make_node(n_gpus=2)


@pytest.fixture
def quad_core_node():
    return make_node(cores_per_socket=4, sockets=1, ht=False, price=800.0)
