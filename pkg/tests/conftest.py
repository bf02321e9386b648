import numpy as np
import pytest

from rlinspect.data_handler import open_writer
from rlinspect.demo_trainer import TrainerConfig, train
from rlinspect.trace_model import ActionSpace, TraceHeader


def make_header(
    state_dim: int = 4,
    n_actions: int = 2,
    probe_count: int = 4,
    state_kind: str = "continuous",
    continuous_actions: bool = False,
) -> TraceHeader:
    if continuous_actions:
        space = ActionSpace(kind="continuous", dim=n_actions)
    else:
        space = ActionSpace(kind="discrete", n=n_actions)
    return TraceHeader(
        format_version=1,
        run_id="test-run",
        state_dim=state_dim,
        action_space=space,
        state_kind=state_kind,
        probe_count=probe_count,
    )


# Exploit-heavy config so the probe set fills early and action probes exist.
DEMO_CONFIG = TrainerConfig(
    episodes=12,
    seed=3,
    eps_start=0.3,
    eps_decay=0.9,
    probe_k=4,
    snapshot_every=2,
    hidden=16,
)


@pytest.fixture(scope="session")
def demo_trace(tmp_path_factory) -> str:
    path = str(tmp_path_factory.mktemp("demo") / "trace.jsonl")
    with open_writer(path, DEMO_CONFIG.header()) as writer:
        train(DEMO_CONFIG, writer)
    return path


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
