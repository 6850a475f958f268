import dataclasses

import pytest

from swarmscale.config import ExperimentConfig


@pytest.fixture
def tiny_cfg():
    """Fast config for runner/CLI tests: 4x4 cells of 200 s on a small
    arena."""
    return dataclasses.replace(
        ExperimentConfig(),
        width=16.0, height=8.0, num_blocks=12,
        sizes=(1, 2), runs=2, duration=200.0,
        master_seed=424242).validate()
