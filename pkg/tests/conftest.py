import numpy as np
import pytest
import torch
from hypothesis import settings

from src.data.skeleton import CANONICAL_SKELETON
from src.data.synthetic import synthesize_poses
from src.training.config import TrainConfig

SEED = 12334567

settings.register_profile("svma", max_examples=50, deadline=None)
settings.load_profile("svma")


@pytest.fixture
def skeleton():
    return CANONICAL_SKELETON


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def synthetic():
    """Небольшой синтетический набор с 3D и scale_mm."""
    return synthesize_poses(64, seed=7, subjects=2)


@pytest.fixture
def tiny_config():
    """Узкие сети и короткое обучение для быстрых тестов."""
    return TrainConfig(
        width=32,
        batch_size=8,
        total_steps=3,
        learning_rate=1e-3,
        log_every=1,
        checkpoint_every=100,
        eval_every=100,
        holdout_fraction=0.0,
        seed=3,
    )


@pytest.fixture
def random_pose(rng):
    def make(batch=4, n=CANONICAL_SKELETON.num_joints, d=10.0):
        pose = rng.normal(scale=0.3, size=(batch, n, 3))
        pose[..., 2] += d
        return torch.as_tensor(pose, dtype=torch.float64)

    return make


class ReportCollector:
    """Приёмник LossReport для TrainSinks.log."""

    def __init__(self):
        self.reports = []

    def write(self, report):
        self.reports.append(report)

    def close(self):
        pass


@pytest.fixture
def collector():
    return ReportCollector()


@pytest.fixture
def make_collector():
    return ReportCollector

