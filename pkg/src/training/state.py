"""Состояние обучения: сети, моменты Adam, счётчики и все случайные потоки."""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np
import torch

from src.networks import Discriminator, Generator, NetworkConfig, init_params
from src.training.config import TrainConfig
from src.training.optimizer import AdamMoments


@dataclass
class RandomStreams:
    """Потоки случайности запуска.

    angles — углы поворота и ε градиентного штрафа, batches — выбор батчей,
    torch_state — глобальный генератор torch (dropout).
    """

    angles: torch.Generator
    batches: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStreams":
        torch.manual_seed(seed)
        return cls(
            angles=torch.Generator().manual_seed(seed + 1),
            batches=np.random.default_rng(seed + 2),
        )

    def state_dict(self) -> dict:
        return {
            "angles": self.angles.get_state(),
            "batches": self.batches.bit_generator.state,
            "torch": torch.get_rng_state(),
        }

    @classmethod
    def from_state_dict(cls, state: dict) -> "RandomStreams":
        angles = torch.Generator()
        angles.set_state(state["angles"])
        batches = np.random.default_rng()
        batches.bit_generator.state = state["batches"]
        torch.set_rng_state(state["torch"])
        return cls(angles=angles, batches=batches)


@dataclass
class TrainState:
    generator: Generator
    discriminator: Discriminator
    gen_moments: AdamMoments
    disc_moments: AdamMoments
    rng: RandomStreams
    step: int = 0
    generator_version: int = 0
    discriminator_version: int = 0
    counters: Dict[str, int] = field(default_factory=lambda: {"depth_clamps": 0, "degenerate_orientations": 0})

    @classmethod
    def initial(cls, config: TrainConfig, num_joints: int) -> "TrainState":
        generator, discriminator = init_params(config.seed, config.network(num_joints))
        generator.to(config.device)
        discriminator.to(config.device)
        return cls(
            generator=generator,
            discriminator=discriminator,
            gen_moments=AdamMoments.zeros_like(list(generator.parameters())),
            disc_moments=AdamMoments.zeros_like(list(discriminator.parameters())),
            rng=RandomStreams.from_seed(config.seed),
        )

    @property
    def network_config(self) -> NetworkConfig:
        return self.generator.config
