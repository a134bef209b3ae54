"""Чекпоинт: конфигурация, веса обеих сетей, моменты Adam, шаг и случайные потоки."""

import os
import pickle
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import torch

from src.config import CHECKPOINT_VERSION, logger
from src.errors import CheckpointError
from src.networks import Discriminator, Generator, NetworkConfig
from src.training.config import TrainConfig
from src.training.optimizer import AdamMoments
from src.training.state import RandomStreams, TrainState

log = logger.getChild("checkpoint")


@dataclass
class Checkpoint:
    state: TrainState
    config: TrainConfig


def save_checkpoint(path: str | Path, state: TrainState, config: TrainConfig) -> Path:
    path = Path(path)
    payload = {
        "version": CHECKPOINT_VERSION,
        "config": config.model_dump(),
        "network": state.network_config.model_dump(),
        "step": state.step,
        "versions": {"generator": state.generator_version, "discriminator": state.discriminator_version},
        "counters": dict(state.counters),
        "generator": state.generator.state_dict(),
        "discriminator": state.discriminator.state_dict(),
        "gen_moments": state.gen_moments.state_dict(),
        "disc_moments": state.disc_moments.state_dict(),
        "rng": state.rng.state_dict(),
    }
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(payload, tmp)
        os.replace(tmp, path)
    except OSError as e:
        raise CheckpointError(f"Не удалось записать чекпоинт {path}: {e}") from e
    log.info("Чекпоинт записан: %s (шаг %d)", path, state.step)
    return path


def _read(path: str | Path, device: str) -> dict:
    path = Path(path)
    try:
        payload = torch.load(path, map_location=device, weights_only=False)
    except (OSError, RuntimeError, EOFError, pickle.UnpicklingError) as e:
        raise CheckpointError(f"Не удалось прочитать чекпоинт {path}: {e}") from e
    version = payload.get("version") if isinstance(payload, dict) else None
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"Неподдерживаемая версия чекпоинта: {version}")
    return payload


def load_generator(path: str | Path, device: str = "cpu") -> Tuple[Generator, TrainConfig]:
    """Загружает только генератор (для eval и lift) вместе с конфигурацией обучения."""
    payload = _read(path, device)
    generator = Generator(NetworkConfig(**payload["network"]))
    generator.load_state_dict(payload["generator"])
    generator.to(device).eval()
    return generator, TrainConfig(**payload["config"])


def load_checkpoint(path: str | Path, device: str = "cpu") -> Checkpoint:
    """Полное восстановление состояния; продолжение воспроизводит следующий шаг бит в бит."""
    payload = _read(path, device)
    network = NetworkConfig(**payload["network"])
    generator, discriminator = Generator(network), Discriminator(network)
    generator.load_state_dict(payload["generator"])
    discriminator.load_state_dict(payload["discriminator"])
    generator.to(device)
    discriminator.to(device)
    state = TrainState(
        generator=generator,
        discriminator=discriminator,
        gen_moments=AdamMoments.from_state_dict(payload["gen_moments"]),
        disc_moments=AdamMoments.from_state_dict(payload["disc_moments"]),
        rng=RandomStreams.from_state_dict(payload["rng"]),
        step=payload["step"],
        generator_version=payload["versions"]["generator"],
        discriminator_version=payload["versions"]["discriminator"],
        counters=dict(payload["counters"]),
    )
    return Checkpoint(state=state, config=TrainConfig(**payload["config"]))
