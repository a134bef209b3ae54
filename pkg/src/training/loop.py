"""Цикл обучения по набору поз."""

from typing import Optional, Tuple

import numpy as np
import torch
from tqdm import tqdm

from src.config import NUM_THREADS, logger
from src.data.dataset import PoseDataset
from src.errors import CheckpointError, ConfigurationError
from src.evaluation import evaluate_model
from src.training.config import TrainConfig
from src.training.sinks import TrainSinks
from src.training.state import TrainState
from src.training.step import train_step

log = logger.getChild("train")


def sample_batch(rng: np.random.Generator, size: int, batch_size: int) -> np.ndarray:
    return rng.choice(size, size=batch_size, replace=batch_size > size)


def prepare_data(dataset: PoseDataset, config: TrainConfig) -> Tuple[PoseDataset, PoseDataset]:
    """Предобработка и детерминированное отделение кадров для оценки."""
    if len(dataset) == 0:
        raise ConfigurationError("dataset: набор данных пуст.")
    data = dataset.preprocessed(config.d)
    train_set, held = data.holdout(config.holdout_fraction, config.seed)
    if len(train_set) < 2:
        raise ConfigurationError("dataset: для обучения нужно хотя бы 2 кадра.")
    return train_set, held


def train(
    dataset: PoseDataset,
    config: TrainConfig,
    sinks: Optional[TrainSinks] = None,
    state: Optional[TrainState] = None,
) -> TrainState:
    """Обучает total_steps шагов (или продолжает с state.step), пишет лог и чекпоинты.

    Батчи x_real и x_sam выбираются независимо из одного seed-потока.
    При ошибке записи чекпоинта состояние остаётся доступным в CheckpointError.state.
    """
    sinks = sinks or TrainSinks()
    if NUM_THREADS > 0:
        torch.set_num_threads(NUM_THREADS)
    train_set, held = prepare_data(dataset, config)
    skeleton = dataset.skeleton
    if state is None:
        state = TrainState.initial(config, skeleton.num_joints)

    frames = torch.as_tensor(train_set.frames2d, dtype=torch.float32)
    evaluate = held.has_3d and len(held) > 0 and (held.scale_mm is not None)
    log.info(
        "Обучение: %d кадров (+%d для оценки), шаги %d..%d, critic_ratio=%d, dis=%s, svma=%s",
        len(train_set), len(held), state.step, config.total_steps, config.critic_ratio,
        config.use_discriminator, config.use_svma,
    )

    try:
        for _ in tqdm(range(state.step, config.total_steps), disable=not sinks.progress, desc="train"):
            real_idx = sample_batch(state.rng.batches, len(frames), config.batch_size)
            sam_idx = sample_batch(state.rng.batches, len(frames), config.batch_size)
            state, report = train_step(state, frames[real_idx], frames[sam_idx], config, skeleton)

            if evaluate and state.step % config.eval_every == 0:
                report.p_mpjpe = evaluate_model(state.generator, held, d=config.d, min_depth=config.min_depth).p_mpjpe
                log.info("Шаг %d: P-MPJPE на отложенных кадрах %.2f мм", state.step, report.p_mpjpe)
            sinks.write(report)
            if state.step % config.log_every == 0:
                log.info("%s clamps_total=%d", report.summary(), state.counters["depth_clamps"])
            if state.step % config.checkpoint_every == 0 and state.step < config.total_steps:
                sinks.checkpoint(state, config)
        sinks.checkpoint(state, config)
    except CheckpointError as e:
        e.state = state
        raise
    return state
