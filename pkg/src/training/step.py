"""Один шаг состязательного обучения с двумя проходами общего генератора."""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import torch
from opentelemetry import trace
from torch import nn

from src.config import logger
from src.data.skeleton import Skeleton
from src.errors import NumericFaultError
from src.geometry import (
    depth_clamp_count,
    lift_from_depth,
    normalize_to_root,
    rotate_about_pivot,
    sample_rotation_angles,
    weak_project,
)
from src.losses import (
    GeneratorTerms,
    LossReport,
    degenerate_orientation_count,
    gradient_penalty,
    loss_3d,
    loss_adversarial,
    loss_angle,
    loss_cam_eq,
    loss_camera,
    loss_svma,
    loss_symmetry,
    svma_sets,
    total_generator_loss,
)
from src.metrics import TRAIN_STEPS
from src.networks import frozen_batchnorm_stats
from src.training.config import TrainConfig
from src.training.optimizer import adam_update
from src.training.state import TrainState

tracer = trace.get_tracer(__name__)
log = logger.getChild("step")


@dataclass
class ConsistencyPass:
    """Результаты обоих проходов генератора на батче."""

    x_real: torch.Tensor
    x_pred: torch.Tensor
    cam: torch.Tensor
    x_pred_rot: torch.Tensor
    x_proj: torch.Tensor
    x_rot_pred: Optional[torch.Tensor]
    cam2: Optional[torch.Tensor]
    clamps: int


def consistency_pass(
    generator: nn.Module,
    x_real: torch.Tensor,
    theta: torch.Tensor,
    config: TrainConfig,
    root_index: int = 0,
) -> ConsistencyPass:
    """Подъём, поворот на θ, слабоперспективная репроекция и (с SVMA) повторный подъём.

    Репроекция проходит ту же предобработку, что и реальные кадры (корень в нуле,
    среднее расстояние 1/d): её видят и критик, и второй проход.
    Второй проход читает те же параметры; статистики batch-norm обновляет только первый.
    """
    depth, cam = generator(x_real)
    clamps = depth_clamp_count(depth.detach(), config.d, config.min_depth)
    x_pred = lift_from_depth(x_real, depth, config.d, config.min_depth)
    x_pred_rot = rotate_about_pivot(x_pred, theta, config.d)
    x_proj = normalize_to_root(weak_project(x_pred_rot, cam), root_index, 1.0 / config.d)

    x_rot_pred = cam2 = None
    if config.use_svma:
        with frozen_batchnorm_stats(generator):
            depth2, cam2 = generator(x_proj)
        clamps += depth_clamp_count(depth2.detach(), config.d, config.min_depth)
        x_rot_pred = lift_from_depth(x_proj, depth2, config.d, config.min_depth)
    return ConsistencyPass(x_real, x_pred, cam, x_pred_rot, x_proj, x_rot_pred, cam2, clamps)


def pose_terms(p: ConsistencyPass, skeleton: Skeleton, config: TrainConfig) -> Dict[str, torch.Tensor]:
    """Все слагаемые, кроме состязательного. Без SVMA L_3D = L_svma = 0 и L_eq = 0 внутри L_cam.

    L_3D сравнивает позы после приведения к корню и единичному масштабу: второй
    подъём строится по нормализованной репроекции.
    """
    zero = p.x_pred.new_zeros(())
    terms = {
        "angle": loss_angle(p.x_pred, skeleton),
        "sym": loss_symmetry(p.x_pred, skeleton),
    }
    if config.use_svma:
        root = skeleton.root_index
        terms["cam"] = loss_camera(p.cam, p.cam2)
        terms["l3d"] = loss_3d(normalize_to_root(p.x_rot_pred, root, 1.0), normalize_to_root(p.x_pred_rot, root, 1.0))
        terms["svma"] = loss_svma(*svma_sets(p.x_real, p.x_pred, p.cam, p.x_proj, p.x_rot_pred, p.cam2))
    else:
        terms["cam"] = loss_camera(p.cam, p.cam)
        terms["l3d"] = zero
        terms["svma"] = zero
    return terms


def _critic_updates(state: TrainState, x_sam: torch.Tensor, fake: torch.Tensor, config: TrainConfig) -> Tuple[float, float, float]:
    disc = state.discriminator
    params = list(disc.parameters())
    disc_value = gp_value = w_value = 0.0
    for _ in range(config.critic_ratio):
        gp = gradient_penalty(disc, x_sam, fake, state.rng.angles)
        d_fake, d_real = disc(fake), disc(x_sam)
        _, disc_loss = loss_adversarial(d_fake, d_real, gp, config.lambda_gp)
        if not torch.isfinite(disc_loss):
            raise NumericFaultError("disc", step=state.step + 1)
        grads = torch.autograd.grad(disc_loss, params)
        try:
            adam_update(params, grads, state.disc_moments, config)
        except NumericFaultError as e:
            raise NumericFaultError(f"critic:{e.where}", step=state.step + 1) from e
        state.discriminator_version += 1
        TRAIN_STEPS.labels(phase="critic").inc()
        disc_value, gp_value = float(disc_loss), float(gp)
        w_value = float(d_real.mean() - d_fake.mean())
    return disc_value, gp_value, w_value


def train_step(
    state: TrainState,
    batch_real: torch.Tensor,
    batch_sam: torch.Tensor,
    config: TrainConfig,
    skeleton: Skeleton,
) -> Tuple[TrainState, LossReport]:
    """Шаг обучения: critic_ratio обновлений критика и одно обновление генератора.

    Raises:
        NumericFaultError: неконечный лосс (с именем слагаемого) или градиент.
    """
    gen, disc = state.generator, state.discriminator
    param = next(gen.parameters())
    x_real = batch_real.to(dtype=param.dtype, device=param.device)
    x_sam = batch_sam.to(dtype=param.dtype, device=param.device)
    step = state.step + 1

    with tracer.start_as_current_span("train_step") as span:
        span.set_attribute("step", step)
        gen.train()
        disc.train()
        version = state.generator_version

        theta = sample_rotation_angles(x_real.shape[0], state.rng.angles, dtype=x_real.dtype).to(x_real.device)
        try:
            p = consistency_pass(gen, x_real, theta, config, skeleton.root_index)
            terms = pose_terms(p, skeleton, config)
            # до обновлений критика: прерванный шаг не должен менять состояние
            for name, value in terms.items():
                if not torch.isfinite(value):
                    raise NumericFaultError(f"loss:{name}", step=step)

            disc_value = gp_value = w_value = 0.0
            if config.use_discriminator:
                disc_value, gp_value, w_value = _critic_updates(state, x_sam, p.x_proj.detach(), config)
                # генераторная часть WGAN: −E[D(x̃_proj)] по уже обновлённому критику
                gen_adv = -disc(p.x_proj).mean()
            else:
                gen_adv = x_real.new_zeros(())
        except NumericFaultError as e:
            span.set_attribute("error", e.where)
            if e.step is not None:
                raise
            raise NumericFaultError(e.where, step=step) from e

        # оба прохода и обновления критика не трогают веса генератора
        assert state.generator_version == version

        total, report = total_generator_loss(GeneratorTerms(adv=gen_adv, **terms), config.weights, step=step)
        for name, value in (("adv", gen_adv), ("total", total)):
            if not torch.isfinite(value):
                span.set_attribute("error", f"loss:{name}")
                raise NumericFaultError(f"loss:{name}", step=step)

        params = list(gen.parameters())
        grads = torch.autograd.grad(total, params, allow_unused=True)
        grads = [torch.zeros_like(w) if g is None else g for w, g in zip(params, grads)]
        try:
            adam_update(params, grads, state.gen_moments, config)
        except NumericFaultError as e:
            raise NumericFaultError(f"generator:{e.where}", step=step) from e
        TRAIN_STEPS.labels(phase="generator").inc()

        state.generator_version += 1
        state.step = step
        state.counters["depth_clamps"] += p.clamps
        state.counters["degenerate_orientations"] += degenerate_orientation_count(p.x_pred, skeleton)

    report.disc, report.gp, report.wasserstein, report.clamps = disc_value, gp_value, w_value, p.clamps
    if p.clamps:
        log.debug("Шаг %d: ограничений глубины %d", step, p.clamps)
    return state, report


@torch.no_grad()
def camera_agreement(
    generator: nn.Module,
    frames2d,
    config: TrainConfig,
    root_index: int = 0,
    seed: int = 0,
) -> float:
    """Средний L_eq по кадрам: расхождение камер исходного и повёрнутого ракурсов (режим eval)."""
    param = next(generator.parameters())
    x = torch.as_tensor(np.asarray(frames2d), dtype=param.dtype, device=param.device)
    theta = sample_rotation_angles(len(x), torch.Generator().manual_seed(seed), dtype=x.dtype).to(x.device)
    generator.eval()
    p = consistency_pass(generator, x, theta, config.model_copy(update={"use_svma": True}), root_index)
    return float(loss_cam_eq(p.cam, p.cam2))
