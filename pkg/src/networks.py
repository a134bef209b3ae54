"""Генератор с двумя ветвями (глубина + камера) и критик WGAN.

Генератор: вход 2N -> слой вложения -> общий остаточный блок, затем
ветвь позы (2 блока + выход N смещений глубины D) и ветвь камеры
(2 блока + выход 6 чисел, построчно K 2x3). Критик: полносвязный подъём
2N -> width, 2 остаточных блока без нормализации, выход 1 число.

Число параметров (N суставов, ширина w):
    генератор: 10*w^2 + 3*N*w + 39*w + N + 6
    критик:     4*w^2 + 2*N*w +  6*w + 1
Буферы batch-norm (running_mean/var) в подсчёт не входят.
"""

import contextlib
from typing import Iterator, Literal, Tuple

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field
from torch import nn

from src.config import CAMERA_DISTANCE, MIN_DEPTH
from src.geometry import camera_from_vector, lift_from_depth
from src.validators import check_finite

Mode = Literal["train", "eval"]

# Начальная камера: 0.1 * [[1,0,0],[0,1,0]] (идеальный масштаб 1/d при d = 10)
INITIAL_CAMERA = (0.1, 0.0, 0.0, 0.0, 0.1, 0.0)


class ResidualBlockSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    width: int = Field(1024, gt=0)
    has_batchnorm: bool = True
    dropout_rate: float = Field(0.25, ge=0.0, lt=1.0)
    activation: float = Field(0.01, ge=0.0, description="Наклон Leaky-ReLU")


class NetworkConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    num_joints: int = Field(17, gt=0)
    width: int = Field(1024, gt=0)
    dropout: float = Field(0.25, ge=0.0, lt=1.0)
    leaky_slope: float = Field(0.01, ge=0.0)

    def block(self, critic: bool = False) -> ResidualBlockSpec:
        if critic:
            return ResidualBlockSpec(width=self.width, has_batchnorm=False, dropout_rate=0.0, activation=self.leaky_slope)
        return ResidualBlockSpec(
            width=self.width, has_batchnorm=True, dropout_rate=self.dropout, activation=self.leaky_slope
        )


def _dense(in_features: int, spec: ResidualBlockSpec) -> nn.Sequential:
    layers: list[nn.Module] = [nn.Linear(in_features, spec.width)]
    if spec.has_batchnorm:
        layers.append(nn.BatchNorm1d(spec.width))
    layers.append(nn.LeakyReLU(spec.activation))
    if spec.dropout_rate > 0:
        layers.append(nn.Dropout(spec.dropout_rate))
    return nn.Sequential(*layers)


class ResidualBlock(nn.Module):
    def __init__(self, spec: ResidualBlockSpec):
        super().__init__()
        self.layers = nn.Sequential(_dense(spec.width, spec), _dense(spec.width, spec))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.layers(x)


class Generator(nn.Module):
    def __init__(self, config: NetworkConfig):
        super().__init__()
        self.config = config
        spec = config.block()
        n = config.num_joints
        self.embed = _dense(2 * n, spec)
        self.shared = ResidualBlock(spec)
        self.pose_branch = nn.Sequential(ResidualBlock(spec), ResidualBlock(spec))
        self.pose_out = nn.Linear(spec.width, n)
        self.camera_branch = nn.Sequential(ResidualBlock(spec), ResidualBlock(spec))
        self.camera_out = nn.Linear(spec.width, 6)

    def forward(self, x2d: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        h = _checked(self.embed(x2d.flatten(-2)), "embed")
        h = _checked(self.shared(h), "shared")
        depth = _checked(self.pose_out(self.pose_branch(h)), "pose_out")
        cam = _checked(self.camera_out(self.camera_branch(h)), "camera_out")
        return depth, camera_from_vector(cam)


class Discriminator(nn.Module):
    def __init__(self, config: NetworkConfig):
        super().__init__()
        self.config = config
        spec = config.block(critic=True)
        self.input_lift = _dense(2 * config.num_joints, spec)
        self.blocks = nn.Sequential(ResidualBlock(spec), ResidualBlock(spec))
        self.output = nn.Linear(spec.width, 1)

    def forward(self, x2d: torch.Tensor) -> torch.Tensor:
        h = _checked(self.input_lift(x2d.flatten(-2)), "input_lift")
        h = _checked(self.blocks(h), "blocks")
        return _checked(self.output(h), "output").squeeze(-1)


def _checked(t: torch.Tensor, layer: str) -> torch.Tensor:
    check_finite(t.detach(), layer)
    return t


def parameter_count(num_joints: int, width: int) -> Tuple[int, int]:
    n, w = num_joints, width
    return 10 * w * w + 3 * n * w + 39 * w + n + 6, 4 * w * w + 2 * n * w + 6 * w + 1


def count_parameters(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())


def init_params(seed: int, config: NetworkConfig) -> Tuple[Generator, Discriminator]:
    """Создаёт обе сети с детерминированной инициализацией по seed.

    Веса — He-инициализация для Leaky-ReLU, смещения — нули. Выходной слой
    камеры: малые веса и смещение INITIAL_CAMERA.
    """
    rng = torch.Generator().manual_seed(seed)
    # Конструкторы nn.Linear трогают глобальный генератор: изолируем его
    with torch.random.fork_rng(devices=[]):
        gen, disc = Generator(config), Discriminator(config)
    for module in (*gen.modules(), *disc.modules()):
        if isinstance(module, nn.Linear):
            nn.init.kaiming_normal_(module.weight, a=config.leaky_slope, nonlinearity="leaky_relu", generator=rng)
            nn.init.zeros_(module.bias)
    with torch.no_grad():
        nn.init.normal_(gen.camera_out.weight, std=1e-3, generator=rng)
        gen.camera_out.bias.copy_(torch.tensor(INITIAL_CAMERA))
    return gen, disc


def generator_forward(
    generator: nn.Module, x2d: torch.Tensor, mode: Mode = "eval"
) -> Tuple[torch.Tensor, torch.Tensor]:
    """Прямой проход генератора: (смещения глубины (..., N), камера (..., 2, 3))."""
    generator.train(mode == "train")
    return generator(x2d)


def discriminator_forward(discriminator: nn.Module, x2d: torch.Tensor) -> torch.Tensor:
    # У критика нет dropout и batch-norm: режим не влияет на результат
    return discriminator(x2d)


@contextlib.contextmanager
def frozen_batchnorm_stats(module: nn.Module) -> Iterator[None]:
    """Батч-нормализация считает по батчу, но не обновляет бегущие статистики."""
    norms = [m for m in module.modules() if isinstance(m, nn.modules.batchnorm._BatchNorm)]
    previous = [m.track_running_stats for m in norms]
    for m in norms:
        m.track_running_stats = False
    try:
        yield
    finally:
        for m, flag in zip(norms, previous):
            m.track_running_stats = flag


@torch.no_grad()
def lift_poses(
    generator: nn.Module,
    frames2d: np.ndarray,
    d: float = CAMERA_DISTANCE,
    min_depth: float = MIN_DEPTH,
    batch_size: int = 1024,
) -> Tuple[np.ndarray, np.ndarray]:
    """Поднимает предобработанные 2D-кадры в 3D (режим eval).

    Returns:
        (позы (F, N, 3) в системе камеры, камеры (F, 2, 3))
    """
    param = next(generator.parameters())
    n = generator.config.num_joints
    frames2d = np.asarray(frames2d).reshape(-1, n, 2)
    poses, cams = [], []
    for start in range(0, len(frames2d), batch_size):
        # подъём в float64, чтобы обратная проекция возвращала вход без потерь точности сети
        x = torch.as_tensor(frames2d[start : start + batch_size], dtype=torch.float64)
        depth, cam = generator_forward(generator, x.to(dtype=param.dtype, device=param.device), mode="eval")
        poses.append(lift_from_depth(x, depth.cpu().double(), d, min_depth).numpy())
        cams.append(cam.cpu().double().numpy())
    if not poses:
        return np.zeros((0, n, 3)), np.zeros((0, 2, 3))
    return np.concatenate(poses).astype(np.float64), np.concatenate(cams).astype(np.float64)
