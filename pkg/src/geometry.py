"""Проекции и повороты, связывающие 2D-наблюдения, 3D-позы и камеры.

Позы хранятся как тензоры (..., N, 3) в системе камеры: камера в начале
координат смотрит вдоль +Z, ось Y направлена вверх, скелет находится около
глубины d. Поворот применяется к позе-строке справа: X @ M.
"""

import math

import torch

from src.config import CAMERA_DISTANCE, MIN_DEPTH, logger
from src.errors import CameraDomainError, ProjectionDomainError
from src.metrics import DEPTH_CLAMPS

log = logger.getChild("geometry")

_NORM_EPS = 1e-12


def depth_clamp_count(depth_offsets: torch.Tensor, d: float = CAMERA_DISTANCE, min_depth: float = MIN_DEPTH) -> int:
    return int(((d + depth_offsets) < min_depth).sum())


def lift_from_depth(
    x2d: torch.Tensor,
    depth_offsets: torch.Tensor,
    d: float = CAMERA_DISTANCE,
    min_depth: float = MIN_DEPTH,
) -> torch.Tensor:
    """Восстанавливает 3D-позу из 2D и смещений глубины: Z = max(d + D, min_depth), X = xZ, Y = yZ."""
    clamps = depth_clamp_count(depth_offsets, d, min_depth)
    if clamps:
        DEPTH_CLAMPS.inc(clamps)
        log.debug("Глубина ограничена снизу у %d суставов", clamps)
    z = torch.clamp(d + depth_offsets, min=min_depth).unsqueeze(-1)
    return torch.cat([x2d * z, z], dim=-1)


def perspective_project(p):
    """x = X/Z, y = Y/Z (f = 1). Работает и с torch.Tensor, и с numpy-массивами."""
    z = p[..., 2:3]
    if bool((z <= 0).any()):
        raise ProjectionDomainError("Перспективная проекция определена только для Z > 0.")
    return p[..., :2] / z


def rotation_matrix_y(theta) -> torch.Tensor:
    """Матрица поворота вокруг оси y в записи [[c,0,-s],[0,1,0],[s,0,c]], с батчем по theta."""
    if not torch.is_tensor(theta):
        theta = torch.tensor(theta, dtype=torch.get_default_dtype())
    c, s = torch.cos(theta), torch.sin(theta)
    zero, one = torch.zeros_like(theta), torch.ones_like(theta)
    rows = [
        torch.stack([c, zero, -s], dim=-1),
        torch.stack([zero, one, zero], dim=-1),
        torch.stack([s, zero, c], dim=-1),
    ]
    return torch.stack(rows, dim=-2)


def sample_rotation_angles(batch_size: int, generator: torch.Generator, dtype=torch.float32) -> torch.Tensor:
    return torch.rand(batch_size, generator=generator, dtype=dtype) * (2 * math.pi)


def rotate_about_pivot(p: torch.Tensor, theta, d: float = CAMERA_DISTANCE) -> torch.Tensor:
    """Поворачивает позу вокруг вертикальной оси, проходящей через (0, 0, d).

    theta — скаляр или тензор формы (B,) для позы (B, N, 3).
    """
    theta = torch.as_tensor(theta, dtype=p.dtype, device=p.device)
    rot = rotation_matrix_y(theta)
    pivot = p.new_tensor([0.0, 0.0, d])
    return torch.matmul(p - pivot, rot) + pivot


def weak_project(p: torch.Tensor, cam: torch.Tensor) -> torch.Tensor:
    """Слабоперспективная проекция: каждый сустав x_i = K X_i, K формы (..., 2, 3)."""
    return torch.matmul(p, cam.transpose(-1, -2))


def normalize_to_root(p: torch.Tensor, root_index: int, target: float) -> torch.Tensor:
    """Центрирует позу (..., N, D) в корне и масштабирует до среднего расстояния target.

    Дифференцируемый аналог предобработки данных; вырожденная поза остаётся нулевой.
    """
    centered = p - p[..., root_index : root_index + 1, :]
    others = torch.cat([centered[..., :root_index, :], centered[..., root_index + 1 :, :]], dim=-2)
    mean = torch.linalg.vector_norm(others, dim=-1).mean(-1)
    return centered * (target / mean.clamp_min(_NORM_EPS))[..., None, None]


def camera_from_vector(vec: torch.Tensor) -> torch.Tensor:
    """Выход сети из 6 чисел построчно превращается в K (2x3)."""
    return vec.reshape(*vec.shape[:-1], 2, 3)


def camera_scale(cam: torch.Tensor) -> torch.Tensor:
    """s = sqrt(trace(K Kᵀ) / 2)."""
    trace = (cam * cam).sum(dim=(-2, -1))
    if bool((trace == 0).any()):
        raise CameraDomainError("Масштаб не определён для нулевой камеры.")
    return torch.sqrt(trace / 2)
