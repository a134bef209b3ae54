"""Нормализация 2D/3D поз относительно корневого сустава (бедра).

2D-позы приводятся к среднему расстоянию 1/d от остальных суставов до корня
(камера с f = 1 на расстоянии d от скелета), 3D-позы — к среднему расстоянию 1.
"""

import numpy as np

from src.config import CAMERA_DISTANCE, logger
from src.data.skeleton import Skeleton
from src.errors import DegenerateInputError

log = logger.getChild("preprocessing")

_DEGENERATE_EPS = 1e-12


def mean_root_distance(poses: np.ndarray, root_index: int) -> np.ndarray:
    """Среднее расстояние некорневых суставов до корня для каждого кадра."""
    poses = np.asarray(poses, dtype=np.float64)
    dist = np.linalg.norm(poses - poses[..., root_index : root_index + 1, :], axis=-1)
    mask = np.ones(poses.shape[-2], dtype=bool)
    mask[root_index] = False
    return dist[..., mask].mean(axis=-1)


def normalize_root_distance(poses: np.ndarray, root_index: int, target: float) -> np.ndarray:
    """Центрирует позы в корне и масштабирует до среднего расстояния target.

    Принимает массив формы (..., N, D). Вырожденные кадры (все суставы в корне)
    отклоняются DegenerateInputError с номерами кадров.
    """
    poses = np.asarray(poses, dtype=np.float64)
    centered = poses - poses[..., root_index : root_index + 1, :]
    mean = mean_root_distance(centered, root_index)
    bad = ~(mean > _DEGENERATE_EPS)
    if np.any(bad):
        frames = np.flatnonzero(np.atleast_1d(bad)).tolist()
        raise DegenerateInputError(f"Вырожденная поза: все суставы совпадают с корнем (кадры {frames[:10]}).")
    return centered * (target / mean)[..., None, None]


def preprocess_2d(raw: np.ndarray, skeleton: Skeleton, d: float = CAMERA_DISTANCE) -> np.ndarray:
    return normalize_root_distance(raw, skeleton.root_index, 1.0 / d)


def preprocess_3d(raw: np.ndarray, skeleton: Skeleton) -> np.ndarray:
    # Только для оценки: в обучении 3D не используется.
    return normalize_root_distance(raw, skeleton.root_index, 1.0)


def degenerate_mask(poses: np.ndarray, root_index: int) -> np.ndarray:
    return ~(mean_root_distance(poses, root_index) > _DEGENERATE_EPS)
