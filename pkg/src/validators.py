from typing import Sequence

import numpy as np
import torch

from src.config import MAX_KEYPOINT_FRAMES, MAX_PLOT_VIEWS
from src.errors import ConfigurationError, NumericFaultError, SchemaError


def check_pose_shape(pose, num_joints: int, dims: int) -> None:
    shape = tuple(pose.shape)
    if len(shape) < 2 or shape[-2:] != (num_joints, dims):
        raise SchemaError(
            f"Ожидалась поза формы (..., {num_joints}, {dims}), получено {shape}."
        )


def check_positive_count(count: int, name: str) -> None:
    if count <= 0:
        raise ConfigurationError(f"Параметр {name} должен быть положительным (получено {count}).")


def check_set_size(size: int, name: str, minimum: int = 2) -> None:
    if size < minimum:
        raise ConfigurationError(
            f"Набор {name} должен содержать не менее {minimum} поз (получено {size})."
        )


def check_same_length(a: Sequence, b: Sequence, what: str) -> None:
    if len(a) != len(b):
        raise ConfigurationError(f"Длины {what} не совпадают: {len(a)} и {len(b)}.")


def check_frame_limit(count: int) -> None:
    if count > MAX_KEYPOINT_FRAMES:
        raise SchemaError(f"Слишком много кадров ({count}), максимум {MAX_KEYPOINT_FRAMES}.")


def check_plot_views(views: Sequence[float]) -> None:
    if not views:
        raise ConfigurationError("Нужен хотя бы один угол обзора.")
    if len(views) > MAX_PLOT_VIEWS:
        raise ConfigurationError(f"Слишком много ракурсов ({len(views)}), максимум {MAX_PLOT_VIEWS}.")


def check_finite(value, where: str, step: int | None = None) -> None:
    """Бросает NumericFaultError, если в тензоре/массиве есть NaN или inf."""
    if isinstance(value, torch.Tensor):
        ok = bool(torch.isfinite(value).all())
    else:
        ok = bool(np.isfinite(np.asarray(value)).all())
    if not ok:
        raise NumericFaultError(where, step=step)
