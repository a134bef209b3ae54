"""Метрики оценки 3D-поз: P-MPJPE, MPJPE, PCK@150мм и AUC.

Предсказания и разметка сравниваются в нормализованных единицах
(корень в нуле, среднее расстояние до корня 1) и переводятся в миллиметры
множителем gt_scale_mm набора данных.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, Field
from torch import nn

from src.config import AUC_GRID_STEP_MM, CAMERA_DISTANCE, MIN_DEPTH, PCK_THRESHOLD_MM, logger
from src.data.dataset import PoseDataset
from src.data.preprocessing import preprocess_3d
from src.errors import ConfigurationError, SchemaError
from src.networks import lift_poses
from src.validators import check_same_length

log = logger.getChild("evaluation")

EXACT_MATCH_MM = 1e-6


def threshold_grid(max_mm: float = PCK_THRESHOLD_MM, step_mm: float = AUC_GRID_STEP_MM) -> np.ndarray:
    """0..max_mm включительно с шагом step_mm (по умолчанию 31 точка)."""
    count = int(round(max_mm / step_mm)) + 1
    return np.linspace(0.0, max_mm, count)


@dataclass
class AlignmentResult:
    """aligned = scale * pred @ rotation + translation."""

    rotation: np.ndarray
    scale: float
    translation: np.ndarray
    aligned: np.ndarray
    degenerate: bool = False


def _similarity(pred: np.ndarray, gt: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Пакетное решение задачи Прокруста с масштабом для (F, N, 3)."""
    mu_p = pred.mean(axis=-2, keepdims=True)
    mu_g = gt.mean(axis=-2, keepdims=True)
    x0 = pred - mu_p
    y0 = gt - mu_g
    norm_x = (x0**2).sum(axis=(-2, -1))
    h = np.swapaxes(x0, -1, -2) @ y0
    u, s, vt = np.linalg.svd(h)
    # запрещаем отражение: det(R) = +1
    sign = np.where(np.linalg.det(u @ vt) < 0, -1.0, 1.0)
    u[..., :, -1] *= sign[..., None]
    s[..., -1] *= sign
    rot = u @ vt
    degenerate = norm_x <= 1e-24
    scale = np.where(degenerate, 1.0, s.sum(axis=-1) / np.where(degenerate, 1.0, norm_x))
    rot = np.where(degenerate[..., None, None], np.eye(3), rot)
    trans = mu_g - scale[..., None, None] * (mu_p @ rot)
    aligned = scale[..., None, None] * (pred @ rot) + trans
    rank_deficient = np.linalg.matrix_rank(x0) < 2
    return rot, scale, trans[..., 0, :], aligned, degenerate | rank_deficient


def procrustes_align(pred: np.ndarray, gt: np.ndarray) -> AlignmentResult:
    """Оптимальное преобразование подобия pred на gt (вращение, масштаб, сдвиг)."""
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape or pred.ndim != 2 or pred.shape[0] < 3:
        raise SchemaError(f"Ожидаются позы одинаковой формы (N>=3, 3), получено {pred.shape} и {gt.shape}.")
    rot, scale, trans, aligned, degenerate = (v[0] for v in _similarity(pred[None], gt[None]))
    if degenerate:
        log.debug("Вырожденная поза при выравнивании: результат приближённый")
    return AlignmentResult(rotation=rot, scale=float(scale), translation=trans, aligned=aligned, degenerate=bool(degenerate))


def _check_pair(preds, gts) -> Tuple[np.ndarray, np.ndarray]:
    check_same_length(preds, gts, "предсказаний и разметки")
    preds = np.asarray(preds, dtype=np.float64)
    gts = np.asarray(gts, dtype=np.float64)
    if preds.size == 0:
        raise ConfigurationError("Пустой набор для оценки.")
    if preds.shape != gts.shape:
        raise SchemaError(f"Формы предсказаний {preds.shape} и разметки {gts.shape} не совпадают.")
    return preds, gts


def joint_errors(preds, gts, gt_scale_mm: float = 1.0, aligned: bool = True) -> np.ndarray:
    """Ошибки (F, N) в миллиметрах, с выравниванием подобия или без."""
    preds, gts = _check_pair(preds, gts)
    if aligned:
        preds = _similarity(preds, gts)[3]
    return np.linalg.norm(preds - gts, axis=-1) * gt_scale_mm


def p_mpjpe(preds, gts, gt_scale_mm: float = 1.0) -> float:
    return float(joint_errors(preds, gts, gt_scale_mm, aligned=True).mean(axis=-1).mean())


def mpjpe(preds, gts, gt_scale_mm: float = 1.0) -> float:
    return float(joint_errors(preds, gts, gt_scale_mm, aligned=False).mean(axis=-1).mean())


def pck_curve(errors: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Доля суставов с ошибкой строго меньше порога, в процентах, для каждого порога.

    Точное совпадение (ошибка не больше EXACT_MATCH_MM) верно при любом пороге, включая 0.
    """
    errors = np.asarray(errors).reshape(-1)
    exact = errors <= EXACT_MATCH_MM
    return np.array([((errors < t) | exact).mean() * 100.0 for t in grid])


def pck_auc(
    preds,
    gts,
    threshold_mm: float = PCK_THRESHOLD_MM,
    grid: Optional[np.ndarray] = None,
    gt_scale_mm: float = 1.0,
    aligned: bool = True,
) -> Tuple[float, float]:
    """(PCK@threshold в процентах, AUC как средняя доля по сетке порогов)."""
    errors = joint_errors(preds, gts, gt_scale_mm, aligned=aligned)
    grid = threshold_grid() if grid is None else np.asarray(grid)
    pck = float(pck_curve(errors, [threshold_mm])[0])
    auc = float(pck_curve(errors, grid).mean() / 100.0)
    return pck, auc


class MetricReport(BaseModel):
    frames: int
    p_mpjpe: float
    mpjpe: float
    pck150: float = Field(ge=0.0, le=100.0)
    auc: float = Field(ge=0.0, le=1.0)
    pck150_abs: float = Field(ge=0.0, le=100.0)
    auc_abs: float = Field(ge=0.0, le=1.0)
    threshold_grid: List[float]
    per_joint: Dict[str, float]
    per_action: Optional[Dict[str, float]] = None

    def summary(self) -> str:
        return (
            f"frames={self.frames} P-MPJPE={self.p_mpjpe:.1f}mm MPJPE={self.mpjpe:.1f}mm "
            f"PCK@150={self.pck150:.1f}% AUC={self.auc:.3f} (без выравнивания: PCK={self.pck150_abs:.1f}% AUC={self.auc_abs:.3f})"
        )

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            yaml.safe_dump(self.model_dump(), fh, sort_keys=False, allow_unicode=True)
        return path


def metric_report(
    preds: np.ndarray,
    gts: np.ndarray,
    joint_names,
    gt_scale_mm: float,
    actions: Optional[Tuple[str, ...]] = None,
) -> MetricReport:
    """Полный отчёт по нормализованным позам (F, N, 3)."""
    grid = threshold_grid()
    aligned_err = joint_errors(preds, gts, gt_scale_mm, aligned=True)
    raw_err = joint_errors(preds, gts, gt_scale_mm, aligned=False)
    per_action = None
    if actions is not None:
        labels = np.asarray(actions)
        per_action = {
            str(a): float(aligned_err[labels == a].mean()) for a in sorted(set(actions))
        }
    return MetricReport(
        frames=len(preds),
        p_mpjpe=float(aligned_err.mean()),
        mpjpe=float(raw_err.mean()),
        pck150=float(pck_curve(aligned_err, [PCK_THRESHOLD_MM])[0]),
        auc=float(pck_curve(aligned_err, grid).mean() / 100.0),
        pck150_abs=float(pck_curve(raw_err, [PCK_THRESHOLD_MM])[0]),
        auc_abs=float(pck_curve(raw_err, grid).mean() / 100.0),
        threshold_grid=grid.tolist(),
        per_joint={name: float(aligned_err[:, j].mean()) for j, name in enumerate(joint_names)},
        per_action=per_action,
    )


def evaluate_model(
    generator: nn.Module,
    dataset: PoseDataset,
    gt_scale_mm: Optional[float] = None,
    d: float = CAMERA_DISTANCE,
    min_depth: float = MIN_DEPTH,
) -> MetricReport:
    """Поднимает 2D-кадры предобработанного набора и сравнивает с его 3D-разметкой.

    Предсказания приводятся к той же нормализации, что и разметка (preprocess_3d).
    """
    if not dataset.has_3d:
        raise SchemaError("Для оценки нужна 3D-разметка.")
    scale = gt_scale_mm if gt_scale_mm is not None else dataset.scale_mm
    if scale is None:
        raise ConfigurationError("scale_mm: масштаб разметки в миллиметрах не задан.")
    poses, _ = lift_poses(generator, dataset.frames2d, d, min_depth)
    preds = preprocess_3d(poses, dataset.skeleton)
    return metric_report(preds, dataset.frames3d, dataset.skeleton.joint_names, scale, dataset.actions)
