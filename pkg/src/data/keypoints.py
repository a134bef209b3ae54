"""Чтение и запись файлов ключевых точек.

Формат: текст с разделителем, один кадр на строку, заголовок из колонок
`<joint>_x,<joint>_y[,<joint>_z]` и необязательных `subject`, `action`.
Если есть z-колонки, строка хранит 3D-позу в системе камеры, а 2D-кадр
получается перспективной проекцией (f = 1); строки с z <= 0 пропускаются.
Строки-комментарии начинаются с `#`; комментарий `# scale_mm=<value>`
задаёт масштаб нормализованных единиц в миллиметрах.
"""

import csv
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.config import logger
from src.data.dataset import PoseDataset
from src.data.skeleton import CANONICAL_SKELETON, Skeleton
from src.errors import SchemaError
from src.geometry import perspective_project
from src.metrics import SKIPPED_FRAMES
from src.validators import check_frame_limit

log = logger.getChild("keypoints")

LABEL_COLUMNS = ("subject", "action")
_AXES = ("x", "y", "z")


def _parse_header(header: List[str], skeleton: Skeleton) -> Tuple[Dict[Tuple[int, int], int], int, Dict[str, int]]:
    """Сопоставляет колонки суставам канонического порядка.

    Returns:
        (колонка для (сустав, ось), размерность 2 или 3, колонки меток)
    """
    columns: Dict[Tuple[int, int], int] = {}
    labels: Dict[str, int] = {}
    for col, raw_name in enumerate(header):
        name = raw_name.strip()
        if name in LABEL_COLUMNS:
            labels[name] = col
            continue
        joint, sep, axis = name.rpartition("_")
        if not sep or axis not in _AXES:
            raise SchemaError(f"Некорректное имя колонки '{name}': ожидается <joint>_x|_y|_z.")
        if joint not in skeleton.joint_names:
            raise SchemaError(f"Сустав '{joint}' отсутствует в скелете.")
        key = (skeleton.index(joint), _AXES.index(axis))
        if key in columns:
            raise SchemaError(f"Колонка '{name}' повторяется.")
        columns[key] = col

    joints = {j for j, _ in columns}
    if len(joints) != skeleton.num_joints:
        raise SchemaError(
            f"В файле {len(joints)} суставов, в скелете {skeleton.num_joints}."
        )
    dims = 3 if any(a == 2 for _, a in columns) else 2
    for j in range(skeleton.num_joints):
        for a in range(dims):
            if (j, a) not in columns:
                raise SchemaError(
                    f"Нет колонки {skeleton.joint_names[j]}_{_AXES[a]}: все суставы должны иметь одинаковые оси."
                )
    return columns, dims, labels


def load_dataset(
    path: str | Path,
    skeleton: Skeleton = CANONICAL_SKELETON,
    delimiter: str = ",",
) -> PoseDataset:
    """Загружает файл ключевых точек в PoseDataset.

    Строки с пропущенными или нечисловыми координатами пропускаются,
    их количество сохраняется в PoseDataset.skipped.

    Raises:
        SchemaError: неизвестный сустав, несовпадение числа суставов, нет заголовка.
    """
    path = Path(path)
    scale_mm: Optional[float] = None
    header: Optional[List[str]] = None
    rows2d: List[np.ndarray] = []
    rows3d: List[np.ndarray] = []
    subjects: List[str] = []
    actions: List[str] = []
    skipped = 0
    n = skeleton.num_joints

    with path.open(newline="", encoding="utf-8") as fh:
        data_lines = []
        for line in fh:
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                key, sep, value = stripped.lstrip("#").strip().partition("=")
                if sep and key.strip() == "scale_mm":
                    scale_mm = float(value)
                continue
            data_lines.append(stripped)

    reader = csv.reader(data_lines, delimiter=delimiter)
    for row in reader:
        if header is None:
            header = row
            columns, dims, labels = _parse_header(header, skeleton)
            continue
        if len(row) != len(header):
            skipped += 1
            continue
        try:
            coords = np.empty((n, dims), dtype=np.float64)
            for (j, a), col in columns.items():
                coords[j, a] = float(row[col])
        except ValueError:
            skipped += 1
            continue
        if not np.isfinite(coords).all() or (dims == 3 and (coords[:, 2] <= 0).any()):
            skipped += 1
            continue
        if dims == 3:
            rows3d.append(coords)
            rows2d.append(perspective_project(coords))
        else:
            rows2d.append(coords)
        if "subject" in labels:
            subjects.append(row[labels["subject"]].strip())
        if "action" in labels:
            actions.append(row[labels["action"]].strip())

    if header is None:
        # Пустой файл: пустой набор без 3D
        return PoseDataset(skeleton=skeleton, frames2d=np.zeros((0, n, 2)), scale_mm=scale_mm)

    check_frame_limit(len(rows2d))
    if skipped:
        log.warning("Файл %s: пропущено строк с ошибками: %d", path, skipped)
        SKIPPED_FRAMES.labels(reason="malformed").inc(skipped)

    return PoseDataset(
        skeleton=skeleton,
        frames2d=np.array(rows2d).reshape(-1, n, 2),
        frames3d=np.array(rows3d).reshape(-1, n, 3) if dims == 3 else None,
        subjects=tuple(subjects) if "subject" in labels else None,
        actions=tuple(actions) if "action" in labels else None,
        scale_mm=scale_mm,
        skipped=skipped,
    )


def keypoint_header(skeleton: Skeleton, dims: int) -> List[str]:
    return [f"{name}_{axis}" for name in skeleton.joint_names for axis in _AXES[:dims]]


def _fmt(value: float) -> str:
    # repr даёт кратчайшую запись, восстанавливающую float без потерь
    value = float(value)
    return repr(value) if math.isfinite(value) else "nan"


def save_dataset(dataset: PoseDataset, path: str | Path, delimiter: str = ",") -> Path:
    """Записывает набор в формате ключевых точек.

    При наличии 3D пишутся только 3D-позы: 2D восстанавливается проекцией при чтении,
    поэтому сохранять имеет смысл сырые (не нормализованные) наборы.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dims = 3 if dataset.has_3d else 2
    header = keypoint_header(dataset.skeleton, dims)
    if dataset.subjects is not None:
        header.append("subject")
    if dataset.actions is not None:
        header.append("action")

    with path.open("w", newline="", encoding="utf-8") as fh:
        if dataset.scale_mm is not None:
            fh.write(f"# scale_mm={_fmt(dataset.scale_mm)}\n")
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(header)
        for i in range(len(dataset)):
            coords = dataset.frames3d[i] if dims == 3 else dataset.frames2d[i]
            row = [_fmt(v) for v in coords.reshape(-1)]
            if dataset.subjects is not None:
                row.append(dataset.subjects[i])
            if dataset.actions is not None:
                row.append(dataset.actions[i])
            writer.writerow(row)
    return path


CAMERA_COLUMNS = ("k11", "k12", "k13", "k21", "k22", "k23")


def save_cameras(cameras: np.ndarray, path: str | Path, delimiter: str = ",") -> Path:
    """Пишет камеры (F, 2, 3) построчно: одна строка на кадр."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(CAMERA_COLUMNS)
        for cam in np.asarray(cameras).reshape(-1, 6):
            writer.writerow([_fmt(v) for v in cam])
    return path
