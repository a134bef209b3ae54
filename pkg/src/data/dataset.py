"""Набор поз: 2D-кадры, опциональная 3D-разметка и метки субъектов/действий."""

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Tuple

import numpy as np

from src.config import CAMERA_DISTANCE, logger
from src.data.preprocessing import degenerate_mask, preprocess_2d, preprocess_3d
from src.data.skeleton import Skeleton
from src.errors import SchemaError
from src.metrics import SKIPPED_FRAMES
from src.validators import check_pose_shape

log = logger.getChild("dataset")


def _frozen(array: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if array is None:
        return None
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PoseDataset:
    skeleton: Skeleton
    frames2d: np.ndarray
    frames3d: Optional[np.ndarray] = None
    subjects: Optional[Tuple[str, ...]] = None
    actions: Optional[Tuple[str, ...]] = None
    scale_mm: Optional[float] = None
    skipped: int = field(default=0, compare=False)

    def __post_init__(self):
        n = self.skeleton.num_joints
        frames2d = _frozen(np.asarray(self.frames2d).reshape(-1, n, 2))
        object.__setattr__(self, "frames2d", frames2d)
        if self.frames3d is not None:
            frames3d = _frozen(np.asarray(self.frames3d).reshape(-1, n, 3))
            if len(frames3d) != len(frames2d):
                raise SchemaError(
                    f"3D-разметка ({len(frames3d)} кадров) не совпадает с 2D ({len(frames2d)} кадров)."
                )
            object.__setattr__(self, "frames3d", frames3d)
        for name in ("subjects", "actions"):
            labels = getattr(self, name)
            if labels is not None:
                labels = tuple(labels)
                if len(labels) != len(frames2d):
                    raise SchemaError(f"Число меток {name} не совпадает с числом кадров.")
                object.__setattr__(self, name, labels)
        check_pose_shape(self.frames2d, n, 2)

    def __len__(self) -> int:
        return len(self.frames2d)

    @property
    def has_3d(self) -> bool:
        return self.frames3d is not None

    def take(self, indices: Iterable[int]) -> "PoseDataset":
        idx = np.asarray(list(indices), dtype=np.int64)
        return replace(
            self,
            frames2d=self.frames2d[idx],
            frames3d=None if self.frames3d is None else self.frames3d[idx],
            subjects=None if self.subjects is None else tuple(self.subjects[i] for i in idx),
            actions=None if self.actions is None else tuple(self.actions[i] for i in idx),
        )

    def select(self, subjects: Iterable[str]) -> "PoseDataset":
        """Оставляет кадры указанных субъектов (протокол S1,S5,S6,S7,S8 / S9,S11)."""
        wanted = set(subjects)
        if self.subjects is None:
            raise SchemaError("В наборе нет меток субъектов, фильтр по субъектам невозможен.")
        return self.take(i for i, s in enumerate(self.subjects) if s in wanted)

    def holdout(self, fraction: float, seed: int) -> Tuple["PoseDataset", "PoseDataset"]:
        """Детерминированно отделяет долю кадров для оценки во время обучения."""
        n_hold = int(round(len(self) * fraction))
        if n_hold == 0 or n_hold >= len(self):
            return self, self.take([])
        order = np.random.default_rng(seed).permutation(len(self))
        return self.take(np.sort(order[n_hold:])), self.take(np.sort(order[:n_hold]))

    def preprocessed(self, d: float = CAMERA_DISTANCE) -> "PoseDataset":
        """Нормализует все кадры; вырожденные кадры отбрасываются с подсчётом."""
        root = self.skeleton.root_index
        bad = degenerate_mask(self.frames2d, root)
        if self.frames3d is not None:
            bad |= degenerate_mask(self.frames3d, root)
        dropped = int(bad.sum())
        source = self
        if dropped:
            log.warning("Отброшено вырожденных кадров при предобработке: %d", dropped)
            SKIPPED_FRAMES.labels(reason="degenerate").inc(dropped)
            source = self.take(np.flatnonzero(~bad))
        if len(source) == 0:
            return replace(source, skipped=self.skipped + dropped)
        return replace(
            source,
            frames2d=preprocess_2d(source.frames2d, self.skeleton, d),
            frames3d=None if source.frames3d is None else preprocess_3d(source.frames3d, self.skeleton),
            skipped=self.skipped + dropped,
        )
