"""Синтетические сочленённые позы для проверки обучения без лицензионных данных.

Поза строится прямой кинематикой с фиксированными длинами костей (в единицах
SYNTHETIC_SCALE_MM мм) и углами суставов в анатомических пределах. Масштаб тела
один на весь набор, так что длины костей не меняются от кадра к кадру. Кадры,
где лицо «смотрит» не туда (sin β < порога), отбрасываются повторной выборкой,
поэтому синтетика лежит внутри области, которую предполагает L_angle.
"""

import math
from typing import Dict, Optional, Sequence

import numpy as np

from src.config import CAMERA_DISTANCE, MIN_DEPTH, SYNTHETIC_SCALE_MM, logger
from src.data.dataset import PoseDataset
from src.data.skeleton import CANONICAL_JOINTS, CANONICAL_SKELETON, Skeleton
from src.errors import SchemaError
from src.geometry import perspective_project
from src.validators import check_positive_count

log = logger.getChild("synthetic")

# Длины костей (мм)
_BONE_MM: Dict[str, float] = {
    "spine": 230.0,
    "neck": 250.0,
    "nose": 110.0,
    "head_top": 120.0,
    "shoulder": 150.0,
    "upper_arm": 280.0,
    "forearm": 250.0,
    "hip": 130.0,
    "thigh": 440.0,
    "shin": 430.0,
}

_UP = np.array([0.0, 1.0, 0.0])
_DOWN = -_UP
_FORWARD = np.array([0.0, 0.0, 1.0])
_LEFT = np.cross(_UP, _FORWARD)

ORIENTATION_MARGIN = 0.05
_MAX_ATTEMPTS = 1000


def _rx(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rz(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


def bone_lengths() -> Dict[str, float]:
    """Длины костей в единицах SYNTHETIC_SCALE_MM."""
    return {k: v / SYNTHETIC_SCALE_MM for k, v in _BONE_MM.items()}


def default_sweep(views: int = 8) -> list[float]:
    check_positive_count(views, "views")
    return [2 * math.pi * k / views for k in range(views)]


def _sample_body(rng: np.random.Generator, lengths: Dict[str, float]) -> Dict[str, np.ndarray]:
    L = lengths
    twist = rng.uniform(-0.3, 0.3)
    torso = _ry(twist) @ _rx(rng.uniform(-0.2, 0.6)) @ _rz(rng.uniform(-0.2, 0.2))
    pelvis = _ry(0.3 * twist)
    head = torso @ _ry(rng.uniform(-0.8, 0.8)) @ _rx(rng.uniform(-0.4, 0.5))

    j: Dict[str, np.ndarray] = {"hip": np.zeros(3)}
    j["spine"] = torso @ _UP * L["spine"]
    j["neck"] = j["spine"] + torso @ _UP * L["neck"]
    # нос впереди шеи: это и задаёт знак sin β
    j["nose"] = j["neck"] + head @ _unit([0.0, 0.5, 1.0]) * L["nose"]
    j["head_top"] = j["nose"] + head @ _unit([0.0, 1.0, -0.35]) * L["head_top"]

    for side, sign in (("l", 1.0), ("r", -1.0)):
        shoulder = j["neck"] + sign * (torso @ _LEFT) * L["shoulder"]
        flex, abd, elbow = rng.uniform(-0.6, 2.6), rng.uniform(0.0, 1.6), rng.uniform(0.0, 2.3)
        arm = torso @ _rz(sign * abd)
        j[f"{side}_shoulder"] = shoulder
        j[f"{side}_elbow"] = shoulder + arm @ _rx(-flex) @ _DOWN * L["upper_arm"]
        j[f"{side}_wrist"] = j[f"{side}_elbow"] + arm @ _rx(-(flex + elbow)) @ _DOWN * L["forearm"]

        hip = sign * (pelvis @ _LEFT) * L["hip"]
        hflex, habd, knee = rng.uniform(-0.4, 1.6), rng.uniform(-0.1, 0.5), rng.uniform(0.0, 2.0)
        leg = pelvis @ _rz(sign * habd)
        j[f"{side}_hip"] = hip
        j[f"{side}_knee"] = hip + leg @ _rx(-hflex) @ _DOWN * L["thigh"]
        j[f"{side}_ankle"] = j[f"{side}_knee"] + leg @ _rx(-(hflex - knee)) @ _DOWN * L["shin"]
    return j


def orientation_sine(pose: np.ndarray, skeleton: Skeleton) -> np.ndarray:
    """sin β между вектором лица и вектором плеч в плоскости z-x."""
    nose, neck, ls, rs = skeleton.orientation_joints
    v = pose[..., nose, :] - pose[..., neck, :]
    w = pose[..., ls, :] - pose[..., rs, :]
    num = v[..., 2] * w[..., 0] - v[..., 0] * w[..., 2]
    return num / (np.linalg.norm(v, axis=-1) * np.linalg.norm(w, axis=-1))


def synthesize_poses(
    count: int,
    seed: int,
    skeleton: Skeleton = CANONICAL_SKELETON,
    camera_sweep: Optional[Sequence[float]] = None,
    d: float = CAMERA_DISTANCE,
    subjects: int = 1,
    azimuth_jitter: float = 0.25,
) -> PoseDataset:
    """Генерирует count поз, повёрнутых по азимутам camera_sweep и поставленных на глубину d.

    3D-кадры хранятся в системе камеры (корень в (0, 0, d), единица длины SYNTHETIC_SCALE_MM мм),
    2D-кадры — их перспективная проекция. Результат детерминирован по seed.
    """
    check_positive_count(count, "count")
    check_positive_count(subjects, "subjects")
    missing = set(CANONICAL_JOINTS) - set(skeleton.joint_names)
    if missing:
        raise SchemaError(f"Генератор требует суставы канонического скелета, нет: {sorted(missing)}.")
    sweep = list(camera_sweep) if camera_sweep else default_sweep()

    rng = np.random.default_rng(seed)
    lengths = bone_lengths()
    frames = np.empty((count, skeleton.num_joints, 3))
    actions = []
    rejected = 0
    for i in range(count):
        azimuth = sweep[i % len(sweep)]
        for _ in range(_MAX_ATTEMPTS):
            body = _sample_body(rng, lengths)
            pose = np.stack([body[name] for name in skeleton.joint_names])
            yaw = azimuth + rng.uniform(-azimuth_jitter, azimuth_jitter)
            pose = pose @ _ry(yaw).T + np.array([0.0, 0.0, d])
            if orientation_sine(pose, skeleton) >= ORIENTATION_MARGIN and (pose[:, 2] > MIN_DEPTH).all():
                break
            rejected += 1
        else:
            raise RuntimeError("Не удалось сгенерировать допустимую позу")
        frames[i] = pose
        actions.append(f"azimuth_{int(round(math.degrees(azimuth))) % 360:03d}")

    log.debug("Синтетика: %d поз, отклонено %d выборок", count, rejected)
    return PoseDataset(
        skeleton=skeleton,
        frames2d=perspective_project(frames),
        frames3d=frames,
        subjects=tuple(f"S{i % subjects + 1}" for i in range(count)),
        actions=tuple(actions),
        scale_mm=SYNTHETIC_SCALE_MM,
    )
