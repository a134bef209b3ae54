"""Каноническая топология скелета."""

from typing import Literal, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

BoneSide = Literal["left", "right", "center"]


class Skeleton(BaseModel):
    """Именованные суставы, рёбра костей, симметричные пары и суставы ориентации.

    symmetric_pairs хранит пары индексов рёбер (левая кость, правая кость),
    orientation_joints — индексы носа, шеи, левого и правого плеча.
    """

    model_config = ConfigDict(frozen=True)

    joint_names: Tuple[str, ...]
    root_index: int
    bone_edges: Tuple[Tuple[int, int], ...]
    symmetric_pairs: Tuple[Tuple[int, int], ...]
    orientation_joints: Tuple[int, int, int, int]

    @model_validator(mode="after")
    def _check_topology(self) -> "Skeleton":
        n = len(self.joint_names)
        if len(set(self.joint_names)) != n:
            raise ValueError("Имена суставов должны быть уникальными.")
        if not 0 <= self.root_index < n:
            raise ValueError(f"Корневой индекс {self.root_index} вне диапазона [0, {n}).")
        for parent, child in self.bone_edges:
            if not (0 <= parent < n and 0 <= child < n) or parent == child:
                raise ValueError(f"Некорректное ребро ({parent}, {child}).")
        for left, right in self.symmetric_pairs:
            if left == right:
                raise ValueError("Симметричная пара должна ссылаться на две разные кости.")
            if not (0 <= left < len(self.bone_edges) and 0 <= right < len(self.bone_edges)):
                raise ValueError(f"Симметричная пара ({left}, {right}) ссылается на несуществующее ребро.")
        if len(set(self.orientation_joints)) != 4:
            raise ValueError("Суставы ориентации должны быть четырьмя разными индексами.")
        if not all(0 <= j < n for j in self.orientation_joints):
            raise ValueError("Сустав ориентации вне диапазона.")
        return self

    @property
    def num_joints(self) -> int:
        return len(self.joint_names)

    def index(self, name: str) -> int:
        return self.joint_names.index(name)

    def bone_side(self, edge_index: int) -> BoneSide:
        for left, right in self.symmetric_pairs:
            if edge_index == left:
                return "left"
            if edge_index == right:
                return "right"
        return "center"


CANONICAL_JOINTS = (
    "hip",
    "spine",
    "neck",
    "nose",
    "head_top",
    "l_shoulder",
    "l_elbow",
    "l_wrist",
    "r_shoulder",
    "r_elbow",
    "r_wrist",
    "l_hip",
    "l_knee",
    "l_ankle",
    "r_hip",
    "r_knee",
    "r_ankle",
)


def _edge(a: str, b: str) -> Tuple[int, int]:
    return CANONICAL_JOINTS.index(a), CANONICAL_JOINTS.index(b)


_CANONICAL_EDGES = (
    _edge("hip", "spine"),
    _edge("spine", "neck"),
    _edge("neck", "nose"),
    _edge("nose", "head_top"),
    _edge("neck", "l_shoulder"),      # 4
    _edge("l_shoulder", "l_elbow"),
    _edge("l_elbow", "l_wrist"),
    _edge("neck", "r_shoulder"),      # 7
    _edge("r_shoulder", "r_elbow"),
    _edge("r_elbow", "r_wrist"),
    _edge("hip", "l_hip"),            # 10
    _edge("l_hip", "l_knee"),
    _edge("l_knee", "l_ankle"),
    _edge("hip", "r_hip"),            # 13
    _edge("r_hip", "r_knee"),
    _edge("r_knee", "r_ankle"),
)

CANONICAL_SKELETON = Skeleton(
    joint_names=CANONICAL_JOINTS,
    root_index=0,
    bone_edges=_CANONICAL_EDGES,
    symmetric_pairs=((4, 7), (5, 8), (6, 9), (10, 13), (11, 14), (12, 15)),
    orientation_joints=(
        CANONICAL_JOINTS.index("nose"),
        CANONICAL_JOINTS.index("neck"),
        CANONICAL_JOINTS.index("l_shoulder"),
        CANONICAL_JOINTS.index("r_shoulder"),
    ),
)
