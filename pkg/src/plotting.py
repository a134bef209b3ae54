"""Отрисовка 3D-скелета с нескольких азимутов (matplotlib, без окна)."""

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from src.data.skeleton import Skeleton  # noqa: E402
from src.validators import check_plot_views, check_pose_shape  # noqa: E402

SIDE_COLORS = {"left": "#1f77b4", "right": "#d62728", "center": "#7f7f7f"}


def pose_figure(
    pose: np.ndarray,
    skeleton: Skeleton,
    azimuths: Sequence[float],
    elevation: float = 15.0,
    title: Optional[str] = None,
) -> Figure:
    """Фигура с одной 3D-панелью на каждый азимут (в градусах).

    Поза в системе камеры центрируется по корню; ось Y камеры рисуется вертикально.
    """
    check_plot_views(azimuths)
    pose = np.asarray(pose, dtype=np.float64)
    check_pose_shape(pose, skeleton.num_joints, 3)
    centered = pose - pose[skeleton.root_index]
    # оси графика: x -> X, y -> Z (глубина), z -> Y (вверх)
    xs, ys, zs = centered[:, 0], centered[:, 2], centered[:, 1]
    radius = float(np.abs(centered).max()) or 1.0

    fig = plt.figure(figsize=(4 * len(azimuths), 4))
    for k, azimuth in enumerate(azimuths):
        ax = fig.add_subplot(1, len(azimuths), k + 1, projection="3d")
        for e, (a, b) in enumerate(skeleton.bone_edges):
            ax.plot(
                [xs[a], xs[b]], [ys[a], ys[b]], [zs[a], zs[b]],
                color=SIDE_COLORS[skeleton.bone_side(e)], linewidth=2,
            )
        ax.scatter(xs, ys, zs, s=8, c="black")
        ax.view_init(elev=elevation, azim=azimuth)
        ax.set_xlim(-radius, radius)
        ax.set_ylim(-radius, radius)
        ax.set_zlim(-radius, radius)
        ax.set_xlabel("X")
        ax.set_ylabel("Z")
        ax.set_zlabel("Y")
        ax.set_title(f"azim {azimuth:g}°")
    if title:
        fig.suptitle(title)
    return fig


def render_pose(
    pose: np.ndarray,
    skeleton: Skeleton,
    path: str | Path,
    azimuths: Sequence[float],
    elevation: float = 15.0,
    title: Optional[str] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig = pose_figure(pose, skeleton, azimuths, elevation, title)
    try:
        fig.savefig(path, bbox_inches="tight")
    finally:
        plt.close(fig)
    return path
