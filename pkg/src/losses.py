"""Функции потерь генератора и критика.

Все позовые потери усредняются по батчу; градиенты считает autograd.
"""

import itertools
from dataclasses import asdict, dataclass, fields
from typing import Callable, Optional, Sequence, Tuple

import torch
from pydantic import BaseModel, ConfigDict, Field

from src.config import logger
from src.data.skeleton import Skeleton
from src.errors import CameraDomainError
from src.geometry import weak_project
from src.metrics import DEGENERATE_ORIENTATIONS
from src.validators import check_set_size

log = logger.getChild("losses")


class LossWeights(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda_angle: float = Field(1.0, ge=0.0)
    lambda_cam: float = Field(1.0, ge=0.0)
    lambda_sym: float = Field(0.01, ge=0.0)
    lambda_3d: float = Field(0.1, ge=0.0)
    lambda_svma: float = Field(10.0, ge=0.0)
    lambda_gp: float = Field(10.0, ge=0.0)


@dataclass
class GeneratorTerms:
    """Слагаемые лосса генератора на одном батче (тензоры-скаляры)."""

    adv: torch.Tensor
    angle: torch.Tensor
    cam: torch.Tensor
    sym: torch.Tensor
    l3d: torch.Tensor
    svma: torch.Tensor


@dataclass
class LossReport:
    step: int
    adv: float
    angle: float
    cam: float
    sym: float
    l3d: float
    svma: float
    total: float
    disc: float = 0.0
    gp: float = 0.0
    wasserstein: float = 0.0
    clamps: int = 0
    p_mpjpe: Optional[float] = None

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_row(self) -> dict:
        return asdict(self)

    def summary(self) -> str:
        return (
            f"step={self.step} total={self.total:.5f} adv={self.adv:.4f} angle={self.angle:.4f} "
            f"cam={self.cam:.4f} sym={self.sym:.5f} 3d={self.l3d:.5f} svma={self.svma:.5f} "
            f"disc={self.disc:.4f} gp={self.gp:.4f}"
        )


def _flat_norm(diff: torch.Tensor) -> torch.Tensor:
    return torch.linalg.vector_norm(diff.flatten(-2), dim=-1)


def loss_3d(x_rot_pred: torch.Tensor, x_pred_rotated: torch.Tensor) -> torch.Tensor:
    """(1/N)·‖X̃_rot_pred − X̃_pred‖₂ по позе, среднее по батчу."""
    n = x_rot_pred.shape[-2]
    return (_flat_norm(x_rot_pred - x_pred_rotated) / n).mean()


def loss_cam_eq(k1: torch.Tensor, k2: torch.Tensor) -> torch.Tensor:
    """(1/6)·‖K − K̃‖₁."""
    return (k1 - k2).abs().mean(dim=(-2, -1)).mean()


def _svma_set_term(poses: Sequence[torch.Tensor], name: str) -> torch.Tensor:
    m = len(poses)
    check_set_size(m, name)
    n = poses[0].shape[-2]
    total = sum(_flat_norm(a - b) for a, b in itertools.combinations(poses, 2))
    return (total / (m * n)).mean()


def loss_svma(angle1_set: Sequence[torch.Tensor], angle2_set: Sequence[torch.Tensor]) -> torch.Tensor:
    """Согласованность 2D-репроекций внутри каждого ракурса (по неупорядоченным парам)."""
    return _svma_set_term(angle1_set, "angle-1") + _svma_set_term(angle2_set, "angle-2")


def svma_sets(
    x_real: torch.Tensor,
    x_pred: torch.Tensor,
    cam: torch.Tensor,
    x_proj: torch.Tensor,
    x_rot_pred: torch.Tensor,
    cam2: torch.Tensor,
) -> Tuple[list, list]:
    """Наборы ракурсов: обе камеры применяются к обеим позам, плюс наблюдаемая 2D-поза ракурса.

    angle-1: {x_real, K·X_pred, K̃·X_pred}; angle-2: {x̃_proj, K·X̃_rot_pred, K̃·X̃_rot_pred}.
    """
    angle1 = [x_real, weak_project(x_pred, cam), weak_project(x_pred, cam2)]
    angle2 = [x_proj, weak_project(x_rot_pred, cam), weak_project(x_rot_pred, cam2)]
    return angle1, angle2


def gradient_penalty(
    critic: Callable[[torch.Tensor], torch.Tensor],
    real: torch.Tensor,
    fake: torch.Tensor,
    generator: torch.Generator | None = None,
) -> torch.Tensor:
    """mean((‖∇_x̂ D(x̂)‖₂ − 1)²), x̂ = ε·real + (1 − ε)·fake, ε ~ U[0, 1) на пример."""
    eps = torch.rand(real.shape[0], *([1] * (real.dim() - 1)), generator=generator, dtype=real.dtype)
    eps = eps.to(real.device)
    x_hat = (eps * real + (1 - eps) * fake).detach().requires_grad_(True)
    scores = critic(x_hat)
    (grad,) = torch.autograd.grad(scores.sum(), x_hat, create_graph=True)
    norm = torch.linalg.vector_norm(grad.flatten(1), dim=1)
    return ((norm - 1) ** 2).mean()


def loss_adversarial(
    d_fake: torch.Tensor,
    d_real: torch.Tensor,
    gp: torch.Tensor,
    lambda_gp: float = 10.0,
) -> Tuple[torch.Tensor, torch.Tensor]:
    """WGAN-gp: (лосс генератора, лосс критика)."""
    gen_loss = -d_fake.mean()
    disc_loss = d_fake.mean() - d_real.mean() + lambda_gp * gp
    return gen_loss, disc_loss


def camera_orthogonality(cam: torch.Tensor) -> torch.Tensor:
    """‖(2/trace(KKᵀ))·KKᵀ − I₂‖_F, среднее по батчу. Ноль iff KKᵀ = s²I₂."""
    gram = cam @ cam.transpose(-1, -2)
    trace = gram.diagonal(dim1=-2, dim2=-1).sum(-1)
    if bool((trace == 0).any()):
        raise CameraDomainError("Лосс камеры не определён для нулевой камеры.")
    eye = torch.eye(2, dtype=cam.dtype, device=cam.device)
    resid = (2 / trace)[..., None, None] * gram - eye
    return torch.linalg.matrix_norm(resid, ord="fro").mean()


def loss_camera(cam: torch.Tensor, cam2: torch.Tensor) -> torch.Tensor:
    return camera_orthogonality(cam) + loss_cam_eq(cam, cam2)


def bone_lengths(p: torch.Tensor, skeleton: Skeleton) -> torch.Tensor:
    edges = torch.tensor(skeleton.bone_edges, device=p.device)
    return torch.linalg.vector_norm(p[..., edges[:, 1], :] - p[..., edges[:, 0], :], dim=-1)


def loss_symmetry(p: torch.Tensor, skeleton: Skeleton) -> torch.Tensor:
    """(1/q)·Σ (|B_i| − |B_i'|)² по симметричным парам костей."""
    lengths = bone_lengths(p, skeleton)
    pairs = torch.tensor(skeleton.symmetric_pairs, device=p.device)
    diff = lengths[..., pairs[:, 0]] - lengths[..., pairs[:, 1]]
    return (diff**2).mean(-1).mean()


def orientation_vectors(p: torch.Tensor, skeleton: Skeleton) -> Tuple[torch.Tensor, torch.Tensor]:
    """v = нос − шея, w = левое плечо − правое плечо."""
    nose, neck, ls, rs = skeleton.orientation_joints
    return p[..., nose, :] - p[..., neck, :], p[..., ls, :] - p[..., rs, :]


def degenerate_orientation_count(p: torch.Tensor, skeleton: Skeleton) -> int:
    v, w = orientation_vectors(p.detach(), skeleton)
    return int(((torch.linalg.vector_norm(v, dim=-1) * torch.linalg.vector_norm(w, dim=-1)) == 0).sum())


def loss_angle(p: torch.Tensor, skeleton: Skeleton) -> torch.Tensor:
    """max(0, −sin β) по плоскости z-x; вырожденные v или w дают 0."""
    v, w = orientation_vectors(p, skeleton)
    denom = torch.linalg.vector_norm(v, dim=-1) * torch.linalg.vector_norm(w, dim=-1)
    degenerate = denom == 0
    if bool(degenerate.any()):
        count = int(degenerate.sum())
        DEGENERATE_ORIENTATIONS.inc(count)
        log.debug("Нулевой вектор лица или плеч в %d позах, L_angle = 0", count)
    safe = torch.where(degenerate, torch.ones_like(denom), denom)
    neg_sin = (v[..., 0] * w[..., 2] - v[..., 2] * w[..., 0]) / safe
    neg_sin = torch.where(degenerate, torch.zeros_like(neg_sin), neg_sin)
    return torch.relu(neg_sin).mean()


def total_generator_loss(terms: GeneratorTerms, weights: LossWeights, step: int = 0) -> Tuple[torch.Tensor, LossReport]:
    """L = L_adv + λ1 L_angle + λ2 L_cam + λ3 L_sym + λ4 L_3D + λ5 L_svma."""
    total = (
        terms.adv
        + weights.lambda_angle * terms.angle
        + weights.lambda_cam * terms.cam
        + weights.lambda_sym * terms.sym
        + weights.lambda_3d * terms.l3d
        + weights.lambda_svma * terms.svma
    )
    values = {name: float(getattr(terms, name)) for name in ("adv", "angle", "cam", "sym", "l3d", "svma")}
    # итог в отчёте пересчитывается в double из тех же значений, что записаны в лог
    report_total = (
        values["adv"]
        + weights.lambda_angle * values["angle"]
        + weights.lambda_cam * values["cam"]
        + weights.lambda_sym * values["sym"]
        + weights.lambda_3d * values["l3d"]
        + weights.lambda_svma * values["svma"]
    )
    report = LossReport(step=step, total=report_total, **values)
    return total, report
