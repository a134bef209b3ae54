import math

import numpy as np
import pytest
import torch
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.errors import CameraDomainError, ProjectionDomainError
from src.geometry import (
    camera_from_vector,
    camera_scale,
    depth_clamp_count,
    lift_from_depth,
    normalize_to_root,
    perspective_project,
    rotate_about_pivot,
    rotation_matrix_y,
    weak_project,
)

D = 10.0


def t(values):
    return torch.tensor(values, dtype=torch.float64)


def test_lift_from_depth_substitution():
    out = lift_from_depth(t([[0.1, 0.2]]), t([0.0]), d=D)
    torch.testing.assert_close(out, t([[1.0, 2.0, 10.0]]))


def test_lift_clamps_depth():
    out = lift_from_depth(t([[0.1, 0.2]]), t([-15.0]), d=D, min_depth=1.0)
    assert out[0, 2].item() == 1.0
    assert depth_clamp_count(t([-15.0, 0.0]), d=D, min_depth=1.0) == 1


def test_perspective_project_examples():
    torch.testing.assert_close(perspective_project(t([1.0, 2.0, 10.0])), t([0.1, 0.2]))
    torch.testing.assert_close(perspective_project(t([0.0, 0.0, D])), t([0.0, 0.0]))
    np.testing.assert_allclose(perspective_project(np.array([[1.0, 2.0, 10.0]])), [[0.1, 0.2]])


def test_perspective_project_rejects_nonpositive_depth():
    with pytest.raises(ProjectionDomainError):
        perspective_project(t([[1.0, 2.0, 10.0], [1.0, 2.0, 0.0]]))


@given(
    x=arrays(np.float64, (5, 2), elements=st.floats(-1, 1)),
    depth=arrays(np.float64, (5,), elements=st.floats(-5, 5)),
)
def test_lift_then_project_round_trip(x, depth):
    x, depth = torch.as_tensor(x), torch.as_tensor(depth)
    back = perspective_project(lift_from_depth(x, depth, d=D, min_depth=1.0))
    torch.testing.assert_close(back, x, rtol=1e-15, atol=1e-15)


def test_rotation_identity(random_pose):
    pose = random_pose()
    torch.testing.assert_close(rotate_about_pivot(pose, 0.0, d=D), pose)


def test_rotation_by_pi():
    out = rotate_about_pivot(t([[1.0, 5.0, 11.0]]), math.pi, d=D)
    torch.testing.assert_close(out, t([[-1.0, 5.0, 9.0]]), atol=1e-12, rtol=0)


@given(theta=st.floats(0, 2 * math.pi))
def test_rotation_inverse(theta):
    pose = t([[0.3, -0.2, 10.4], [1.0, 5.0, 11.0], [-0.5, 0.1, 9.2]])
    back = rotate_about_pivot(rotate_about_pivot(pose, theta, d=D), 2 * math.pi - theta, d=D)
    torch.testing.assert_close(back, pose, atol=1e-9, rtol=0)


def test_rotation_is_rigid(random_pose):
    pose = random_pose(batch=3)
    theta = t([0.3, 2.0, 5.1])
    out = rotate_about_pivot(pose, theta, d=D)
    pivot = t([0.0, 0.0, D])
    torch.testing.assert_close(
        torch.linalg.vector_norm(out - pivot, dim=-1), torch.linalg.vector_norm(pose - pivot, dim=-1)
    )
    # высота (ось y) не меняется
    torch.testing.assert_close(out[..., 1], pose[..., 1])


def test_rotation_matrix_is_orthonormal():
    theta = torch.linspace(0.0, 2 * math.pi, 1000, dtype=torch.float64)
    rot = rotation_matrix_y(theta)
    eye = torch.eye(3, dtype=torch.float64).expand(1000, 3, 3)
    torch.testing.assert_close(rot @ rot.transpose(-1, -2), eye, atol=1e-12, rtol=0)
    torch.testing.assert_close(torch.linalg.det(rot), torch.ones(1000, dtype=torch.float64), atol=1e-12, rtol=0)


def test_zero_rotation_keeps_many_poses(random_pose):
    pose = random_pose(batch=1000)
    torch.testing.assert_close(rotate_about_pivot(pose, torch.zeros(1000, dtype=torch.float64), d=D), pose, atol=1e-12, rtol=0)


def test_lift_then_project_many_pairs():
    gen = torch.Generator().manual_seed(9)
    x = 2 * torch.rand(10_000, 2, dtype=torch.float64, generator=gen) - 1
    depth = 10 * torch.rand(10_000, dtype=torch.float64, generator=gen) - 5
    back = perspective_project(lift_from_depth(x, depth, d=D, min_depth=1.0))
    torch.testing.assert_close(back, x, rtol=1e-15, atol=1e-15)


def test_normalize_to_root():
    pose = t([[[1.0, 1.0], [1.0, 3.0], [4.0, 1.0]]])
    out = normalize_to_root(pose, 0, 0.1)
    torch.testing.assert_close(out, t([[[0.0, 0.0], [0.0, 0.08], [0.12, 0.0]]]))
    torch.testing.assert_close(normalize_to_root(torch.zeros(2, 3, 2, dtype=torch.float64), 0, 0.1), torch.zeros(2, 3, 2, dtype=torch.float64))


def test_weak_project_examples():
    cam = t([[0.1, 0.0, 0.0], [0.0, 0.1, 0.0]])
    torch.testing.assert_close(weak_project(t([[1.0, 2.0, 10.0]]), cam), t([[0.1, 0.2]]))
    zero = torch.zeros(2, 3, dtype=torch.float64)
    torch.testing.assert_close(weak_project(t([[1.0, 2.0, 10.0]]), zero), t([[0.0, 0.0]]))


def test_weak_project_batched(random_pose):
    pose = random_pose(batch=2)
    cams = camera_from_vector(t([[0.1, 0, 0, 0, 0.1, 0], [0.2, 0, 0, 0, 0.2, 0]]))
    out = weak_project(pose, cams)
    torch.testing.assert_close(out[0], 0.1 * pose[0, :, :2])
    torch.testing.assert_close(out[1], 0.2 * pose[1, :, :2])


def test_camera_scale_examples():
    torch.testing.assert_close(camera_scale(t([[1.0, 0, 0], [0, 1.0, 0]])), t(1.0))
    rot = rotation_matrix_y(t(0.7))[:2]
    torch.testing.assert_close(camera_scale(0.3 * rot), t(0.3))
    with pytest.raises(CameraDomainError):
        camera_scale(torch.zeros(2, 3, dtype=torch.float64))


@given(theta=st.floats(0, 2 * math.pi), s=st.floats(0.01, 10.0))
def test_camera_scale_matches_singular_value(theta, s):
    cam = s * rotation_matrix_y(t(theta))[:2]
    sigma = torch.linalg.svdvals(cam).max()
    torch.testing.assert_close(camera_scale(cam), sigma, rtol=1e-9, atol=0)


def test_geometry_gradients(random_pose):
    x = (0.1 * torch.randn(2, 17, 2, dtype=torch.float64, generator=torch.Generator().manual_seed(0))).requires_grad_()
    depth = (0.5 * torch.randn(2, 17, dtype=torch.float64, generator=torch.Generator().manual_seed(1))).requires_grad_()
    assert torch.autograd.gradcheck(lambda a, b: lift_from_depth(a, b, d=D), (x, depth))

    pose = random_pose(batch=2).requires_grad_()
    theta = t([0.4, 2.5]).requires_grad_()
    assert torch.autograd.gradcheck(lambda p, th: rotate_about_pivot(p, th, d=D), (pose, theta))

    cam = t([[[0.1, 0.01, 0.0], [0.0, 0.1, 0.02]]] * 2).requires_grad_()
    assert torch.autograd.gradcheck(weak_project, (pose, cam))
