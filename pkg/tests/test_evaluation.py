import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import ConfigurationError, SchemaError
from src.evaluation import (
    joint_errors,
    metric_report,
    mpjpe,
    p_mpjpe,
    pck_auc,
    pck_curve,
    procrustes_align,
    threshold_grid,
)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def test_threshold_grid():
    grid = threshold_grid()
    assert len(grid) == 31
    assert grid[0] == 0.0 and grid[-1] == 150.0


def test_identity_alignment(rng):
    gt = rng.normal(size=(16, 3))
    result = procrustes_align(gt, gt)
    np.testing.assert_allclose(result.rotation, np.eye(3), atol=1e-9)
    assert result.scale == pytest.approx(1.0)
    np.testing.assert_allclose(result.translation, 0.0, atol=1e-9)
    assert not result.degenerate


def test_alignment_recovers_similarity(rng):
    gt = rng.normal(size=(16, 3))
    rot = random_rotation(rng)
    pred = 2.5 * gt @ rot + np.array([1.0, -3.0, 0.5])
    result = procrustes_align(pred, gt)
    np.testing.assert_allclose(result.aligned, gt, atol=1e-9)
    np.testing.assert_allclose(result.rotation, rot.T, atol=1e-9)
    assert result.scale == pytest.approx(0.4)


def random_rotations(rng, count):
    """Равномерные вращения через единичные кватернионы."""
    q = rng.normal(size=(count, 4))
    w, x, y, z = (q / np.linalg.norm(q, axis=-1, keepdims=True)).T
    return np.stack([
        np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], axis=-1),
        np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], axis=-1),
        np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], axis=-1),
    ], axis=-2)


def test_alignment_beats_sampled_similarities(rng):
    sampler = np.random.default_rng(3)
    for _ in range(100):
        gt = rng.normal(size=(16, 3))
        pred = rng.normal(size=(16, 3))
        best = ((procrustes_align(pred, gt).aligned - gt) ** 2).sum()
        rots = random_rotations(sampler, 10_000)
        scales = sampler.uniform(0.05, 3.0, size=(10_000, 1, 1))
        shifts = sampler.normal(scale=0.5, size=(10_000, 1, 3))
        candidates = scales * (pred @ rots) + shifts
        sse = ((candidates - gt) ** 2).sum(axis=(-2, -1))
        assert best <= sse.min() + 1e-9


def test_degenerate_prediction_is_flagged(rng):
    gt = rng.normal(size=(16, 3))
    result = procrustes_align(np.zeros((16, 3)), gt)
    assert result.degenerate
    assert np.isfinite(result.aligned).all()


def test_p_mpjpe_examples(rng):
    gt = rng.normal(size=(2, 16, 3))
    assert p_mpjpe(gt, gt) == pytest.approx(0.0, abs=1e-9)
    rotated = 3.0 * gt @ random_rotation(rng)
    assert p_mpjpe(rotated, gt) == pytest.approx(0.0, abs=1e-9)


def test_single_joint_displacement(rng):
    gt = rng.normal(size=(1, 16, 3))
    pred = gt.copy()
    pred[0, 5, 0] += 10.0
    assert mpjpe(pred, gt) == pytest.approx(10.0 / 16)
    # оптимальное подобие уменьшает сумму квадратов, но не обязательно среднюю ошибку
    aligned = procrustes_align(pred[0], gt[0]).aligned
    assert ((aligned - gt[0]) ** 2).sum() <= ((pred[0] - gt[0]) ** 2).sum() + 1e-12
    # сдвиг оптимален, поэтому остатки после выравнивания в сумме нулевые
    np.testing.assert_allclose((aligned - gt[0]).sum(axis=0), 0.0, atol=1e-9)


def test_p_mpjpe_averages_aligned_errors(rng):
    gt = rng.normal(size=(1, 16, 3))
    pred = 2.0 * gt @ random_rotation(rng) + 1.5
    pred[0, 5, 0] += 0.3
    residual = np.linalg.norm(procrustes_align(pred[0], gt[0]).aligned - gt[0], axis=-1)
    assert p_mpjpe(pred, gt) == pytest.approx(residual.sum() / 16, rel=1e-12)
    assert p_mpjpe(pred, gt, gt_scale_mm=10.0) == pytest.approx(10.0 * residual.sum() / 16, rel=1e-12)


def test_aligned_squared_error_never_exceeds_identity(rng):
    for _ in range(200):
        gt = rng.normal(size=(16, 3))
        pred = gt + rng.normal(scale=rng.uniform(0.01, 2.0), size=(16, 3))
        aligned = procrustes_align(pred, gt).aligned
        assert ((aligned - gt) ** 2).sum() <= ((pred - gt) ** 2).sum() + 1e-12


def test_errors_are_scaled_to_mm(rng):
    gt = rng.normal(size=(3, 16, 3))
    pred = gt + 0.01
    np.testing.assert_allclose(
        joint_errors(pred, gt, gt_scale_mm=480.0, aligned=False), np.sqrt(3) * 0.01 * 480.0
    )


def test_length_mismatch_and_empty_input():
    with pytest.raises(ConfigurationError):
        p_mpjpe(np.zeros((2, 16, 3)), np.zeros((3, 16, 3)))
    with pytest.raises(ConfigurationError):
        pck_auc(np.zeros((0, 16, 3)), np.zeros((0, 16, 3)))
    with pytest.raises(SchemaError):
        procrustes_align(np.zeros((16, 3)), np.zeros((15, 3)))


def test_pck_auc_perfect(rng):
    gt = rng.normal(size=(2, 16, 3))
    pck, auc = pck_auc(gt, gt)
    assert pck == 100.0
    assert auc == pytest.approx(1.0)


def test_pck_curve_constant_errors():
    grid = threshold_grid()
    assert pck_curve(np.full((4, 16), 151.0), [150.0])[0] == 0.0
    curve = pck_curve(np.full((4, 16), 75.0), grid)
    assert pck_curve(np.full((4, 16), 75.0), [150.0])[0] == 100.0
    assert curve.mean() / 100.0 == pytest.approx(15 / 31)


@given(error=st.floats(0.0, 200.0))
def test_pck_curve_is_monotone(error):
    curve = pck_curve(np.array([error, error / 2]), threshold_grid())
    assert (np.diff(curve) >= 0).all()
    assert 0.0 <= curve.min() <= curve.max() <= 100.0


def test_metric_report(tmp_path, synthetic, skeleton):
    from src.data.preprocessing import preprocess_3d

    gts = preprocess_3d(synthetic.frames3d, skeleton)
    report = metric_report(gts, gts, skeleton.joint_names, 480.0, synthetic.actions)
    assert report.frames == len(gts)
    assert report.p_mpjpe == pytest.approx(0.0, abs=1e-6)
    assert report.pck150 == 100.0 and report.auc == pytest.approx(1.0)
    assert set(report.per_joint) == set(skeleton.joint_names)
    assert set(report.per_action) == set(synthetic.actions)
    path = report.write(tmp_path / "metrics.yaml")
    assert "p_mpjpe" in path.read_text(encoding="utf-8")
