import math

import numpy as np
import pytest
import torch
from torch import nn

from src.data.dataset import PoseDataset
from src.errors import CheckpointError, ConfigurationError, NumericFaultError
from src.evaluation import evaluate_model
from src.training.ablation import VARIANTS, run_ablation
from src.training.checkpoint import load_checkpoint, load_generator
from src.training.config import TrainConfig, build_train_config, load_config_file
from src.training.loop import prepare_data, sample_batch, train
from src.training.optimizer import AdamMoments, adam_update
from src.training.sinks import TrainingLog, TrainSinks
from src.training.state import TrainState
from src.training.step import camera_agreement, consistency_pass, pose_terms, train_step

D = 10.0


class FixedLifter(nn.Module):
    """Генератор-заглушка: нулевые смещения глубины и камера (1/d)[I|0]."""

    def forward(self, x):
        depth = torch.zeros(x.shape[:-1], dtype=x.dtype)
        cam = torch.tensor([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], dtype=x.dtype) / D
        return depth, cam.expand(x.shape[0], 2, 3)


# --- конфигурация ---


def test_config_defaults():
    config = TrainConfig()
    assert config.learning_rate == 5.5e-5
    assert (config.adam_beta1, config.adam_beta2) == (0.7, 0.9)
    assert config.critic_ratio == 5
    weights = config.weights
    assert (weights.lambda_angle, weights.lambda_cam, weights.lambda_sym) == (1.0, 1.0, 0.01)
    assert (weights.lambda_3d, weights.lambda_svma, weights.lambda_gp) == (0.1, 10.0, 10.0)


def test_config_precedence(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("seed: 4\ntotal_steps: 10\ndataset: data.csv\n", encoding="utf-8")
    values = load_config_file(path)
    config = build_train_config(values, {"total_steps": 2, "seed": None})
    assert config.seed == 4
    assert config.total_steps == 2


def test_config_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="batch_size"):
        build_train_config({"batch_size": 0}, {})
    with pytest.raises(ConfigurationError, match="unknown_key"):
        build_train_config({"unknown_key": 1}, {})
    nested = tmp_path / "nested.yaml"
    nested.write_text("optim:\n  lr: 1\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_config_file(nested)


# --- Adam ---


def test_adam_zero_gradient_keeps_parameters(tiny_config):
    param = torch.tensor([1.0, -2.0])
    moments = AdamMoments.zeros_like([param])
    adam_update([param], [torch.zeros(2)], moments, tiny_config)
    assert torch.equal(param, torch.tensor([1.0, -2.0]))

    adam_update([param], [torch.ones(2)], moments, tiny_config)
    first = moments.exp_avg[0].clone()
    adam_update([param], [torch.zeros(2)], moments, tiny_config)
    torch.testing.assert_close(moments.exp_avg[0], tiny_config.adam_beta1 * first)


def test_adam_constant_gradient_step_size(tiny_config):
    param = torch.zeros(3, dtype=torch.float64)
    moments = AdamMoments.zeros_like([param])
    grad = torch.tensor([0.5, -2.0, 3.0], dtype=torch.float64)
    for _ in range(50):
        before = param.clone()
        adam_update([param], [grad], moments, tiny_config)
    step = param - before
    torch.testing.assert_close(step, -tiny_config.learning_rate * torch.sign(grad), rtol=1e-4, atol=0)


def test_adam_rejects_non_finite_gradient(tiny_config):
    param = torch.zeros(2)
    with pytest.raises(NumericFaultError):
        adam_update([param], [torch.tensor([1.0, math.nan])], AdamMoments.zeros_like([param]), tiny_config)


# --- шаг обучения ---


def test_self_consistent_pose_has_zero_consistency_losses(skeleton, tiny_config):
    x_real = torch.zeros(2, skeleton.num_joints, 2, dtype=torch.float64)
    theta = torch.tensor([0.7, 4.0], dtype=torch.float64)
    p = consistency_pass(FixedLifter(), x_real, theta, tiny_config)
    torch.testing.assert_close(p.x_proj, x_real)
    terms = pose_terms(p, skeleton, tiny_config)
    assert terms["l3d"].item() == 0.0
    assert terms["svma"].item() == 0.0
    assert terms["cam"].item() == pytest.approx(0.0, abs=1e-12)


def test_pose_terms_without_svma(skeleton, tiny_config):
    config = tiny_config.model_copy(update={"use_svma": False})
    x_real = 0.01 * torch.randn(3, skeleton.num_joints, 2, dtype=torch.float64)
    p = consistency_pass(FixedLifter(), x_real, torch.zeros(3, dtype=torch.float64), config)
    assert p.x_rot_pred is None
    terms = pose_terms(p, skeleton, config)
    assert terms["l3d"].item() == 0.0
    assert terms["svma"].item() == 0.0


def test_virtual_view_is_normalized_like_real_frames(skeleton, tiny_config):
    x_real = 0.05 * torch.randn(4, skeleton.num_joints, 2, dtype=torch.float64, generator=torch.Generator().manual_seed(2))
    theta = torch.tensor([0.3, 1.2, 2.9, 5.0], dtype=torch.float64)
    p = consistency_pass(FixedLifter(), x_real, theta, tiny_config, skeleton.root_index)
    torch.testing.assert_close(p.x_proj[:, skeleton.root_index], torch.zeros(4, 2, dtype=torch.float64))
    others = torch.linalg.vector_norm(p.x_proj[:, 1:], dim=-1).mean(-1)
    torch.testing.assert_close(others, torch.full((4,), 1 / D, dtype=torch.float64))


class NanLifter(nn.Module):
    """Генератор-заглушка с неконечной глубиной."""

    def __init__(self):
        super().__init__()
        self.scale = nn.Parameter(torch.ones(()))

    def forward(self, x):
        depth = torch.full(x.shape[:-1], math.nan, dtype=x.dtype) * self.scale
        cam = torch.tensor([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], dtype=x.dtype) / D * self.scale
        return depth, cam.expand(x.shape[0], 2, 3)


def test_aborted_step_leaves_critic_untouched(synthetic, skeleton, tiny_config):
    state = TrainState.initial(tiny_config, skeleton.num_joints)
    state.generator = NanLifter()
    before = [w.detach().clone() for w in state.discriminator.parameters()]
    batch = torch.as_tensor(synthetic.preprocessed(D).frames2d[:8])
    with pytest.raises(NumericFaultError) as err:
        train_step(state, batch, batch, tiny_config, skeleton)
    assert err.value.where.startswith("loss:")
    assert err.value.step == 1
    assert state.discriminator_version == 0
    assert state.step == 0
    for w, old in zip(state.discriminator.parameters(), before):
        assert torch.equal(w, old)


def test_sample_batch_is_seeded():
    a = sample_batch(np.random.default_rng(1), 100, 16)
    b = sample_batch(np.random.default_rng(1), 100, 16)
    np.testing.assert_array_equal(a, b)
    assert len(set(a.tolist())) == 16
    assert len(sample_batch(np.random.default_rng(1), 5, 16)) == 16


# --- цикл обучения ---


def test_training_is_deterministic(synthetic, tiny_config, make_collector):
    first, second = make_collector(), make_collector()
    train(synthetic, tiny_config, TrainSinks(log=first))
    train(synthetic, tiny_config, TrainSinks(log=second))
    assert [r.step for r in first.reports] == [1, 2, 3]
    assert first.reports == second.reports


def test_report_total_matches_weighted_terms(synthetic, tiny_config, collector):
    train(synthetic, tiny_config, TrainSinks(log=collector))
    w = tiny_config.weights
    for r in collector.reports:
        expected = (
            r.adv + w.lambda_angle * r.angle + w.lambda_cam * r.cam + w.lambda_sym * r.sym
            + w.lambda_3d * r.l3d + w.lambda_svma * r.svma
        )
        assert abs(r.total - expected) <= 1e-9


def test_full_ablation_keeps_pose_terms_only(synthetic, tiny_config, collector):
    config = tiny_config.model_copy(update={"use_discriminator": False, "use_svma": False})
    train(synthetic, config, TrainSinks(log=collector))
    for r in collector.reports:
        assert r.adv == r.l3d == r.svma == r.disc == r.gp == 0.0
        assert r.total == pytest.approx(r.angle + r.cam + 0.01 * r.sym)


def test_critic_ratio_counts_updates(synthetic, tiny_config):
    config = tiny_config.model_copy(update={"critic_ratio": 3, "total_steps": 2})
    state = train(synthetic, config)
    assert state.step == 2
    assert state.generator_version == 2
    assert state.discriminator_version == 6


def test_zero_steps_writes_checkpoint(tmp_path, synthetic, tiny_config):
    config = tiny_config.model_copy(update={"total_steps": 0})
    state = train(synthetic, config, TrainSinks(checkpoint_path=tmp_path / "checkpoint.pt"))
    assert state.step == 0
    assert load_checkpoint(tmp_path / "checkpoint.pt").state.step == 0


def test_resume_reproduces_uninterrupted_run(tmp_path, synthetic, tiny_config, make_collector):
    config = tiny_config.model_copy(update={"total_steps": 4})
    full = make_collector()
    train(synthetic, config, TrainSinks(log=full))

    half = config.model_copy(update={"total_steps": 2})
    train(synthetic, half, TrainSinks(checkpoint_path=tmp_path / "checkpoint.pt"))
    checkpoint = load_checkpoint(tmp_path / "checkpoint.pt")
    assert checkpoint.state.step == 2
    assert checkpoint.config == half

    resumed = make_collector()
    train(synthetic, config, TrainSinks(log=resumed), state=checkpoint.state)
    assert resumed.reports == full.reports[2:]


def test_non_finite_training_aborts(synthetic, tiny_config):
    config = tiny_config.model_copy(update={"learning_rate": math.inf})
    with pytest.raises(NumericFaultError):
        train(synthetic, config)


def test_checkpoint_failure_keeps_state(tmp_path, synthetic, tiny_config):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    config = tiny_config.model_copy(update={"total_steps": 1})
    with pytest.raises(CheckpointError) as err:
        train(synthetic, config, TrainSinks(checkpoint_path=blocker / "checkpoint.pt"))
    assert err.value.state.step == 1


def test_empty_dataset_is_rejected(skeleton, tiny_config):
    empty = PoseDataset(skeleton=skeleton, frames2d=np.zeros((0, skeleton.num_joints, 2)))
    with pytest.raises(ConfigurationError):
        prepare_data(empty, tiny_config)


def test_training_log_csv(tmp_path, synthetic, tiny_config):
    path = tmp_path / "train_log.csv"
    with TrainingLog(path) as log:
        train(synthetic, tiny_config, TrainSinks(log=log))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("step,adv,angle,cam,sym,l3d,svma,total")
    assert len(lines) == 1 + tiny_config.total_steps


def test_periodic_evaluation_fills_p_mpjpe(synthetic, tiny_config, collector):
    config = tiny_config.model_copy(update={"holdout_fraction": 0.25, "eval_every": 2, "total_steps": 2})
    train(synthetic, config, TrainSinks(log=collector))
    assert collector.reports[0].p_mpjpe is None
    assert collector.reports[1].p_mpjpe > 0


RECOVERY_SEEDS = (0, 1, 2)


def recovery_config(seed):
    return TrainConfig(
        width=256, batch_size=128, total_steps=2000, learning_rate=2e-4, holdout_fraction=0.1, seed=seed,
        log_every=500, eval_every=10_000, checkpoint_every=10_000,
    )


@pytest.fixture(scope="module")
def recovery(tmp_path_factory):
    """Три варианта обучения на трёх seed: отчёты, обученный и исходный генераторы."""
    from src.data.synthetic import synthesize_poses

    dataset = synthesize_poses(5000, seed=0)
    runs = {}
    for seed in RECOVERY_SEEDS:
        config = recovery_config(seed)
        _, held = prepare_data(dataset, config)
        out = tmp_path_factory.mktemp(f"recovery_{seed}")
        reports = run_ablation(dataset, config, out)
        trained, _ = load_generator(out / "all_equipped" / "checkpoint.pt")
        runs[seed] = {
            "config": config,
            "held": held,
            "reports": reports,
            "trained": trained,
            "untrained": TrainState.initial(config, 17).generator,
        }
    return runs


@pytest.mark.slow
def test_training_halves_held_out_error(recovery):
    run = recovery[0]
    untrained = evaluate_model(run["untrained"], run["held"], d=run["config"].d)
    assert run["reports"]["all_equipped"].p_mpjpe <= 0.5 * untrained.p_mpjpe


@pytest.mark.slow
def test_ablation_ordering(recovery):
    ordered = 0
    for run in recovery.values():
        r = {name: report.p_mpjpe for name, report in run["reports"].items()}
        ordered += r["without_dis"] > r["without_svma"] > r["all_equipped"]
    assert ordered >= 2


@pytest.mark.slow
def test_camera_agreement_improves(recovery):
    run = recovery[0]
    frames = run["held"].frames2d[:256]
    before = camera_agreement(run["untrained"], frames, run["config"])
    after = camera_agreement(run["trained"], frames, run["config"])
    assert after < before


@pytest.mark.slow
def test_ablation_reports_every_variant(tmp_path, synthetic, tiny_config):
    config = tiny_config.model_copy(update={"holdout_fraction": 0.25, "total_steps": 5})
    reports = run_ablation(synthetic, config, tmp_path)
    assert list(reports) == list(VARIANTS)
    for name in VARIANTS:
        assert (tmp_path / name / "checkpoint.pt").is_file()
        assert reports[name].frames == 16
