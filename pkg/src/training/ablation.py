"""Сравнение вариантов обучения: без критика, без SVMA и полная схема."""

from pathlib import Path
from typing import Dict, Optional

from src.config import logger
from src.data.dataset import PoseDataset
from src.errors import ConfigurationError
from src.evaluation import MetricReport, evaluate_model
from src.training.config import TrainConfig
from src.training.loop import prepare_data, train
from src.training.sinks import TrainingLog, TrainSinks

log = logger.getChild("ablation")

VARIANTS = {
    "without_dis": {"use_discriminator": False, "use_svma": True},
    "without_svma": {"use_discriminator": True, "use_svma": False},
    "all_equipped": {"use_discriminator": True, "use_svma": True},
}


def run_ablation(
    dataset: PoseDataset,
    config: TrainConfig,
    out_dir: Optional[Path] = None,
    progress: bool = False,
) -> Dict[str, MetricReport]:
    """Обучает три варианта с одним seed и оценивает каждый на отложенных кадрах."""
    _, held = prepare_data(dataset, config)
    if not held.has_3d or len(held) == 0:
        raise ConfigurationError("Для сравнения вариантов нужны отложенные кадры с 3D-разметкой (holdout_fraction > 0).")

    reports: Dict[str, MetricReport] = {}
    for name, flags in VARIANTS.items():
        variant = config.model_copy(update=flags)
        sinks = TrainSinks(progress=progress)
        if out_dir is not None:
            sinks.log = TrainingLog(out_dir / name / "train_log.csv")
            sinks.checkpoint_path = out_dir / name / "checkpoint.pt"
        try:
            state = train(dataset, variant, sinks)
        finally:
            if sinks.log is not None:
                sinks.log.close()
        reports[name] = evaluate_model(state.generator, held, d=config.d, min_depth=config.min_depth)
        log.info("Вариант %s: %s", name, reports[name].summary())
    return reports
