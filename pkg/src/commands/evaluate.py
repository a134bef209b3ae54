"""Команда оценки чекпоинта на наборе с 3D-разметкой."""

from pathlib import Path
from typing import Optional

import click

from src.cli_instance import cli
from src.commands.utils import command_span, parse_list
from src.config import CAMERA_DISTANCE
from src.data.keypoints import load_dataset
from src.errors import ConfigurationError, SchemaError
from src.evaluation import evaluate_model, metric_report
from src.training.checkpoint import load_generator


@cli.command(name="eval", help="P-MPJPE, MPJPE, PCK@150 и AUC для чекпоинта.")
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.option("--data", "dataset", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--subjects", default=None, help="Список субъектов через запятую.")
@click.option("--scale-mm", type=float, default=None, help="Масштаб разметки, если в файле нет scale_mm.")
@click.option("--oracle", is_flag=True, help="Сравнить разметку саму с собой (проверка метрик).")
@click.option("--out", default=None, help="Куда записать metrics.yaml (по умолчанию рядом с чекпоинтом).")
def eval_command(
    checkpoint: str,
    dataset: str,
    subjects: Optional[str],
    scale_mm: Optional[float],
    oracle: bool,
    out: Optional[str],
) -> None:
    with command_span("eval", checkpoint=checkpoint, dataset=dataset, oracle=oracle):
        data = load_dataset(dataset)
        if not data.has_3d:
            raise SchemaError(f"dataset: в {dataset} нет 3D-разметки (колонок <joint>_z).")
        selected = parse_list(subjects)
        if selected:
            data = data.select(selected)
        if len(data) == 0:
            raise ConfigurationError("dataset: нет кадров для оценки.")
        scale = scale_mm if scale_mm is not None else data.scale_mm
        if scale is None:
            raise ConfigurationError("scale_mm: масштаб не задан (--scale-mm или комментарий # scale_mm= в файле).")

        if oracle:
            prepared = data.preprocessed(CAMERA_DISTANCE)
            report = metric_report(
                prepared.frames3d, prepared.frames3d, data.skeleton.joint_names, scale, prepared.actions
            )
        else:
            generator, config = load_generator(checkpoint)
            if generator.config.num_joints != data.skeleton.num_joints:
                raise SchemaError(
                    f"Чекпоинт обучен на {generator.config.num_joints} суставах, в наборе {data.skeleton.num_joints}."
                )
            prepared = data.preprocessed(config.d)
            report = evaluate_model(generator, prepared, scale, d=config.d, min_depth=config.min_depth)

        out_path = Path(out) if out else Path(checkpoint).with_name("metrics.yaml")
        report.write(out_path)
        click.echo(report.summary())
        click.echo(f"📄 Метрики записаны: {out_path}")
