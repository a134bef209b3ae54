"""Команда подъёма 2D-кадров в 3D обученным генератором."""

from pathlib import Path

import click

from src.cli_instance import cli
from src.commands.utils import command_span
from src.data.dataset import PoseDataset
from src.data.keypoints import load_dataset, save_cameras, save_dataset
from src.errors import SchemaError
from src.networks import lift_poses
from src.training.checkpoint import load_generator


def cameras_path(out: Path) -> Path:
    return out.with_name(out.name + ".cameras.csv")


@cli.command(name="lift", help="Поднимает ключевые точки в 3D; камеры пишутся в <out>.cameras.csv.")
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.argument("keypoints", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, help="Файл 3D-поз в формате ключевых точек.")
def lift_command(checkpoint: str, keypoints: str, out: str) -> None:
    with command_span("lift", checkpoint=checkpoint, keypoints=keypoints) as span:
        data = load_dataset(keypoints)
        generator, config = load_generator(checkpoint)
        n = data.skeleton.num_joints
        if generator.config.num_joints != n:
            raise SchemaError(f"Чекпоинт обучен на {generator.config.num_joints} суставах, в файле {n}.")

        prepared = data.preprocessed(config.d)
        poses, cams = lift_poses(generator, prepared.frames2d, config.d, config.min_depth)
        lifted = PoseDataset(
            skeleton=data.skeleton,
            frames2d=prepared.frames2d,
            frames3d=poses,
            subjects=prepared.subjects,
            actions=prepared.actions,
        )

        out_path = save_dataset(lifted, out)
        cams_path = save_cameras(cams, cameras_path(Path(out)))
        span.set_attribute("frames", len(lifted))
        click.echo(f"✅ Поднято кадров: {len(lifted)} -> {out_path} (камеры: {cams_path})")
