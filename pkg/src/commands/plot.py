"""Команда отрисовки 3D-поз с нескольких азимутов."""

from pathlib import Path
from typing import Optional

import click

from src.cli_instance import cli
from src.commands.utils import command_span, parse_floats
from src.data.keypoints import load_dataset
from src.errors import ConfigurationError, SchemaError
from src.plotting import render_pose


def frame_path(out: Path, index: int, total: int) -> Path:
    if total == 1:
        return out
    return out.with_name(f"{out.stem}_{index:04d}{out.suffix}")


@cli.command(name="plot", help="Рисует 3D-позы из файла ключевых точек: одна панель на азимут.")
@click.argument("pose_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, help="Файл изображения (png/svg/pdf).")
@click.option("--views", default="0,90", show_default=True, help="Азимуты в градусах через запятую.")
@click.option("--elevation", type=float, default=15.0, show_default=True)
@click.option("--frame", "frame_index", type=int, default=None, help="Только один кадр с этим номером.")
def plot_command(pose_file: str, out: str, views: str, elevation: float, frame_index: Optional[int]) -> None:
    with command_span("plot", pose_file=pose_file, views=views) as span:
        azimuths = parse_floats(views, "views")
        data = load_dataset(pose_file)
        if not data.has_3d:
            raise SchemaError(f"В {pose_file} нет 3D-поз (колонок <joint>_z).")
        if frame_index is not None:
            if not 0 <= frame_index < len(data):
                raise ConfigurationError(f"frame: номер {frame_index} вне диапазона 0..{len(data) - 1}.")
            indices = [frame_index]
        else:
            indices = list(range(len(data)))

        written = []
        for i in indices:
            title = None if data.actions is None else data.actions[i]
            path = frame_path(Path(out), i, len(indices))
            written.append(render_pose(data.frames3d[i], data.skeleton, path, azimuths, elevation, title))
        span.set_attribute("images", len(written))
        click.echo(f"🖼️  Изображений: {len(written)}" + (f" ({written[0]})" if len(written) == 1 else ""))
