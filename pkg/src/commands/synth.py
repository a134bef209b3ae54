"""Команда генерации синтетического набора поз."""

import math
from typing import Optional

import click

from src.cli_instance import cli
from src.commands.utils import command_span, parse_floats
from src.config import CAMERA_DISTANCE
from src.data.keypoints import save_dataset
from src.data.synthetic import default_sweep, synthesize_poses


@cli.command(name="synth", help="Синтетические сочленённые позы в формате ключевых точек (с 3D и scale_mm).")
@click.option("--out", required=True)
@click.option("--count", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--views", type=int, default=8, show_default=True, help="Число равномерных азимутов.")
@click.option("--azimuths", default=None, help="Явные азимуты в градусах через запятую (вместо --views).")
@click.option("--subjects", type=int, default=1, show_default=True, help="Число меток субъектов S1..Sk.")
@click.option("--distance", type=float, default=CAMERA_DISTANCE, show_default=True, help="Глубина корня d.")
def synth_command(
    out: str, count: int, seed: int, views: int, azimuths: Optional[str], subjects: int, distance: float
) -> None:
    with command_span("synth", count=count, seed=seed) as span:
        if azimuths:
            sweep = [math.radians(a) for a in parse_floats(azimuths, "azimuths")]
        else:
            sweep = default_sweep(views)
        dataset = synthesize_poses(count, seed, camera_sweep=sweep, d=distance, subjects=subjects)
        path = save_dataset(dataset, out)
        span.set_attribute("frames", len(dataset))
        click.echo(f"✅ Синтетический набор: {len(dataset)} кадров -> {path}")
