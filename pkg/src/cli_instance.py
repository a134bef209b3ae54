"""Единый экземпляр click-группы для всего приложения."""

import click

cli = click.Group(
    name="svma",
    help="Обучение подъёма 2D→3D поз без 3D-разметки (SVMA), оценка и визуализация.",
)
