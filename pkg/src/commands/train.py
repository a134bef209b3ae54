"""Команда обучения генератора и критика."""

from pathlib import Path
from typing import Optional

import click

from src.cli_instance import cli
from src.commands.utils import command_span, parse_list, resolve_dataset
from src.config import DEVICE
from src.data.keypoints import load_dataset
from src.manifest import RunManifest, fingerprint, read_manifest, verify_datasets, write_manifest
from src.training.checkpoint import load_checkpoint
from src.training.config import build_train_config, load_config_file
from src.training.loop import train
from src.training.sinks import TrainingLog, TrainSinks

DEFAULT_OUT = "runs/train"


@cli.command(name="train", help="Обучение без 3D-разметки по файлу 2D (или 3D) ключевых точек.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Плоский YAML с полями конфигурации.")
@click.option("--data", "dataset", default=None, help="Файл ключевых точек.")
@click.option("--seed", type=int, default=None)
@click.option("--steps", "total_steps", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--no-dis", is_flag=True, help="Отключить критик (L_adv = 0).")
@click.option("--no-svma", is_flag=True, help="Отключить второй проход (L_3D = L_svma = 0).")
@click.option("--subjects", default=None, help="Список субъектов через запятую, например S1,S5.")
@click.option("--out", default=None, help="Каталог артефактов.")
@click.option("--resume", type=click.Path(exists=True, dir_okay=False), default=None, help="Продолжить с чекпоинта.")
@click.option("--replay", type=click.Path(exists=True), default=None, help="Повторить запуск по manifest.yaml.")
@click.option("--progress/--no-progress", default=False)
def train_command(
    config_path: Optional[str],
    dataset: Optional[str],
    seed: Optional[int],
    total_steps: Optional[int],
    batch_size: Optional[int],
    no_dis: bool,
    no_svma: bool,
    subjects: Optional[str],
    out: Optional[str],
    resume: Optional[str],
    replay: Optional[str],
    progress: bool,
) -> None:
    with command_span("train", dataset=dataset, seed=seed, resume=resume) as span:
        if replay:
            manifest = read_manifest(replay)
            verify_datasets(manifest)
            file_values = dict(manifest.config)
            file_values["dataset"] = next(iter(manifest.datasets), None)
            file_values["subjects"] = manifest.subjects
        else:
            file_values = load_config_file(config_path)

        dataset_path = resolve_dataset(dataset or file_values.get("dataset"))
        out_dir = Path(out or file_values.get("out") or DEFAULT_OUT)
        selected = parse_list(subjects or file_values.get("subjects"))

        state = None
        if resume:
            # конфигурация чекпоинта служит базой, файл и флаги CLI её перекрывают
            device = file_values.get("device", DEVICE)
            checkpoint = load_checkpoint(resume, device)
            file_values = {**checkpoint.config.model_dump(), **file_values, "device": device}
            state = checkpoint.state
            click.echo(f"↩️  Продолжаем с шага {state.step}")

        overrides = {"seed": seed, "total_steps": total_steps, "batch_size": batch_size}
        if no_dis:
            overrides["use_discriminator"] = False
        if no_svma:
            overrides["use_svma"] = False
        config = build_train_config(file_values, overrides)

        data = load_dataset(dataset_path)
        if selected:
            data = data.select(selected)

        checkpoint_path = out_dir / "checkpoint.pt"
        log_path = out_dir / "train_log.csv"
        out_dir.mkdir(parents=True, exist_ok=True)
        write_manifest(out_dir, RunManifest(
            command="train",
            config=config.model_dump(),
            datasets={str(dataset_path): fingerprint(dataset_path)},
            subjects=selected,
            seed=config.seed,
            outputs={"checkpoint": checkpoint_path.name, "log": log_path.name},
        ))

        with TrainingLog(log_path, append=resume is not None) as training_log:
            sinks = TrainSinks(log=training_log, checkpoint_path=checkpoint_path, progress=progress)
            state = train(data, config, sinks, state)

        span.set_attribute("steps", state.step)
        click.echo(f"✅ Обучение завершено: шаг {state.step}, чекпоинт {checkpoint_path}")
        click.echo(
            f"   ограничений глубины: {state.counters['depth_clamps']}, "
            f"вырожденных ориентаций: {state.counters['degenerate_orientations']}"
        )
