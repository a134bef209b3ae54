"""Команда сравнения вариантов обучения."""

from pathlib import Path
from typing import Optional

import click
import yaml

from src.cli_instance import cli
from src.commands.train import DEFAULT_OUT
from src.commands.utils import command_span, parse_list, resolve_dataset
from src.data.keypoints import load_dataset
from src.manifest import RunManifest, fingerprint, write_manifest
from src.training.ablation import VARIANTS, run_ablation
from src.training.config import build_train_config, load_config_file


@cli.command(name="ablate", help="Обучает варианты без критика, без SVMA и полный, сравнивает P-MPJPE.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--data", "dataset", default=None)
@click.option("--seed", type=int, default=None)
@click.option("--steps", "total_steps", type=int, default=None)
@click.option("--subjects", default=None)
@click.option("--out", default=None)
@click.option("--progress/--no-progress", default=False)
def ablate_command(
    config_path: Optional[str],
    dataset: Optional[str],
    seed: Optional[int],
    total_steps: Optional[int],
    subjects: Optional[str],
    out: Optional[str],
    progress: bool,
) -> None:
    with command_span("ablate", dataset=dataset, seed=seed):
        file_values = load_config_file(config_path)
        dataset_path = resolve_dataset(dataset or file_values.get("dataset"))
        out_dir = Path(out or file_values.get("out") or f"{DEFAULT_OUT}_ablation")
        selected = parse_list(subjects or file_values.get("subjects"))
        config = build_train_config(file_values, {"seed": seed, "total_steps": total_steps})

        data = load_dataset(dataset_path)
        if selected:
            data = data.select(selected)

        out_dir.mkdir(parents=True, exist_ok=True)
        write_manifest(out_dir, RunManifest(
            command="ablate",
            config=config.model_dump(),
            datasets={str(dataset_path): fingerprint(dataset_path)},
            subjects=selected,
            seed=config.seed,
            outputs={name: f"{name}/checkpoint.pt" for name in VARIANTS} | {"summary": "ablation.yaml"},
        ))

        reports = run_ablation(data, config, out_dir, progress=progress)
        with (out_dir / "ablation.yaml").open("w", encoding="utf-8") as fh:
            yaml.safe_dump({name: r.model_dump() for name, r in reports.items()}, fh, sort_keys=False, allow_unicode=True)

        click.echo(f"{'вариант':<14} {'P-MPJPE, мм':>12} {'PCK@150':>8} {'AUC':>6}")
        for name, report in reports.items():
            click.echo(f"{name:<14} {report.p_mpjpe:>12.1f} {report.pck150:>8.1f} {report.auc:>6.3f}")
