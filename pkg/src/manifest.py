"""Манифест запуска: всё, что нужно для повтора команды."""

import hashlib
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel

from src import __version__
from src.errors import ConfigurationError

MANIFEST_NAME = "manifest.yaml"


class RunManifest(BaseModel):
    command: str
    config: Dict[str, Any]
    datasets: Dict[str, str]
    code_version: str = __version__
    subjects: Optional[List[str]] = None
    seed: int
    outputs: Dict[str, str]


def fingerprint(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(directory: str | Path, manifest: RunManifest) -> Path:
    """Пишет (перезаписывает) единственный manifest.yaml каталога артефактов."""
    path = Path(directory) / MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        yaml.safe_dump(manifest.model_dump(), fh, sort_keys=True, allow_unicode=True)
    return path


def read_manifest(path: str | Path) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    if not path.is_file():
        raise ConfigurationError(f"manifest: файл {path} не найден.")
    with path.open(encoding="utf-8") as fh:
        return RunManifest(**yaml.safe_load(fh))


def verify_datasets(manifest: RunManifest) -> None:
    for dataset, digest in manifest.datasets.items():
        if not Path(dataset).is_file():
            raise ConfigurationError(f"dataset: файл {dataset} из манифеста не найден.")
        if fingerprint(dataset) != digest:
            raise ConfigurationError(f"dataset: содержимое {dataset} изменилось после запуска.")
