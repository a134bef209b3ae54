"""Конфигурация обучения: плоский YAML-документ с именами полей TrainConfig."""

from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.config import CAMERA_DISTANCE, DEVICE, MIN_DEPTH
from src.errors import ConfigurationError
from src.losses import LossWeights
from src.networks import NetworkConfig

# Ключи запуска, которые не относятся к TrainConfig
RUN_KEYS = ("dataset", "out", "subjects")


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(5.5e-5, gt=0.0)
    adam_beta1: float = Field(0.7, ge=0.0, lt=1.0)
    adam_beta2: float = Field(0.9, ge=0.0, lt=1.0)
    adam_eps: float = Field(1e-8, gt=0.0)
    batch_size: int = Field(512, gt=1)
    total_steps: int = Field(50_000, ge=0)
    critic_ratio: int = Field(5, ge=1)
    seed: int = 0

    use_discriminator: bool = True
    use_svma: bool = True

    lambda_angle: float = Field(1.0, ge=0.0)
    lambda_cam: float = Field(1.0, ge=0.0)
    lambda_sym: float = Field(0.01, ge=0.0)
    lambda_3d: float = Field(0.1, ge=0.0)
    lambda_svma: float = Field(10.0, ge=0.0)
    lambda_gp: float = Field(10.0, ge=0.0)

    d: float = Field(CAMERA_DISTANCE, gt=0.0)
    min_depth: float = Field(MIN_DEPTH, gt=0.0)

    width: int = Field(1024, gt=0)
    dropout: float = Field(0.25, ge=0.0, lt=1.0)
    leaky_slope: float = Field(0.01, ge=0.0)

    log_every: int = Field(100, gt=0)
    checkpoint_every: int = Field(1000, gt=0)
    eval_every: int = Field(1000, gt=0)
    holdout_fraction: float = Field(0.1, ge=0.0, lt=1.0)
    device: str = DEVICE

    @property
    def weights(self) -> LossWeights:
        return LossWeights(
            lambda_angle=self.lambda_angle,
            lambda_cam=self.lambda_cam,
            lambda_sym=self.lambda_sym,
            lambda_3d=self.lambda_3d,
            lambda_svma=self.lambda_svma,
            lambda_gp=self.lambda_gp,
        )

    def network(self, num_joints: int) -> NetworkConfig:
        return NetworkConfig(num_joints=num_joints, width=self.width, dropout=self.dropout, leaky_slope=self.leaky_slope)


def load_config_file(path: Optional[str | Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config: файл {path} не найден.")
    with path.open(encoding="utf-8") as fh:
        values = yaml.safe_load(fh) or {}
    if not isinstance(values, dict):
        raise ConfigurationError("config: ожидается плоский документ ключ-значение.")
    nested = [k for k, v in values.items() if isinstance(v, dict)]
    if nested:
        raise ConfigurationError(f"config: вложенные секции не поддерживаются ({', '.join(nested)}).")
    return values


def build_train_config(file_values: Dict[str, Any], overrides: Dict[str, Any]) -> TrainConfig:
    """Собирает TrainConfig: переопределения CLI важнее значений файла.

    Raises:
        ConfigurationError: с именем поля, не прошедшего валидацию.
    """
    merged = {k: v for k, v in file_values.items() if k not in RUN_KEYS}
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return TrainConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        raise ConfigurationError(f"Некорректная конфигурация: {problems}") from e
