"""Adam в функциональной форме: моменты хранятся в состоянии обучения."""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import torch
from torch.optim.adam import adam

from src.validators import check_finite


@dataclass
class AdamMoments:
    exp_avg: List[torch.Tensor]
    exp_avg_sq: List[torch.Tensor]
    steps: List[torch.Tensor]

    @classmethod
    def zeros_like(cls, params: Sequence[torch.Tensor]) -> "AdamMoments":
        return cls(
            exp_avg=[torch.zeros_like(p) for p in params],
            exp_avg_sq=[torch.zeros_like(p) for p in params],
            steps=[torch.tensor(0.0) for _ in params],
        )

    def state_dict(self) -> dict:
        return {"exp_avg": self.exp_avg, "exp_avg_sq": self.exp_avg_sq, "steps": self.steps}

    @classmethod
    def from_state_dict(cls, state: dict) -> "AdamMoments":
        return cls(exp_avg=list(state["exp_avg"]), exp_avg_sq=list(state["exp_avg_sq"]), steps=list(state["steps"]))


def adam_update(
    params: Sequence[torch.Tensor],
    grads: Sequence[torch.Tensor],
    moments: AdamMoments,
    config,
) -> Tuple[Sequence[torch.Tensor], AdamMoments]:
    """Один шаг Adam с коррекцией смещения (параметры и моменты меняются на месте).

    config — любой объект с learning_rate, adam_beta1, adam_beta2, adam_eps.

    Raises:
        NumericFaultError: если градиент содержит NaN или inf.
    """
    for i, g in enumerate(grads):
        check_finite(g, f"grad[{i}]")
    with torch.no_grad():
        adam(
            list(params),
            list(grads),
            moments.exp_avg,
            moments.exp_avg_sq,
            [],
            moments.steps,
            foreach=False,
            amsgrad=False,
            beta1=config.adam_beta1,
            beta2=config.adam_beta2,
            lr=config.learning_rate,
            weight_decay=0.0,
            eps=config.adam_eps,
            maximize=False,
        )
    return params, moments
