"""Метрики Prometheus для svma-lifter."""

from prometheus_client import Counter

# Публичные метрики
COMMAND_CALLS = Counter(
    "command_calls_total",
    "Общее количество вызовов команд CLI",
    ["command", "status"],
)

EXECUTION_ERRORS = Counter(
    "execution_errors_total",
    "Количество ошибок при выполнении команд",
    ["command", "error_type"],
)

DEPTH_CLAMPS = Counter(
    "depth_clamps_total",
    "Суставы, глубина которых была ограничена снизу при подъёме в 3D",
)

DEGENERATE_ORIENTATIONS = Counter(
    "degenerate_orientations_total",
    "Позы с нулевым вектором лица или плеч в L_angle",
)

SKIPPED_FRAMES = Counter(
    "skipped_frames_total",
    "Кадры, пропущенные при загрузке или предобработке",
    ["reason"],
)

TRAIN_STEPS = Counter(
    "train_steps_total",
    "Шаги оптимизации",
    ["phase"],
)
