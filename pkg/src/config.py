import os
import logging

from dotenv import load_dotenv, find_dotenv

load_dotenv(find_dotenv(usecwd=True))

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s %(message)s",
)
logger = logging.getLogger("svma_lifter")

# Геометрия камеры (расстояние до скелета и фокус f = 1)
CAMERA_DISTANCE = float(os.getenv("SVMA_CAMERA_DISTANCE", "10.0"))
MIN_DEPTH = float(os.getenv("SVMA_MIN_DEPTH", "1.0"))

DEVICE = os.getenv("SVMA_DEVICE", "cpu")
NUM_THREADS = int(os.getenv("SVMA_NUM_THREADS", "0"))

OTEL_ENDPOINT = os.getenv("OTEL_ENDPOINT", "").strip()
OTEL_SERVICE_NAME = os.getenv("OTEL_SERVICE_NAME", "svma-lifter")

# Сетка порогов PCK/AUC, мм: 0..150 с шагом 5 (31 точка)
PCK_THRESHOLD_MM = 150.0
AUC_GRID_STEP_MM = 5.0

# Масштаб синтетического тела: мм на единицу нормализованной позы
SYNTHETIC_SCALE_MM = 480.0

CHECKPOINT_VERSION = 1

# Защитные лимиты
MAX_KEYPOINT_FRAMES = int(os.getenv("SVMA_MAX_KEYPOINT_FRAMES", "5000000"))
MAX_PLOT_VIEWS = int(os.getenv("SVMA_MAX_PLOT_VIEWS", "8"))
