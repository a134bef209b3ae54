"""Инициализация OpenTelemetry для трейсинга.

Если задан OTEL_ENDPOINT, настраивается OTLP экспорт через OpenTelemetry SDK,
иначе трейсер остаётся no-op.
"""

from opentelemetry import trace
from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor

from src import __version__
from src.config import OTEL_ENDPOINT, OTEL_SERVICE_NAME, logger

log = logger.getChild("tracing")


def init_tracing(endpoint: str = OTEL_ENDPOINT) -> bool:
    if not endpoint:
        log.debug("OTEL_ENDPOINT не задан, трейсинг выключен")
        return False
    try:
        tracer_provider = TracerProvider(
            resource=Resource.create({
                "service.name": OTEL_SERVICE_NAME,
                "service.version": __version__,
            })
        )
        tracer_provider.add_span_processor(BatchSpanProcessor(OTLPSpanExporter(endpoint=endpoint)))
        trace.set_tracer_provider(tracer_provider)
        log.info("OpenTelemetry настроен для OTLP экспорта: %s", endpoint)
        return True
    except Exception as e:
        log.warning("Не удалось инициализировать OpenTelemetry: %s. Продолжаем без трейсинга", e)
        return False
