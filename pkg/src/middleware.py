"""
Middleware for request logging and timing.
"""

import logging
import time
import uuid
from typing import Callable, List, Optional

from fastapi import Request, Response
from starlette.middleware.base import BaseHTTPMiddleware

from .logging_config import get_logger_with_context


class LoggingMiddleware(BaseHTTPMiddleware):
    """Log every request with an id and its processing time."""

    def __init__(self, app, logger_name: str = "src.middleware", slow_seconds: float = 5.0):
        super().__init__(app)
        self.logger_name = logger_name
        self.slow_seconds = slow_seconds

    async def dispatch(self, request: Request, call_next: Callable) -> Response:
        request_id = str(uuid.uuid4())[:8]
        request.state.request_id = request_id
        log = get_logger_with_context(self.logger_name, request_id=request_id)
        start_time = time.perf_counter()

        log.info(f"[{request_id}] {request.method} {request.url.path} - Started")
        if request.query_params:
            log.debug(f"[{request_id}] Query params: {dict(request.query_params)}")

        try:
            response = await call_next(request)
        except Exception as exc:
            process_time = time.perf_counter() - start_time
            log.error(
                f"[{request_id}] {request.method} {request.url.path} - ERROR - {process_time:.3f}s - {exc}",
                exc_info=True,
            )
            raise

        process_time = time.perf_counter() - start_time
        level = logging.WARNING if process_time > self.slow_seconds else logging.INFO
        log.log(
            level,
            f"[{request_id}] {request.method} {request.url.path} - {response.status_code} - {process_time:.3f}s",
        )
        response.headers["X-Request-ID"] = request_id
        response.headers["X-Process-Time"] = f"{process_time:.3f}"
        return response


class HealthCheckMiddleware(BaseHTTPMiddleware):
    """Keep health probes out of the info log."""

    def __init__(self, app, health_paths: Optional[List[str]] = None):
        super().__init__(app)
        self.health_paths = health_paths or ["/health", "/"]
        self.logger = logging.getLogger("src.middleware.healthcheck")

    async def dispatch(self, request: Request, call_next: Callable) -> Response:
        if request.url.path in self.health_paths:
            self.logger.debug(f"Health check: {request.method} {request.url.path}")
        return await call_next(request)
