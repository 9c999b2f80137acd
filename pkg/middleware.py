"""
Request middleware for the Flask application
Rate limiting for the expensive endpoints, optional API key, request logging
"""
import os
from collections import defaultdict, deque
from datetime import datetime, timedelta
from functools import wraps
from typing import Deque, Dict

from flask import request

from error_handlers import RateLimitError, UnauthorizedError
from logger_config import setup_logger, timed

logger = setup_logger("middleware")

# in-memory sliding windows, one per endpoint prefix and client
rate_limit_storage: Dict[str, Deque[datetime]] = defaultdict(deque)


def get_client_ip() -> str:
    """X-Forwarded-For, then X-Real-IP, then the socket address"""
    forwarded = request.headers.get("X-Forwarded-For")
    if forwarded:
        return forwarded.split(",")[0].strip()
    return request.headers.get("X-Real-IP") or request.remote_addr or "unknown"


def rate_limit(max_requests: int = 60, window_seconds: int = 60, key_prefix: str = "default"):
    """
    Rate limiting decorator

    Enumeration-backed endpoints (atlas, h1 over everything) run for seconds,
    so they get a tighter budget than the single-object ones.

    Usage:
        @rate_limit(max_requests=5, window_seconds=60, key_prefix="atlas")
        def atlas():
            ...
    """

    def decorator(f):
        @wraps(f)
        def wrapper(*args, **kwargs):
            client_ip = get_client_ip()
            key = f"{key_prefix}:{client_ip}"
            now = datetime.now()
            window = rate_limit_storage[key]
            cutoff = now - timedelta(seconds=window_seconds)
            while window and window[0] <= cutoff:
                window.popleft()

            if len(window) >= max_requests:
                retry_after = max(
                    int((window[0] + timedelta(seconds=window_seconds) - now).total_seconds()), 1
                )
                logger.warning(
                    f"Rate limit exceeded for {client_ip} on {key_prefix} "
                    f"({len(window)}/{max_requests} requests)"
                )
                raise RateLimitError(
                    f"Too many requests. Limit: {max_requests} per {window_seconds}s",
                    payload={"retry_after": retry_after},
                )

            window.append(now)
            response = f(*args, **kwargs)
            response_obj = response[0] if isinstance(response, tuple) else response
            if hasattr(response_obj, "headers"):
                response_obj.headers["X-RateLimit-Limit"] = str(max_requests)
                response_obj.headers["X-RateLimit-Remaining"] = str(max(0, max_requests - len(window)))
            return response

        return wrapper

    return decorator


def require_api_key(f):
    """
    Require X-API-Key or Authorization: Bearer when API_KEY is set;
    open otherwise
    """

    @wraps(f)
    def wrapper(*args, **kwargs):
        configured = os.getenv("API_KEY")
        if not configured:
            return f(*args, **kwargs)

        supplied = request.headers.get("X-API-Key")
        auth_header = request.headers.get("Authorization", "")
        if not supplied and auth_header.startswith("Bearer "):
            supplied = auth_header[7:]

        if not supplied:
            logger.warning(f"Missing API key from {get_client_ip()} for {request.endpoint}")
            raise UnauthorizedError("API key required via X-API-Key or Authorization: Bearer")
        if supplied != configured:
            logger.warning(f"Invalid API key from {get_client_ip()} for {request.endpoint}")
            raise UnauthorizedError("Invalid API key")
        return f(*args, **kwargs)

    return wrapper


def request_logger(f):
    """Log method, path, client, status and duration of each request"""

    @wraps(f)
    def wrapper(*args, **kwargs):
        with timed(logger, f"{request.method} {request.path}", client_ip=get_client_ip()) as info:
            response = f(*args, **kwargs)
            info["status_code"] = response[1] if isinstance(response, tuple) else response.status_code
        return response

    return wrapper
