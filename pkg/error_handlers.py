"""
Centralized error handling for the Flask application
Domain errors render through their own status codes; failed internal
cross-checks and everything unexpected become logged 500s
"""
import traceback
from typing import Tuple

from flask import Flask, jsonify
from werkzeug.exceptions import HTTPException

from errors import CubeKsbaError
from logger_config import setup_logger

logger = setup_logger("error_handlers")


class APIError(Exception):
    """Transport-level errors with no domain meaning"""

    def __init__(self, message: str, status_code: int = 500, payload: dict = None):
        super().__init__()
        self.message = message
        self.status_code = status_code
        self.payload = payload or {}

    def to_dict(self):
        rv = dict(self.payload)
        rv["error"] = self.message
        rv["status_code"] = self.status_code
        return rv


class UnauthorizedError(APIError):
    """401 Unauthorized"""

    def __init__(self, message: str = "Unauthorized", payload: dict = None):
        super().__init__(message, 401, payload)


class RateLimitError(APIError):
    """429 Too Many Requests"""

    def __init__(self, message: str = "Rate limit exceeded", payload: dict = None):
        super().__init__(message, 429, payload)


def register_error_handlers(app: Flask):
    """
    Register error handlers with Flask app

    Args:
        app: Flask application instance
    """

    @app.errorhandler(CubeKsbaError)
    def handle_domain_error(error: CubeKsbaError) -> Tuple[dict, int]:
        logger.warning(
            f"{type(error).__name__}: {error.message}",
            extra={"status_code": error.status_code, "payload": error.payload},
        )
        return jsonify(error.to_dict()), error.status_code

    @app.errorhandler(APIError)
    def handle_api_error(error: APIError) -> Tuple[dict, int]:
        logger.error(
            f"API Error: {error.message}",
            extra={"status_code": error.status_code, "payload": error.payload},
        )
        return jsonify(error.to_dict()), error.status_code

    @app.errorhandler(HTTPException)
    def handle_http_error(error: HTTPException) -> Tuple[dict, int]:
        """Routing and protocol errors (400, 404, 405, ...)"""
        logger.warning(f"{error.code} {error.name}: {error.description}")
        return jsonify({"error": error.name, "message": error.description}), error.code

    @app.errorhandler(ArithmeticError)
    def handle_consistency_error(error: ArithmeticError) -> Tuple[dict, int]:
        """A witness or enumeration failed its own re-check"""
        logger.error(
            f"Consistency check failed: {error}",
            exc_info=True,
            extra={"traceback": traceback.format_exc()},
        )
        return jsonify({"error": "Consistency check failed", "message": str(error)}), 500

    @app.errorhandler(Exception)
    def handle_unexpected_error(error: Exception) -> Tuple[dict, int]:
        logger.error(
            f"Unexpected error: {error}",
            exc_info=True,
            extra={"traceback": traceback.format_exc()},
        )
        return (
            jsonify({"error": "Internal server error", "message": "An unexpected error occurred"}),
            500,
        )
