"""
Input validation for documents exchanged by the CLI and the API
Turns raw JSON into domain objects, reporting the offending field
"""
from functools import wraps
from typing import Any, Dict, Optional

from flask import jsonify, request

from cell_classifier import CoefficientAssignment
from errors import CubeKsbaError, InvalidInput
from exact_kernel import to_rational
from subdivisions import HeightFunction, Subdivision, validate
from vinberg import LATTICES, GramLattice, named_lattice


class ValidationError(InvalidInput):
    """Malformed request document"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message, payload={"field": field} if field else None)
        self.field = field


def _mapping(data: Any, key: str) -> Dict[str, Any]:
    """Accept either {key: {...}} or the bare mapping"""
    if not isinstance(data, dict) or not data:
        raise ValidationError("Request body is required", key)
    inner = data.get(key, data)
    if not isinstance(inner, dict):
        raise ValidationError(f"{key} must be an object keyed by vertex bitstrings", key)
    return inner


def validate_positive_int(value: Any, field_name: str, maximum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{field_name} must be an integer", field_name)
    if value < 1:
        raise ValidationError(f"{field_name} must be positive", field_name)
    if maximum is not None and value > maximum:
        raise ValidationError(f"{field_name} must be at most {maximum}", field_name)
    return value


def validate_subdivision_payload(data: Any) -> Subdivision:
    """
    {"cells": [[[x, y, z], ...], ...]} checked for cover and proper intersection

    Raises:
        ValidationError: malformed document or invalid subdivision
    """
    if isinstance(data, dict) and isinstance(data.get("subdivision"), dict):
        data = data["subdivision"]
    try:
        return validate(Subdivision.from_json(data))
    except ValidationError:
        raise
    except CubeKsbaError as e:
        raise ValidationError(e.message, "cells") from e


def validate_heights_payload(data: Any) -> HeightFunction:
    """Eight rationals keyed "000".."111", as ints or "p/q" strings"""
    try:
        return HeightFunction.from_mapping(_mapping(data, "heights"))
    except ValidationError:
        raise
    except CubeKsbaError as e:
        raise ValidationError(e.message, "heights") from e


def validate_coefficients_payload(data: Any) -> CoefficientAssignment:
    try:
        return CoefficientAssignment.from_mapping(_mapping(data, "coefficients"))
    except ValidationError:
        raise
    except CubeKsbaError as e:
        raise ValidationError(e.message, "coefficients") from e


def validate_gram_payload(data: Any) -> GramLattice:
    """{"gram": [[...], ...]}: integer, symmetric, signature (1, n)"""
    gram = data.get("gram") if isinstance(data, dict) else data
    if not isinstance(gram, list) or not gram or not all(isinstance(row, list) for row in gram):
        raise ValidationError("gram must be a square integer matrix", "gram")
    if any(len(row) != len(gram) for row in gram):
        raise ValidationError("gram must be square", "gram")
    if any(isinstance(x, bool) or not isinstance(x, int) for row in gram for x in row):
        raise ValidationError("gram entries must be integers", "gram")
    try:
        return GramLattice.of(gram, name=data.get("name", "custom") if isinstance(data, dict) else "custom")
    except CubeKsbaError as e:
        raise ValidationError(e.message, "gram") from e


def validate_vinberg_request(data: Any) -> Dict[str, Any]:
    """
    Lattice by name or Gram matrix, initial vector, height bound and optional window

    Returns:
        {"lattice": GramLattice, "v0": tuple, "max_height": int, "window": int or None}
    """
    if not isinstance(data, dict) or not data:
        raise ValidationError("Request body is required")
    if "gram" in data:
        lattice = validate_gram_payload(data)
        v0 = data.get("v0")
    else:
        name = data.get("lattice", "even")
        if name not in LATTICES:
            raise ValidationError(f"lattice must be one of {', '.join(LATTICES)}", "lattice")
        lattice, default_v0 = named_lattice(name)
        v0 = data.get("v0", default_v0)
    if not isinstance(v0, (list, tuple)) or len(v0) != lattice.rank:
        raise ValidationError(f"v0 must have {lattice.rank} integer entries", "v0")
    if any(isinstance(x, bool) or not isinstance(x, int) for x in v0):
        raise ValidationError("v0 entries must be integers", "v0")
    window = data.get("window")
    return {
        "lattice": lattice,
        "v0": tuple(v0),
        "max_height": validate_positive_int(data.get("max_height", 10), "max_height", maximum=50),
        "window": None if window is None else validate_positive_int(window, "window", maximum=20),
    }


def validate_classify_request(data: Any) -> Dict[str, Any]:
    if not isinstance(data, dict) or "subdivision" not in data or "coefficients" not in data:
        raise ValidationError("subdivision and coefficients are required")
    return {
        "subdivision": validate_subdivision_payload(data["subdivision"]),
        "coefficients": validate_coefficients_payload(data["coefficients"]),
    }


def validate_bullet_request(data: Any) -> Dict[str, Any]:
    """Exactly one of subdivision / heights"""
    if not isinstance(data, dict) or ("subdivision" in data) == ("heights" in data):
        raise ValidationError("Provide exactly one of subdivision or heights")
    if "heights" in data:
        return {"heights": validate_heights_payload(data)}
    return {"subdivision": validate_subdivision_payload(data["subdivision"])}


def validate_rational(value: Any, field_name: str):
    try:
        return to_rational(value)
    except CubeKsbaError as e:
        raise ValidationError(e.message, field_name) from e


def validate_request(validator_func):
    """
    Decorator to validate request data using a validator function

    Usage:
        @validate_request(validate_heights_payload)
        def from_heights_endpoint():
            h = request.validated_data
            ...
    """

    def decorator(f):
        @wraps(f)
        def wrapper(*args, **kwargs):
            try:
                data = request.get_json(silent=True)
                request.validated_data = validator_func(data)
            except ValidationError as e:
                return jsonify({"error": e.message, "field": e.field}), 400
            except Exception:
                return jsonify({"error": "Invalid request data"}), 400
            return f(*args, **kwargs)

        return wrapper

    return decorator
