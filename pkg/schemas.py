"""
JSON schemas for every document the toolkit reads or writes, and the OpenAPI
description of the HTTP service built from them
"""

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
    ],
    "description": 'Exact rational: an integer or a "p/q" string',
}

VERTEX_KEY = r"^[01]{3}$"

SCHEMAS = {
    "Cell": {
        "type": "array",
        "description": "Vertices of a full-dimensional cell of the unit cube",
        "minItems": 4,
        "maxItems": 8,
        "items": {
            "type": "array",
            "items": {"type": "integer", "enum": [0, 1]},
            "minItems": 3,
            "maxItems": 3,
        },
    },
    "Subdivision": {
        "type": "object",
        "required": ["cells"],
        "properties": {"cells": {"type": "array", "items": {"$ref": "#/components/schemas/Cell"}}},
    },
    "Heights": {
        "type": "object",
        "required": ["heights"],
        "properties": {
            "heights": {
                "type": "object",
                "patternProperties": {VERTEX_KEY: RATIONAL},
                "additionalProperties": False,
                "minProperties": 8,
                "maxProperties": 8,
            }
        },
    },
    "Coefficients": {
        "type": "object",
        "required": ["coefficients"],
        "properties": {
            "coefficients": {
                "type": "object",
                "patternProperties": {VERTEX_KEY: RATIONAL},
                "additionalProperties": False,
                "minProperties": 8,
                "maxProperties": 8,
            }
        },
    },
    "Gram": {
        "type": "object",
        "required": ["gram"],
        "properties": {
            "name": {"type": "string"},
            "gram": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        },
    },
    "Diagram": {
        "type": "object",
        "required": ["gram"],
        "description": "Gram matrix of a root set; labels default to vertex numbers",
        "properties": {
            "gram": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
            "labels": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        },
    },
    "RegularityReport": {
        "type": "object",
        "required": ["regular"],
        "properties": {
            "regular": {"type": "boolean"},
            "witness": {"$ref": "#/components/schemas/Heights"},
            "refutation": {
                "type": "object",
                "properties": {
                    "strict": {"type": "array", "items": RATIONAL},
                    "inequalities": {"type": "array", "items": RATIONAL},
                    "equalities": {"type": "array", "items": RATIONAL},
                },
            },
        },
    },
    "BulletReport": {
        "type": "object",
        "required": ["subdivision"],
        "properties": {
            "subdivision": {"$ref": "#/components/schemas/Subdivision"},
            "heights": {"$ref": "#/components/schemas/Heights"},
            "drops": {"type": "object", "patternProperties": {VERTEX_KEY: RATIONAL}},
            "corner_cuts": {"type": "array"},
        },
    },
    "DegenerationReport": {
        "type": "object",
        "required": ["components", "case", "cusp", "cells"],
        "properties": {
            "components": {"type": "integer"},
            "case": {"type": "string", "enum": ["I", "II", "III"]},
            "cusp": {"type": "string", "enum": ["not-a-cusp", "even", "odd1", "odd2", "unassigned"]},
            "cells": {"type": "array"},
        },
    },
    "H1Report": {
        "type": "object",
        "required": ["rank", "torsion", "trivial"],
        "properties": {
            "rank": {"type": "integer"},
            "torsion": {"type": "array", "items": {"type": "integer"}},
            "trivial": {"type": "boolean"},
            "reduction": {"type": "string", "enum": ["trivial-by-reduction", "inconclusive"]},
        },
    },
    "VinbergReport": {
        "type": "object",
        "required": ["lattice", "gram", "v0", "accepted", "terminated"],
        "properties": {
            "lattice": {"type": "string"},
            "gram": {"type": "array"},
            "v0": {"type": "array", "items": {"type": "integer"}},
            "accepted": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "root": {"type": "array", "items": {"type": "integer"}},
                        "height": {"type": "integer"},
                    },
                },
            },
            "rejected": {"type": "integer"},
            "terminated": {"type": "boolean"},
            "last_height": {"type": "integer"},
        },
    },
    "InvariantsReport": {
        "type": "object",
        "required": ["hexagon_square", "covers"],
        "properties": {
            "hexagon_square": {"type": "string"},
            "hexagon_identity_holds": {"type": "boolean"},
            "covers": {"type": "array"},
            "log_canonical": {"type": "object"},
        },
    },
    "Atlas": {
        "type": "object",
        "required": ["strata", "census"],
        "properties": {"strata": {"type": "array"}, "census": {"type": "object"}},
    },
    "ErrorResponse": {
        "type": "object",
        "required": ["error", "message"],
        "properties": {
            "error": {"type": "string"},
            "message": {"type": "string"},
            "status_code": {"type": "integer"},
            "field": {"type": "string"},
        },
    },
}


def _ref(schema: str) -> dict:
    return {"application/json": {"schema": {"$ref": f"#/components/schemas/{schema}"}}}


def _json_body(schema: str) -> dict:
    return {"required": True, "content": _ref(schema)}


def _responses(schema: str) -> dict:
    return {
        "200": {"description": "Success", "content": _ref(schema)},
        "400": {"description": "Invalid document", "content": _ref("ErrorResponse")},
        "422": {"description": "Rejected by the domain", "content": _ref("ErrorResponse")},
    }


def _operation(summary: str, response: str, body: str = None) -> dict:
    operation = {"summary": summary, "responses": _responses(response)}
    if body is not None:
        operation["requestBody"] = _json_body(body)
    return operation


OPENAPI_SPEC = {
    "openapi": "3.0.3",
    "info": {
        "title": "Cube KSBA Toolkit API",
        "version": "1.0.0",
        "description": "Subdivisions of the marked unit cube, the bullet map, "
        "degeneration classification, torus cohomology and Vinberg's algorithm.",
    },
    "servers": [{"url": "http://localhost:5001", "description": "Local development server"}],
    "paths": {
        "/api/health": {"get": {"summary": "Health check", "responses": {"200": {"description": "OK"}}}},
        "/api/from-heights": {"post": _operation("Subdivision induced by heights", "Subdivision", "Heights")},
        "/api/regularity": {
            "post": _operation("Regularity with witness or refutation", "RegularityReport", "Subdivision")
        },
        "/api/bullet": {"post": _operation("Bullet map on a subdivision or heights", "BulletReport")},
        "/api/classify": {"post": _operation("Degeneration classification", "DegenerationReport")},
        "/api/h1": {"post": _operation("H^1 of the torus sheaf", "H1Report", "Subdivision")},
        "/api/vinberg": {"post": _operation("Run Vinberg's algorithm", "VinbergReport")},
        "/api/invariants": {"get": _operation("Intersection invariants", "InvariantsReport")},
        "/api/atlas": {"get": _operation("Boundary stratification", "Atlas")},
        "/api/schemas": {"get": {"summary": "All document schemas", "responses": {"200": {"description": "OK"}}}},
    },
    "components": {"schemas": SCHEMAS},
}
