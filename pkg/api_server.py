"""
Flask API server for the cube KSBA toolkit
Exposes the single-object operations over JSON; batch work stays in the CLI
"""

from flask import Flask, Response, jsonify, redirect, request
from flask_cors import CORS

from cell_classifier import classify_report
from config import API_PORT, CORS_ORIGINS, FLASK_ENV, LOG_FILE
from corner_cuts import apex_drops, detect, modify, modify_heights
from cube_geometry import point_key
from error_handlers import register_error_handlers
from exact_kernel import format_rational
from intersection_theory import invariants_report
from logger_config import setup_logger
from middleware import rate_limit, request_logger, require_api_key
from schemas import OPENAPI_SPEC, SCHEMAS
from strata_atlas import boundary_atlas, maximal_components
from subdivisions import from_heights, is_regular, stratum_dimension
from torus_cohomology import h1_torus, reduce_and_verdict
from validators import (
    validate_bullet_request,
    validate_classify_request,
    validate_heights_payload,
    validate_request,
    validate_subdivision_payload,
    validate_vinberg_request,
)
from vinberg import coxeter_diagram, vinberg_run

# Setup logging
logger = setup_logger("api_server")

app = Flask(__name__)

CORS(
    app,
    resources={r"/api/*": {"origins": CORS_ORIGINS}},
    methods=["GET", "POST", "OPTIONS"],
    allow_headers=["Content-Type", "X-API-Key", "Authorization"],
)

register_error_handlers(app)


@app.after_request
def add_security_headers(response):
    response.headers["X-Content-Type-Options"] = "nosniff"
    response.headers["X-Frame-Options"] = "DENY"
    return response


@app.route("/api/health", methods=["GET"])
def health():
    """
    Basic health check endpoint

    Returns:
        JSON with service status and metadata
    """
    logger.debug("Health check requested")
    return jsonify(
        {
            "status": "ok",
            "service": "Cube KSBA Toolkit API",
            "version": "1.0.0",
            "port": API_PORT,
            "environment": FLASK_ENV,
        }
    )


@app.route("/api/from-heights", methods=["POST"])
@rate_limit(max_requests=60, window_seconds=60, key_prefix="from_heights")
@request_logger
@validate_request(validate_heights_payload)
def from_heights_endpoint():
    """
    Regular subdivision induced by a height function

    Request body:
    {"heights": {"000": 0, "001": "1/2", ...}}
    """
    s = from_heights(request.validated_data)
    return jsonify(
        {
            **s.to_json(),
            "dimension": stratum_dimension(s, check_regular=False),
            "corner_cuts": [cut.to_json() for cut in detect(s).cuts],
        }
    )


@app.route("/api/regularity", methods=["POST"])
@rate_limit(max_requests=60, window_seconds=60, key_prefix="regularity")
@request_logger
@validate_request(validate_subdivision_payload)
def regularity_endpoint():
    """
    Regularity decision with a height witness or a Farkas refutation

    Request body:
    {"cells": [[[0, 0, 0], ...], ...]}
    """
    result = is_regular(request.validated_data)
    refutation = None
    if result.refutation is not None:
        refutation = {
            "strict": [format_rational(x) for x in result.refutation.strict_multipliers],
            "inequalities": [format_rational(x) for x in result.refutation.inequality_multipliers],
            "equalities": [format_rational(x) for x in result.refutation.equality_multipliers],
        }
    return jsonify(
        {
            "regular": result.regular,
            "witness": result.witness.to_json() if result.witness else None,
            "refutation": refutation,
        }
    )


@app.route("/api/bullet", methods=["POST"])
@rate_limit(max_requests=60, window_seconds=60, key_prefix="bullet")
@request_logger
@validate_request(validate_bullet_request)
def bullet_endpoint():
    """
    Bullet map on a subdivision, or on heights (returns the lowered heights too)

    Request body: exactly one of
    {"subdivision": {"cells": [...]}}
    {"heights": {"000": 0, ...}}
    """
    data = request.validated_data
    if "heights" in data:
        h = data["heights"]
        bullet = modify_heights(h)
        return jsonify(
            {
                "subdivision": from_heights(bullet).to_json(),
                "heights": bullet.to_json(),
                "drops": {point_key(m): format_rational(q) for m, q in sorted(apex_drops(h).items())},
                "corner_cuts": [cut.to_json() for cut in detect(from_heights(h)).cuts],
            }
        )
    s = data["subdivision"]
    return jsonify(
        {
            "subdivision": modify(s).to_json(),
            "corner_cuts": [cut.to_json() for cut in detect(s).cuts],
        }
    )


@app.route("/api/classify", methods=["POST"])
@rate_limit(max_requests=60, window_seconds=60, key_prefix="classify")
@request_logger
@validate_request(validate_classify_request)
def classify_endpoint():
    """
    Degeneration classification of a generic pair

    Request body:
    {"subdivision": {"cells": [...]}, "coefficients": {"000": 1, ...}}
    """
    data = request.validated_data
    return jsonify(classify_report(data["subdivision"], data["coefficients"]))


@app.route("/api/h1", methods=["POST"])
@rate_limit(max_requests=30, window_seconds=60, key_prefix="h1")
@request_logger
@validate_request(validate_subdivision_payload)
def h1_endpoint():
    s = request.validated_data
    return jsonify({**h1_torus(s).to_json(), "reduction": reduce_and_verdict(s)})


@app.route("/api/vinberg", methods=["POST"])
@rate_limit(max_requests=10, window_seconds=60, key_prefix="vinberg")
@require_api_key
@request_logger
@validate_request(validate_vinberg_request)
def vinberg_endpoint():
    """
    Vinberg's algorithm on a named lattice or a Gram matrix

    Request body:
    {"lattice": "even", "max_height": 6}
    {"gram": [[...]], "v0": [...], "max_height": 4, "window": 3}
    """
    params = request.validated_data
    result = vinberg_run(
        params["lattice"], params["v0"], params["max_height"], window=params["window"]
    )
    doc = result.to_json()
    if request.args.get("dot", "false").lower() == "true":
        doc["dot"] = coxeter_diagram(result.accepted, params["lattice"]).to_dot()
    return jsonify(doc)


@app.route("/api/invariants", methods=["GET"])
def invariants_endpoint():
    return jsonify(invariants_report())


@app.route("/api/atlas", methods=["GET"])
@rate_limit(max_requests=5, window_seconds=60, key_prefix="atlas")
@require_api_key
@request_logger
def atlas_endpoint():
    """
    Boundary stratification of the moduli compactification

    Query params:
        - format: json (default) or dot
    """
    atlas = boundary_atlas()
    if request.args.get("format") == "dot":
        return Response(atlas.to_dot(), mimetype="text/vnd.graphviz")
    return jsonify({**atlas.to_json(), "maximal_components": maximal_components(atlas)})


@app.route("/api/schemas", methods=["GET"])
def schemas_endpoint():
    return jsonify(SCHEMAS)


@app.route("/api/docs", methods=["GET"])
def api_docs():
    return redirect("/api/docs/swagger", code=302)


@app.route("/api/docs/openapi.json", methods=["GET"])
def openapi_spec():
    """
    Get OpenAPI specification

    Returns:
        OpenAPI 3.0 specification in JSON format
    """
    return jsonify(OPENAPI_SPEC)


@app.route("/api/docs/swagger", methods=["GET"])
def swagger_ui():
    swagger_html = """
    <!DOCTYPE html>
    <html lang="en">
    <head>
        <meta charset="UTF-8">
        <title>Cube KSBA Toolkit API - Documentation</title>
        <link rel="stylesheet" href="https://cdn.jsdelivr.net/npm/swagger-ui-dist@5/swagger-ui.css" />
    </head>
    <body>
        <div id="swagger-ui"></div>
        <script src="https://cdn.jsdelivr.net/npm/swagger-ui-dist@5/swagger-ui-bundle.js"></script>
        <script>
            window.onload = function() {
                SwaggerUIBundle({url: "/api/docs/openapi.json", dom_id: '#swagger-ui'});
            };
        </script>
    </body>
    </html>
    """
    return Response(swagger_html, mimetype="text/html")


if __name__ == "__main__":
    logger.info(f"Cube KSBA Toolkit API on port {API_PORT} ({FLASK_ENV}), log file {LOG_FILE}")
    for rule in sorted(app.url_map.iter_rules(), key=lambda r: r.rule):
        if rule.rule.startswith("/api/"):
            methods = ",".join(sorted(rule.methods - {"HEAD", "OPTIONS"}))
            logger.info(f"  {methods:<5} {rule.rule}")

    debug_mode = FLASK_ENV == "development"
    app.run(host="0.0.0.0", port=API_PORT, debug=debug_mode, use_reloader=False)
