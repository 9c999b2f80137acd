"""
Integration tests for Flask API server
"""
import json
from unittest.mock import Mock, patch

import pytest


class TestHealthEndpoint:
    """Tests for /api/health endpoint"""

    def test_health_check(self, client):
        """Test health check returns ok"""
        response = client.get("/api/health")
        data = json.loads(response.data)

        assert response.status_code == 200
        assert data["status"] == "ok"
        assert "service" in data
        assert "version" in data

    def test_health_check_response_structure(self, client):
        """Test health check response has correct structure"""
        response = client.get("/api/health")
        data = json.loads(response.data)

        for field in ["status", "service", "version", "port", "environment"]:
            assert field in data

    def test_security_headers(self, client):
        """Test nosniff and frame headers are set"""
        response = client.get("/api/health")
        assert response.headers["X-Content-Type-Options"] == "nosniff"
        assert response.headers["X-Frame-Options"] == "DENY"


class TestFromHeightsEndpoint:
    """Tests for /api/from-heights endpoint"""

    def test_corner_height(self, client, clear_rate_limits, sample_heights_document):
        """Test the corner height gives a corner cut"""
        response = client.post("/api/from-heights", json=sample_heights_document)
        data = response.get_json()

        assert response.status_code == 200
        assert len(data["cells"]) == 2
        assert data["dimension"] == 3
        assert data["corner_cuts"][0]["apex"] == [0, 0, 0]

    def test_requires_body(self, client, clear_rate_limits):
        """Test that an empty body is rejected"""
        response = client.post("/api/from-heights", json={})
        assert response.status_code == 400
        assert "error" in response.get_json()

    def test_invalid_json_rejected(self, client, clear_rate_limits):
        """Test that invalid JSON is rejected"""
        response = client.post(
            "/api/from-heights", data="not valid json", content_type="application/json"
        )
        assert response.status_code == 400

    def test_float_height_rejected(self, client, clear_rate_limits):
        """Test inexact heights are rejected with the field name"""
        body = {"heights": {k: 0.5 for k in ("000", "001", "010", "011", "100", "101", "110", "111")}}
        response = client.post("/api/from-heights", json=body)
        assert response.status_code == 400
        assert response.get_json()["field"] == "heights"


class TestRegularityEndpoint:
    """Tests for /api/regularity endpoint"""

    def test_regular(self, client, clear_rate_limits, sample_subdivision_document):
        """Test a corner cut is regular with a witness"""
        response = client.post("/api/regularity", json=sample_subdivision_document)
        data = response.get_json()

        assert response.status_code == 200
        assert data["regular"] is True
        assert len(data["witness"]["heights"]) == 8
        assert data["refutation"] is None

    @patch("api_server.is_regular")
    def test_internal_mismatch_is_500(
        self, mock_regular, client, clear_rate_limits, sample_subdivision_document
    ):
        """Test a failed witness cross-check surfaces as a server error"""
        mock_regular.side_effect = ArithmeticError("witness does not reproduce the subdivision")
        response = client.post("/api/regularity", json=sample_subdivision_document)
        assert response.status_code == 500
        assert response.get_json()["error"] == "Consistency check failed"


class TestBulletEndpoint:
    """Tests for /api/bullet endpoint"""

    def test_subdivision(self, client, clear_rate_limits, sample_subdivision_document):
        """Test the corner cut merges into the cube"""
        response = client.post("/api/bullet", json={"subdivision": sample_subdivision_document})
        data = response.get_json()

        assert response.status_code == 200
        assert len(data["subdivision"]["cells"]) == 1
        assert len(data["corner_cuts"]) == 1

    def test_heights(self, client, clear_rate_limits, sample_heights_document):
        """Test the apex drop is returned with the lowered heights"""
        response = client.post("/api/bullet", json=sample_heights_document)
        data = response.get_json()

        assert response.status_code == 200
        assert data["drops"] == {"000": "1"}
        assert data["heights"]["heights"]["000"] == "0"

    def test_both_sources_rejected(
        self, client, clear_rate_limits, sample_heights_document, sample_subdivision_document
    ):
        """Test that a request with both sources is rejected"""
        body = {**sample_heights_document, "subdivision": sample_subdivision_document}
        response = client.post("/api/bullet", json=body)
        assert response.status_code == 400


class TestClassifyEndpoint:
    """Tests for /api/classify endpoint"""

    def test_two_prisms(self, client, clear_rate_limits):
        """Test generic coefficients on the two prisms give two components"""
        prisms = {
            "cells": [
                [[0, 0, 0], [0, 1, 0], [0, 1, 1], [1, 0, 0], [1, 1, 0], [1, 1, 1]],
                [[0, 0, 0], [0, 0, 1], [0, 1, 1], [1, 0, 0], [1, 0, 1], [1, 1, 1]],
            ]
        }
        coefficients = {"000": 1, "001": 2, "010": 3, "011": 5, "100": 7, "101": 11, "110": 13, "111": 17}
        response = client.post(
            "/api/classify", json={"subdivision": prisms, "coefficients": coefficients}
        )
        data = response.get_json()

        assert response.status_code == 200
        assert data["components"] == 2
        assert [cell["type"] for cell in data["cells"]] == ["c", "c"]

    def test_corner_cut_refused(self, client, clear_rate_limits, sample_subdivision_document):
        """Test cells outside the four bullet types are a 422"""
        coefficients = {k: 1 for k in ("000", "001", "010", "011", "100", "101", "110", "111")}
        response = client.post(
            "/api/classify",
            json={"subdivision": sample_subdivision_document, "coefficients": coefficients},
        )
        assert response.status_code == 422
        assert response.get_json()["error"] == "NotABulletCell"


class TestH1Endpoint:
    """Tests for /api/h1 endpoint"""

    def test_corner_cut(self, client, clear_rate_limits, sample_subdivision_document):
        """Test H^1 vanishes and the reduction agrees"""
        response = client.post("/api/h1", json=sample_subdivision_document)
        data = response.get_json()

        assert response.status_code == 200
        assert data["trivial"] is True
        assert data["reduction"] == "trivial-by-reduction"


class TestVinbergEndpoint:
    """Tests for /api/vinberg endpoint"""

    @pytest.fixture(autouse=True)
    def open_access(self, monkeypatch):
        monkeypatch.delenv("API_KEY", raising=False)

    def test_even(self, client, clear_rate_limits):
        """Test the even lattice accepts six roots"""
        response = client.post("/api/vinberg?dot=true", json={"lattice": "even", "max_height": 6})
        data = response.get_json()

        assert response.status_code == 200
        assert len(data["accepted"]) == 6
        assert data["dot"].startswith("graph coxeter {")

    def test_unbounded_slice(self, client, clear_rate_limits):
        """Test an isotropic vector without a window is a 422"""
        response = client.post("/api/vinberg", json={"lattice": "odd1"})
        assert response.status_code == 422
        assert response.get_json()["error"] == "UnboundedSlice"

    def test_invalid_lattice(self, client, clear_rate_limits):
        """Test unknown lattice names are a 400"""
        response = client.post("/api/vinberg", json={"lattice": "e8"})
        assert response.status_code == 400
        assert response.get_json()["field"] == "lattice"

    def test_rate_limited(self, client, clear_rate_limits):
        """Test the eleventh request in a minute is refused"""
        for _ in range(10):
            client.post("/api/vinberg", json={"lattice": "even", "max_height": 1})
        response = client.post("/api/vinberg", json={"lattice": "even", "max_height": 1})
        assert response.status_code == 429


class TestAtlasEndpoint:
    """Tests for /api/atlas endpoint"""

    @patch("api_server.maximal_components")
    @patch("api_server.boundary_atlas")
    def test_json(self, mock_atlas, mock_components, client, clear_rate_limits, monkeypatch):
        """Test the atlas is returned with its maximal components"""
        monkeypatch.delenv("API_KEY", raising=False)
        atlas = Mock()
        atlas.to_json.return_value = {"strata": [], "census": {}}
        mock_atlas.return_value = atlas
        mock_components.return_value = [3, 3, 1]

        response = client.get("/api/atlas")
        data = response.get_json()

        assert response.status_code == 200
        assert data["maximal_components"] == [3, 3, 1]

    @patch("api_server.boundary_atlas")
    def test_dot(self, mock_atlas, client, clear_rate_limits, monkeypatch):
        """Test format=dot returns graphviz text"""
        monkeypatch.delenv("API_KEY", raising=False)
        mock_atlas.return_value.to_dot.return_value = "digraph atlas {\n}"

        response = client.get("/api/atlas?format=dot")
        assert response.status_code == 200
        assert response.mimetype == "text/vnd.graphviz"
        assert response.data.startswith(b"digraph atlas {")


class TestStaticEndpoints:
    """Tests for invariants, schemas and docs"""

    def test_invariants(self, client):
        """Test the cover invariants"""
        data = client.get("/api/invariants").get_json()
        assert [c["K_X^2"] for c in data["covers"]] == ["1", "2", "4", "4"]
        assert data["hexagon_identity_holds"] is True

    def test_schemas(self, client):
        """Test schemas are listed"""
        response = client.get("/api/schemas")
        assert response.status_code == 200
        assert "Subdivision" in response.get_json()

    def test_openapi(self, client):
        """Test the OpenAPI document lists the endpoints"""
        data = client.get("/api/docs/openapi.json").get_json()
        assert "/api/vinberg" in data["paths"]

    def test_docs_redirect(self, client):
        """Test /api/docs redirects to swagger"""
        response = client.get("/api/docs")
        assert response.status_code == 302


class TestErrorHandling:
    """Tests for error handling"""

    def test_404_error(self, client):
        """Test 404 error handling"""
        response = client.get("/api/nonexistent")
        assert response.status_code == 404
        assert response.get_json()["error"] == "Not Found"

    def test_405_error(self, client):
        """Test 405 method not allowed"""
        response = client.get("/api/bullet")
        assert response.status_code == 405

    @patch("api_server.invariants_report")
    def test_unexpected_error_is_500(self, mock_report, client):
        """Test unexpected exceptions are hidden behind a generic 500"""
        mock_report.side_effect = RuntimeError("boom")
        response = client.get("/api/invariants")
        assert response.status_code == 500
        assert response.get_json()["message"] == "An unexpected error occurred"
