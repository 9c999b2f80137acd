"""
Pytest configuration and shared fixtures
"""
import os
import sys

import pytest

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


@pytest.fixture
def app():
    """Create Flask app for testing"""
    from api_server import app as flask_app

    flask_app.config["TESTING"] = True
    yield flask_app


@pytest.fixture
def client(app):
    """Create test client"""
    with app.test_client() as client:
        yield client


@pytest.fixture
def clear_rate_limits():
    """Clear rate limit storage between tests"""
    from middleware import rate_limit_storage

    rate_limit_storage.clear()
    yield
    rate_limit_storage.clear()


@pytest.fixture(scope="session")
def all_subdivisions():
    """Full enumeration, computed once per session"""
    from subdivisions import enumerate_all

    return enumerate_all()


@pytest.fixture
def corner_cut_subdivision():
    """Corner cut at the origin and its 7-vertex complement"""
    from cube_geometry import MarkedCell
    from subdivisions import Subdivision

    return Subdivision.of([MarkedCell.of((0, 1, 2, 4)), MarkedCell.of((1, 2, 3, 4, 5, 6, 7))])


@pytest.fixture
def two_corner_cuts():
    """Opposite corner cuts at 000 and 111 around the octahedral middle cell"""
    from cube_geometry import MarkedCell
    from subdivisions import Subdivision

    return Subdivision.of(
        [
            MarkedCell.of((0, 1, 2, 4)),
            MarkedCell.of((3, 5, 6, 7)),
            MarkedCell.of((1, 2, 3, 4, 5, 6)),
        ]
    )


@pytest.fixture
def two_prisms():
    """Cut along the diagonal rectangle through 000, 100, 011, 111"""
    from strata_atlas import TWO_PRISMS

    return TWO_PRISMS


@pytest.fixture
def corner_heights():
    """h = 1 at the origin, 0 elsewhere"""
    from subdivisions import HeightFunction

    return HeightFunction.of([1, 0, 0, 0, 0, 0, 0, 0])


@pytest.fixture
def sample_heights_document():
    return {"heights": {"000": "1", "001": 0, "010": 0, "011": 0, "100": 0, "101": 0, "110": 0, "111": 0}}


@pytest.fixture
def sample_subdivision_document():
    return {
        "cells": [
            [[0, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]],
            [[0, 0, 1], [0, 1, 0], [0, 1, 1], [1, 0, 0], [1, 0, 1], [1, 1, 0], [1, 1, 1]],
        ]
    }
