"""
Configuration for the cube KSBA toolkit
Loads settings from environment variables (optionally via a .env file)
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Logging Configuration
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("LOG_FILE", "cube_ksba.log")

# Batch verification fans out over this many worker processes
WORKER_COUNT = int(os.getenv("CUBE_KSBA_WORKERS", 1))

# Search bounds
VINBERG_MAX_HEIGHT = int(os.getenv("VINBERG_MAX_HEIGHT", 10))
ODD1_WINDOW = int(os.getenv("ODD1_WINDOW", 6))
ODD2_SEARCH_BOUND = int(os.getenv("ODD2_SEARCH_BOUND", 20))
PROPERTY_SAMPLES = int(os.getenv("PROPERTY_SAMPLES", 500))
# Coefficient assignments checked against the singular-point solver
ORACLE_SAMPLES = int(os.getenv("ORACLE_SAMPLES", 1000))

# Seed recorded in every report
SEED = int(os.getenv("SEED", 20240601))

# Server Configuration
# Hosting platforms use PORT, fallback to API_PORT or 5001
API_PORT = int(os.getenv("PORT", os.getenv("API_PORT", 5001)))
FLASK_ENV = os.getenv("FLASK_ENV", "production")

# Comma-separated origins allowed by CORS on /api/*
CORS_ORIGINS = [o.strip() for o in os.getenv("CORS_ORIGINS", "*").split(",") if o.strip()]

# Set API_KEY to require authentication on the heavier endpoints
API_KEY = os.getenv("API_KEY", None)

# Validation - bounds must be positive
bounds = {
    "CUBE_KSBA_WORKERS": WORKER_COUNT,
    "VINBERG_MAX_HEIGHT": VINBERG_MAX_HEIGHT,
    "ODD1_WINDOW": ODD1_WINDOW,
    "ODD2_SEARCH_BOUND": ODD2_SEARCH_BOUND,
    "PROPERTY_SAMPLES": PROPERTY_SAMPLES,
    "ORACLE_SAMPLES": ORACLE_SAMPLES,
}

invalid_bounds = [key for key, value in bounds.items() if value <= 0]
if invalid_bounds:
    raise ValueError(
        f"Environment bounds must be positive: {', '.join(invalid_bounds)}\n"
        f"Check your .env file. See .env.example for template."
    )
