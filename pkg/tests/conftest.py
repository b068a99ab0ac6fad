import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

# make oracle.py / helpers.py importable when pytest is run from anywhere
sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def problems_dir() -> Path:
    return ROOT / "problems"
