from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("tok", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("tok")


@pytest.fixture(scope="session")
def diagrams_dir():
    return Path(__file__).resolve().parent.parent / "diagrams"
