import os

import pytest
from hypothesis import HealthCheck, settings

from cobordism.lazard import build_lazard_basis

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def table():
    """Lazard table through codegree 8, shared by every test."""
    return build_lazard_basis(8)


@pytest.fixture(scope="session")
def L(table):
    return table.ring


@pytest.fixture
def cache_env(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("COBORD_CACHE_DIR", str(d))
    return d
