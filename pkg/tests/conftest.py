import pytest
from hypothesis import HealthCheck, settings

from psicalc.config import reset_config_manager

settings.register_profile(
    "psicalc",
    derandomize=True,
    deadline=None,
    suppress_health_check=[
        HealthCheck.too_slow,
        HealthCheck.data_too_large,
        HealthCheck.function_scoped_fixture,
    ],
)
settings.load_profile("psicalc")


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Every test sees an empty config location and a fresh manager"""
    monkeypatch.setenv("PSICALC_CONFIG", str(tmp_path / "psicalc-config.json"))
    monkeypatch.delenv("PSICALC_DEBUG", raising=False)
    monkeypatch.delenv("PSICALC_LOG_JSON", raising=False)
    reset_config_manager()
    yield
    reset_config_manager()
