import pytest

from usage_synth.core.config import Settings, get_settings
from usage_synth.services.baseline_generator import profile_seed
from usage_synth.services.realism import RealismConfig, load_app_aliases

from tests.builders import seed_dataset


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    """Keep developer environment variables out of the settings under test."""
    for name in ("USAGE_SYNTH_API_KEY", "GAP_THRESHOLD_S", "TOP_K", "KS_FAIL_THRESHOLD",
                 "ENDPOINT_URL", "MODEL_NAME", "ATTEMPTS", "OUTPUT_DIR", "LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def seed():
    return seed_dataset()


@pytest.fixture(scope="session")
def seed_profile(seed):
    return profile_seed(seed)


@pytest.fixture
def settings(tmp_path):
    return Settings(output_dir=str(tmp_path / "runs"))


@pytest.fixture(scope="session")
def realism_config():
    return RealismConfig(app_aliases=load_app_aliases())
