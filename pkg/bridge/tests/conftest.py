import pytest

from lids_bridge.bridge import BridgeConfig
from lids_bridge.testmodel import build_tiny_model


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    return build_tiny_model(tmp_path_factory.mktemp("model"))


@pytest.fixture(scope="session")
def tiny_config(tiny_model_dir):
    return BridgeConfig(model_id=str(tiny_model_dir), max_sequence=16)
