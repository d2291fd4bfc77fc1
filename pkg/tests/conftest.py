import os
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# Deep resolutions are expensive; share them across tests and runs.
os.environ.setdefault("BORELEXT_CACHE_DIR", str(Path.home() / ".cache" / "borelext"))


@pytest.fixture(scope="session")
def store():
    from borelext.resolution import default_store
    return default_store()
