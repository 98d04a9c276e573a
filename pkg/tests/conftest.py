from __future__ import annotations

import pytest
from hypothesis import settings

from helpers import CORPUS

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def corpus_root():
    return CORPUS
