import json
from pathlib import Path

import pytest

from fracbs.undershoot import Rng

ORACLES = json.loads((Path(__file__).parent / "oracles" / "values.json").read_text())


@pytest.fixture
def oracle():
    return ORACLES


@pytest.fixture
def rng():
    return Rng(12345)
