import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def reference_models():
    return json.loads((FIXTURES / "reference_models.json").read_text())


@pytest.fixture(scope="session")
def reference_scan_payload():
    return json.loads((FIXTURES / "reference_scan.json").read_text())
