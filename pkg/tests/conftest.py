import json
from pathlib import Path

import pytest

from ioncat import SystemParams, TruncationScheme

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def oracle():
    """Frozen pre-build brute-force values (see oracles.py)."""
    return json.loads((FIXTURES / "oracle_values.json").read_text())


@pytest.fixture()
def params():
    return SystemParams(nu=1.0, omega=1.0, omega0=0.2, g=0.005, eta=0.5)


@pytest.fixture()
def trunc():
    return TruncationScheme(n_vib=25, n_cav=8, guard=5)
