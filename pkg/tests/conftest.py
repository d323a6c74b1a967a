# Pytest configuration and fixtures
import os
import re
import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Set testing environment: census work stays in-process
os.environ["DEFEKT_JOBS"] = "1"
os.environ.setdefault("DEFEKT_LOG_LEVEL", "WARNING")

DATA_DIR = project_root / "data" / "polys"


def _nvars(text: str) -> int:
    return max(int(i) for i in re.findall(r"x(\d+)", text)) + 1


@pytest.fixture(scope="session")
def QQ():
    from src.algebra.exactfield import rationals

    return rationals()


@pytest.fixture(scope="session")
def F3():
    from src.algebra.exactfield import finite_field

    return finite_field(3)


@pytest.fixture(scope="session")
def F5():
    from src.algebra.exactfield import finite_field

    return finite_field(5)


@pytest.fixture(scope="session")
def F7():
    from src.algebra.exactfield import finite_field

    return finite_field(7)


@pytest.fixture(scope="session")
def F9():
    from src.algebra.exactfield import finite_field

    return finite_field(3, 2)


@pytest.fixture(scope="session")
def poly(QQ):
    # Parse a homogeneous polynomial; nvars defaults to highest index + 1
    from src.algebra.polyring import parse_poly

    def make(text, field=None, nvars=None, var_offset=0):
        field = field or QQ
        if nvars is None:
            nvars = _nvars(text) - var_offset
        return parse_poly(text, field, nvars, var_offset)

    return make


@pytest.fixture(scope="session")
def data_poly(QQ):
    # Load one of the shipped example polynomials
    from src.algebra.polyring import parse_poly

    def load(name, field=None):
        text = (DATA_DIR / f"{name}.txt").read_text()
        body = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
        return parse_poly(body, field or QQ, _nvars(body))

    return load
