"""
Shared fixtures for the poisson-deform test suite
"""
import sys
from pathlib import Path

import pytest

# Add src to Python path
sys.path.append(str(Path(__file__).parent / "src"))

from algebra.poly_core import WeightSystem, parse_poly  # noqa: E402
from services.cohomology import make_context, milnor  # noqa: E402

CORPUS_DIR = Path(__file__).parent / "corpus"


def _context(phi: str, weights):
    ctx = make_context(parse_poly(phi), WeightSystem(tuple(weights)))
    return ctx, milnor(ctx)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    """Directory of the shipped problem files"""
    return CORPUS_DIR


@pytest.fixture(scope="session")
def a1():
    """x^2 + y^2 + z^2, weights (1, 1, 1)"""
    return _context("x^2 + y^2 + z^2", (1, 1, 1))


@pytest.fixture(scope="session")
def a4():
    """x^2 + y^2 + z^5, weights (5, 5, 2); first cohomology vanishes"""
    return _context("x^2 + y^2 + z^5", (5, 5, 2))


@pytest.fixture(scope="session")
def fermat3():
    """x^3 + y^3 + z^3, weights (1, 1, 1); w(phi) = |w|"""
    return _context("x^3 + y^3 + z^3", (1, 1, 1))


@pytest.fixture(scope="session")
def fermat5():
    """x^5 + y^5 + z^5, weights (1, 1, 1); six surface classes"""
    return _context("x^5 + y^5 + z^5", (1, 1, 1))


@pytest.fixture(scope="session")
def d4():
    """x^3 + x*y^2 + z^2, weights (2, 2, 3)"""
    return _context("x^3 + x*y^2 + z^2", (2, 2, 3))
