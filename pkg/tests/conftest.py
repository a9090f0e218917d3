from functools import lru_cache
from pathlib import Path

import pytest

from quasistrat import build_torus_data, enumerate_faces, read_polytope

FIXTURES = Path(__file__).parent / "fixtures"
ALL_FIXTURES = sorted(p.stem for p in FIXTURES.glob("*.json"))


@lru_cache(maxsize=None)
def load(name):
    """(polytope, torus data, face poset) for a fixture file."""
    P = read_polytope(FIXTURES / f"{name}.json")
    return P, build_torus_data(P), enumerate_faces(P)


@pytest.fixture(params=ALL_FIXTURES)
def fixture_name(request):
    return request.param
