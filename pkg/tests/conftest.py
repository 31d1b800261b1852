import os
import random

import pytest

from tvbkit import document
from tvbkit.core.matroid import LinearIdealMatrix, Matroid
from tvbkit.core.toric import Fan
from tvbkit.errors import MatroidError

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(__file__)), "fixtures")

P2_RAYS = [(1, 0), (0, 1), (-1, -1)]
P2_CONES = [(0, 1), (1, 2), (0, 2)]


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def load_bundle(name: str):
    return document.load(fixture_path(name)).to_bundle()


def random_ideal(rng: random.Random, m: int, k: int) -> LinearIdealMatrix:
    """Random full-rank k x m coefficient matrix with small entries and no zero row."""
    while True:
        rows = [[rng.randint(-2, 2) for _ in range(m)] for _ in range(k)]
        try:
            return LinearIdealMatrix.from_rows(rows, m)
        except MatroidError:
            continue


@pytest.fixture
def p2_fan() -> Fan:
    return Fan.from_lists(2, P2_RAYS, P2_CONES)


@pytest.fixture
def u23() -> Matroid:
    return Matroid(LinearIdealMatrix.from_rows([[1, 1, 1]]))


@pytest.fixture(scope="session")
def tangent_p2():
    return load_bundle("tangent_p2.tvb")


@pytest.fixture(scope="session")
def fujita_gaps():
    return load_bundle("fujita_gaps.tvb")


@pytest.fixture(scope="session")
def bl3p2():
    return load_bundle("bl3p2.tvb")


@pytest.fixture(scope="session")
def sym2_tp2():
    return load_bundle("sym2_tp2.tvb")


@pytest.fixture
def log_dir(tmp_path, monkeypatch):
    from tvbkit.config import settings

    monkeypatch.setattr(settings, "LOG_DIR", str(tmp_path / "logs"))
    return tmp_path / "logs"
