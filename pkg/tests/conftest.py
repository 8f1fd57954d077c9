from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from combdemand import DemandDataset, Universe, Valuation
from combdemand.core import Bundle, Observation
from combdemand.io import read_dataset

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_fixture(name: str):
    return read_dataset(FIXTURES / name)


def two_items() -> Universe:
    return Universe(("a", "b"))


def v1() -> Valuation:
    return Valuation(two_items(), (0, 3, 2, 4))


def v3() -> Valuation:
    return Valuation(two_items(), (0, 3, 2, 3))


def w3() -> Valuation:
    return Valuation(two_items(), (0, 3, 2, Fraction(5, 2)))


def assert_affine_witness(recovery) -> None:
    """Positive slopes, evaluation equal to the table everywhere, monotone table."""
    v_hat, rep = recovery
    assert rep.pieces
    for piece in rep.pieces:
        assert all(x > 0 for x in piece.slope)
    for b in v_hat.universe.bundles():
        assert rep(b) == v_hat[b]
    assert v_hat.is_monotone()


@st.composite
def small_datasets(draw, n_items=2, max_obs=4):
    u = Universe(tuple("abc"[:n_items]))
    m = draw(st.integers(1, max_obs))
    obs = []
    for _ in range(m):
        prices = u.prices([draw(st.integers(1, 5)) for _ in range(n_items)])
        masks = draw(st.sets(st.integers(0, u.full_mask), min_size=1, max_size=2))
        obs.append(Observation(prices, tuple(Bundle(u, x) for x in masks)))
    return DemandDataset(u, tuple(obs))


@pytest.fixture
def universe2():
    return two_items()


@pytest.fixture
def val_v1():
    return v1()


@pytest.fixture
def dataset_v1():
    return load_fixture("fixture_v1.json")
