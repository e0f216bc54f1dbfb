import numpy as np
import pytest

from pmcat import FinObject, from_rows, state


@pytest.fixture
def coin():
    return FinObject.atomic("Coin", ["H", "T"])


@pytest.fixture
def bit():
    return FinObject.atomic("Bit", ["0", "1"])


@pytest.fixture
def prior(coin):
    return state(coin, {"H": 0.5, "T": 0.5})


@pytest.fixture
def channel(coin, bit):
    """The noisy readout used across the docs: H -> 0 w.p. 0.9, T -> 0 w.p. 0.2."""
    return from_rows(coin, bit, {
        ("H",): {("0",): 0.9, ("1",): 0.1},
        ("T",): {("0",): 0.2, ("1",): 0.8},
    })


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
