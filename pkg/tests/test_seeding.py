import numpy as np
import pytest

from inctrails.seeding import Seed, as_seed


def test_same_seed_same_stream():
    a = Seed(42, (1, 2)).generator().random(5)
    b = Seed(42, (1, 2)).generator().random(5)
    assert np.array_equal(a, b)


def test_sibling_paths_differ():
    a = Seed(42).child(1, 0).generator().random(5)
    b = Seed(42).child(1, 1).generator().random(5)
    assert not np.array_equal(a, b)


def test_child_extends_path():
    assert Seed(3, (1,)).child(4, 5) == Seed(3, (1, 4, 5))


def test_key64_is_deterministic_and_64_bit():
    k = Seed(9, (3, 1)).key64()
    assert k == Seed(9, (3, 1)).key64()
    assert 0 <= k < 2 ** 64


@pytest.mark.parametrize("bad", [-1, 2 ** 64])
def test_root_must_be_64_bit(bad):
    with pytest.raises(ValueError):
        Seed(bad)


def test_as_seed():
    assert as_seed(5) == Seed(5)
    s = Seed(1, (2,))
    assert as_seed(s) is s
    with pytest.raises(TypeError):
        as_seed("5")
