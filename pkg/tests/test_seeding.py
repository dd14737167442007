import numpy as np
import pytest

from shotmax.errors import DomainError
from shotmax.utils.parallel import map_work_items
from shotmax.utils.seeding import (
    chunk_sizes,
    make_rng,
    normalize_seed,
    sub_seed,
)


def _square(x: int) -> int:
    return x * x


def test_same_token_same_stream():
    a = make_rng((7, 1, 2)).random(5)
    b = make_rng((7, 1, 2)).random(5)
    np.testing.assert_array_equal(a, b)


def test_distinct_tokens_distinct_streams():
    a = make_rng(7).random(5)
    b = make_rng((7, 0)).random(5)
    c = make_rng(8).random(5)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sub_seed_extends_the_path():
    assert sub_seed(7, 1, 2) == (7, 1, 2)
    assert sub_seed((7, 1), 2) == (7, 1, 2)
    np.testing.assert_array_equal(
        make_rng(sub_seed(sub_seed(7, 1), 2)).random(3),
        make_rng((7, 1, 2)).random(3),
    )


@pytest.mark.parametrize("seed", [-1, (), (1, -2), 2**64, "7"])
def test_invalid_seeds(seed):
    with pytest.raises(DomainError):
        normalize_seed(seed)


def test_numpy_integers_are_accepted():
    assert normalize_seed(np.int64(5)) == (5,)


def test_chunk_sizes():
    assert chunk_sizes(10, 4) == [4, 4, 2]
    assert chunk_sizes(8, 4) == [4, 4]
    assert chunk_sizes(0, 4) == []
    with pytest.raises(DomainError):
        chunk_sizes(-1, 4)


def test_map_work_items_keeps_order():
    items = list(range(10))
    assert map_work_items(_square, items) == [x * x for x in items]
    assert map_work_items(_square, items, threads=3) == [x * x for x in items]
