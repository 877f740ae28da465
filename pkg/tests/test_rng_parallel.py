import numpy as np
import pytest

from treelike_geometry.errors import InvalidInputError
from treelike_geometry.parallel import map_blocks
from treelike_geometry.rng import CounterStream, Stream


def test_stream_is_pure_function_of_counter():
    stream = CounterStream(42, Stream.QUADRUPLES)
    full = stream.uniform(np.arange(1000))
    np.testing.assert_array_equal(full[500:510], stream.uniform(np.arange(500, 510)))
    assert stream.uniform(7)[0] == CounterStream(42, Stream.QUADRUPLES).uniform(7)[0]


def test_streams_and_draws_are_independent():
    counters = np.arange(100)
    quads = CounterStream(1, Stream.QUADRUPLES).bits(counters)
    assert not np.array_equal(quads, CounterStream(1, Stream.TRIPLES).bits(counters))
    assert not np.array_equal(quads, CounterStream(1, Stream.QUADRUPLES).bits(counters, 1))
    assert not np.array_equal(quads, CounterStream(2, Stream.QUADRUPLES).bits(counters))


def test_uniform_and_integer_ranges():
    stream = CounterStream(2**64 - 1, Stream.SPHERE)
    values = stream.uniform(np.arange(10_000))
    assert values.min() >= 0.0 and values.max() < 1.0
    assert 0.45 < values.mean() < 0.55
    integers = stream.integers(np.arange(10_000), 0, 7)
    assert set(np.unique(integers).tolist()) == set(range(7))


def test_normals_have_unit_scale():
    values = CounterStream(3, Stream.SPHERE).normal(np.arange(20_000))
    assert abs(values.mean()) < 0.05
    assert 0.95 < values.std() < 1.05


def test_seed_must_fit_64_bits():
    with pytest.raises(InvalidInputError):
        CounterStream(2**64, Stream.DISK)


@pytest.mark.parametrize("workers", [1, 2, 8])
def test_map_blocks_result_is_worker_independent(workers):
    def square(start, stop):
        return np.arange(start, stop, dtype=float) ** 2

    out = map_blocks(square, 10_001, workers=workers, block_size=997)
    np.testing.assert_array_equal(out, np.arange(10_001, dtype=float) ** 2)


def test_map_blocks_empty():
    assert map_blocks(lambda start, stop: np.zeros(stop - start), 0).size == 0
