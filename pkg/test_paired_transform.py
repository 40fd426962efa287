"""
Paired Transform Tests
======================

Matrix forms, the fast transform, the orthonormal form and its inverse.
"""

import math

import numpy as np
import pytest

from errors import InvalidSizeError
from oracle import dpt_naive
from paired_transform import (
    AdditionCounter,
    PairedSpectrum,
    Signal,
    check_size,
    dpt_forward,
    dpt_forward_unitary,
    dpt_inverse_unitary,
    dpt_matrix,
    dpt_scaling,
    dpt_unitary,
    is_power_of_two,
    next_power_of_two,
    pad_to_power_of_two,
)

SQRT2_INV = 1 / math.sqrt(2)

# =============================================================================
# MATRIX FORMS
# =============================================================================

def test_matrix_n4_matches_printed_form():
    expected = [[1, 0, -1, 0], [0, 1, 0, -1], [1, -1, 1, -1], [1, 1, 1, 1]]
    np.testing.assert_array_equal(dpt_matrix(4).entries, expected)


def test_matrix_n2_is_base_butterfly():
    np.testing.assert_array_equal(dpt_matrix(2).entries, [[1, -1], [1, 1]])


def test_matrix_n8_rows():
    matrix = dpt_matrix(8).entries
    np.testing.assert_array_equal(matrix[4], [1, 0, -1, 0, 1, 0, -1, 0])
    np.testing.assert_array_equal(matrix[0], [1, 0, 0, 0, -1, 0, 0, 0])
    np.testing.assert_array_equal(matrix[6], [1, -1, 1, -1, 1, -1, 1, -1])
    np.testing.assert_array_equal(matrix[7], np.ones(8))


@pytest.mark.parametrize('size', [4, 8, 16, 32])
def test_matrix_block_structure(size):
    matrix = dpt_matrix(size).entries
    half = size // 2
    eye = np.eye(half, dtype=np.int64)
    np.testing.assert_array_equal(matrix[:half], np.hstack([eye, -eye]))
    np.testing.assert_array_equal(matrix[half:], dpt_matrix(half).entries @ np.hstack([eye, eye]))


def test_matrix_is_a_copy():
    first = dpt_matrix(4)
    first.entries[0, 0] = 99
    assert dpt_matrix(4).entries[0, 0] == 1


@pytest.mark.parametrize('size', [0, 1, 3, 6, 12, 100])
def test_matrix_rejects_invalid_sizes(size):
    with pytest.raises(InvalidSizeError):
        dpt_matrix(size)


def test_size_helpers():
    assert is_power_of_two(1) and is_power_of_two(1024)
    assert not is_power_of_two(0) and not is_power_of_two(12)
    assert next_power_of_two(5) == 8
    assert next_power_of_two(8) == 8
    assert next_power_of_two(1, minimum=4) == 4
    assert check_size(16) == 16
    with pytest.raises(InvalidSizeError):
        check_size(2 ** 21)

# =============================================================================
# FAST TRANSFORM
# =============================================================================

@pytest.mark.parametrize('values, expected', [
    ((1, 1, 1, 1), (0, 0, 0, 4)),
    ((1, 0, 0, 0), (1, 0, 1, 1)),
    ((1, 4, 6, 4), (-5, 0, -1, 15)),
])
def test_forward_examples(values, expected):
    result = dpt_forward(np.array(values))
    np.testing.assert_array_equal(result, expected)
    assert result.dtype == np.int64


@pytest.mark.parametrize('size', [4, 8, 16, 32, 64, 128, 256, 512, 1024])
def test_fast_matches_naive(size, rng):
    vectors = rng.integers(-1000, 1001, size=(1000, size))
    fast = dpt_forward(vectors)
    naive = vectors @ dpt_matrix(size).entries.T
    np.testing.assert_array_equal(fast, naive)
    np.testing.assert_array_equal(fast[0], dpt_naive(vectors[0]))


@pytest.mark.parametrize('size', [4, 8, 16, 1024])
def test_addition_counter(size):
    counter = AdditionCounter()
    dpt_forward(np.arange(size), counter=counter)
    assert counter.count == 2 * size - 2
    assert counter.calls == 1


def test_addition_counter_batches():
    counter = AdditionCounter()
    dpt_forward(np.ones((3, 8), dtype=np.int64), counter=counter)
    assert counter.count == 3 * 14
    counter.reset()
    assert counter.count == 0 and counter.calls == 0


@pytest.mark.parametrize('size', [4, 8, 64])
def test_instrumented_arithmetic_counts(size, counting_int):
    values = np.array([counting_int(v) for v in range(size)], dtype=object)
    result = dpt_forward(values)
    assert counting_int.operations == 2 * size - 2
    np.testing.assert_array_equal([c.value for c in result], dpt_naive(np.arange(size)))


def test_constant_input_spectrum():
    result = dpt_forward(np.full(16, 7))
    np.testing.assert_array_equal(result[:-1], 0)
    assert result[-1] == 16 * 7


def test_forward_preserves_float_dtype():
    result = dpt_forward(np.array([0.5, 1.5, 2.5, 3.5]))
    assert result.dtype == np.float64
    np.testing.assert_allclose(result, [-2.0, -2.0, -2.0, 8.0])


def test_forward_accepts_unsigned_input():
    result = dpt_forward(np.array([0, 255, 0, 255], dtype=np.uint8))
    np.testing.assert_array_equal(result, [0, 0, -510, 510])

# =============================================================================
# ORTHONORMAL FORM
# =============================================================================

def test_unitary_n4_matches_printed_form():
    expected = np.array([
        [SQRT2_INV, 0, -SQRT2_INV, 0],
        [0, SQRT2_INV, 0, -SQRT2_INV],
        [0.5, -0.5, 0.5, -0.5],
        [0.5, 0.5, 0.5, 0.5],
    ])
    np.testing.assert_allclose(dpt_unitary(4).entries, expected, atol=1e-12)


def test_scaling_values():
    np.testing.assert_allclose(dpt_scaling(8), [SQRT2_INV] * 4 + [0.5] * 2 + [1 / math.sqrt(8)] * 2)


@pytest.mark.parametrize('size', [4, 8, 16, 32])
def test_unitary_is_orthonormal(size):
    matrix = dpt_unitary(size).entries
    assert np.max(np.abs(matrix @ matrix.T - np.eye(size))) < 1e-12


@pytest.mark.parametrize('values, expected', [
    ((1, 0, 0, 0), (SQRT2_INV, 0, 0.5, 0.5)),
    ((1, 1, 1, 1), (0, 0, 0, 2)),
])
def test_forward_unitary_examples(values, expected):
    np.testing.assert_allclose(dpt_forward_unitary(values), expected, atol=1e-12)


def test_forward_unitary_preserves_norm(rng):
    x = rng.normal(size=8)
    y = dpt_forward_unitary(x)
    assert abs(np.linalg.norm(y) - np.linalg.norm(x)) < 1e-12
    np.testing.assert_allclose(y, dpt_unitary(8).entries @ x, atol=1e-12)


@pytest.mark.parametrize('spectrum, expected', [
    ((0, 0, 0, 2), (1, 1, 1, 1)),
    ((SQRT2_INV, 0, 0.5, 0.5), (1, 0, 0, 0)),
])
def test_inverse_examples(spectrum, expected):
    np.testing.assert_allclose(dpt_inverse_unitary(spectrum), expected, atol=1e-12)


def test_inverse_round_trip(rng):
    vectors = rng.normal(size=(100, 16))
    recovered = dpt_inverse_unitary(dpt_forward_unitary(vectors))
    assert np.max(np.abs(recovered - vectors)) < 1e-10


def test_spectrum_helpers():
    spectrum = PairedSpectrum(dpt_forward(np.array([1, 4, 6, 4])), point=2)
    assert len(spectrum) == 4
    assert spectrum[3] == 15
    np.testing.assert_allclose(spectrum.unitary(), dpt_forward_unitary([1, 4, 6, 4]))
    np.testing.assert_allclose(spectrum.probabilities().sum(), 1.0)
    assert spectrum.probabilities()[1] == 0

# =============================================================================
# SIGNAL
# =============================================================================

def test_signal_is_periodic():
    signal = Signal(np.array([1, 2, 3, 4]))
    assert signal.length == 4 and signal.r == 2
    assert signal.at(-1) == 4
    assert signal.at(5) == 2
    np.testing.assert_array_equal(signal.shift(1).values, [4, 1, 2, 3])


def test_signal_is_read_only():
    signal = Signal(np.array([1, 2, 3, 4]))
    with pytest.raises(ValueError):
        signal.values[0] = 9


@pytest.mark.parametrize('values', [[1, 2], [1, 2, 3], np.zeros((2, 4))])
def test_signal_rejects_bad_shapes(values):
    with pytest.raises(InvalidSizeError):
        Signal(np.asarray(values))


def test_signal_rejects_non_numeric():
    with pytest.raises(InvalidSizeError):
        Signal(np.array(['a', 'b', 'c', 'd']))


def test_signal_padding():
    signal = Signal.from_values([1, 2, 3, 4, 5], pad=True)
    np.testing.assert_array_equal(signal.values, [1, 2, 3, 4, 5, 0, 0, 0])
    np.testing.assert_array_equal(pad_to_power_of_two([1, 2]), [1, 2, 0, 0])
    np.testing.assert_array_equal(pad_to_power_of_two(np.ones((2, 3))).shape, (2, 4))
