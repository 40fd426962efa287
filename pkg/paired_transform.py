"""
Discrete Paired Transform Module
================================

This module implements the discrete paired transform (DPT) of length N = 2^r:
the integer matrix form, a fast addition-only algorithm, and the orthonormal
(unitary) form that the quantum circuits realize.

The N-point DPT splits a vector into its halves. The first N/2 outputs are
the differences x_j - x_{j+N/2}; the remaining N/2 outputs are the DPT of the
half-sums x_j + x_{j+N/2}. Unrolled, this takes exactly 2N - 2 additions and
subtractions and no multiplications, so integer inputs stay exact.

Features:
- Integer DPT matrix for any power-of-two size
- Fast transform along the last axis, with optional addition counting
- Unitary form, its forward application and transpose inverse
- Periodic Signal type and zero-padding helper

Version: 1.0
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from config import TRANSFORM_CONFIG
from errors import InvalidSizeError

logger = logging.getLogger(__name__)

ArrayLike = Union[Sequence[float], np.ndarray]

# =============================================================================
# SIZE HELPERS
# =============================================================================

def is_power_of_two(n: int) -> bool:
    """Return True for 1, 2, 4, 8, ..."""
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def check_size(n: int, minimum: int = 2) -> int:
    """
    Validate a transform length.

    Args:
        n (int): Length to check
        minimum (int): Smallest accepted length

    Returns:
        int: The validated length

    Raises:
        InvalidSizeError: If n is not a power of two, too small or too large
    """
    if not is_power_of_two(n):
        raise InvalidSizeError(f"Length {n} is not a power of two")
    if n < minimum:
        raise InvalidSizeError(f"Length {n} is smaller than {minimum}")
    if n > TRANSFORM_CONFIG['max_size']:
        raise InvalidSizeError(f"Length {n} exceeds the maximum {TRANSFORM_CONFIG['max_size']}")
    return int(n)


def next_power_of_two(n: int, minimum: int = 1) -> int:
    """Smallest power of two that is >= max(n, minimum)."""
    target = max(int(n), int(minimum), 1)
    return 1 << (target - 1).bit_length()


def pad_to_power_of_two(x: ArrayLike, minimum: int = 4) -> np.ndarray:
    """
    Zero-pad a vector on the right to the next power-of-two length.

    Args:
        x (ArrayLike): Input values
        minimum (int): Smallest output length

    Returns:
        np.ndarray: Padded copy (unchanged length if already a power of two)
    """
    values = np.asarray(x)
    target = next_power_of_two(values.shape[-1], minimum)
    if target == values.shape[-1]:
        return values.copy()
    pad_width = [(0, 0)] * (values.ndim - 1) + [(0, target - values.shape[-1])]
    return np.pad(values, pad_width)

# =============================================================================
# DATA MODELS
# =============================================================================

@dataclass(frozen=True)
class PairedMatrix:
    """Integer DPT matrix with entries in {-1, 0, +1}"""
    size: int
    entries: np.ndarray


@dataclass(frozen=True)
class UnitaryPairedMatrix:
    """Orthonormal DPT matrix: row-scaled PairedMatrix"""
    size: int
    entries: np.ndarray


@dataclass(frozen=True)
class Signal:
    """
    Real-valued periodic signal of length N = 2^r, r >= 2.

    Indexing through at() and shift() is taken modulo N.
    """
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 1:
            raise InvalidSizeError(f"Signal must be one-dimensional, got shape {values.shape}")
        check_size(values.shape[0], minimum=TRANSFORM_CONFIG['min_signal_length'])
        if values.dtype.kind in 'bu':
            values = values.astype(np.int64)
        elif values.dtype.kind not in 'if':
            raise InvalidSizeError(f"Signal values must be real numbers, got dtype {values.dtype}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_values(cls, values: ArrayLike, pad: bool = False) -> 'Signal':
        """
        Build a signal, optionally zero-padding to a power-of-two length.

        Args:
            values (ArrayLike): Signal samples
            pad (bool): Zero-pad on the right instead of rejecting the length
        """
        array = np.asarray(values)
        if pad and array.ndim == 1:
            array = pad_to_power_of_two(array, TRANSFORM_CONFIG['min_signal_length'])
        return cls(array)

    @property
    def length(self) -> int:
        return int(self.values.shape[0])

    @property
    def r(self) -> int:
        return self.length.bit_length() - 1

    def at(self, n: int) -> float:
        """Sample at index n mod N."""
        return self.values[n % self.length]

    def shift(self, s: int) -> 'Signal':
        """Periodic shift: result[n] = f[n - s]."""
        return Signal(np.roll(self.values, s))

    def __len__(self) -> int:
        return self.length


def as_signal(f: Union['Signal', ArrayLike]) -> Signal:
    """Accept a Signal or anything array-like."""
    return f if isinstance(f, Signal) else Signal(np.asarray(f))


@dataclass(frozen=True)
class PairedSpectrum:
    """
    Paired-transform coefficients c_0 ... c_{M-1}.

    Coefficients are the integer-weighted (unnormalized) outputs; unitary()
    gives the values the orthonormal transform produces.
    """
    coefficients: np.ndarray
    point: Optional[int] = None

    def __getitem__(self, index):
        return self.coefficients[index]

    def __len__(self) -> int:
        return int(self.coefficients.shape[-1])

    def unitary(self) -> np.ndarray:
        """Coefficients multiplied by the orthonormal row scaling."""
        return self.coefficients * dpt_scaling(len(self))

    def probabilities(self) -> np.ndarray:
        """|c_k|^2 / sum |c|^2 of the integer spectrum."""
        power = np.abs(self.coefficients.astype(float)) ** 2
        total = power.sum()
        return power / total if total > 0 else power


@dataclass
class AdditionCounter:
    """Counts scalar additions and subtractions of the fast transform"""
    count: int = 0
    calls: int = 0

    def add(self, n: int) -> None:
        self.count += int(n)

    def reset(self) -> None:
        self.count = 0
        self.calls = 0

# =============================================================================
# MATRIX FORMS
# =============================================================================

@lru_cache(maxsize=32)
def _dpt_rows(size: int) -> np.ndarray:
    if size == 1:
        return np.ones((1, 1), dtype=np.int64)
    half = size // 2
    eye = np.eye(half, dtype=np.int64)
    top = np.hstack([eye, -eye])
    bottom = _dpt_rows(half) @ np.hstack([eye, eye])
    rows = np.vstack([top, bottom])
    rows.setflags(write=False)
    return rows


def dpt_matrix(size: int) -> PairedMatrix:
    """
    Build the integer N x N paired transform matrix.

    Rows 0..N/2-1 are e_j - e_{j+N/2}; the remaining rows are the matrix of
    size N/2 applied to the half-sums.

    Args:
        size (int): N, a power of two >= 2

    Returns:
        PairedMatrix: Matrix with entries in {-1, 0, 1}

    Raises:
        InvalidSizeError: If size is not a power of two or is below 2
    """
    check_size(size)
    return PairedMatrix(size=size, entries=_dpt_rows(size).copy())


@lru_cache(maxsize=32)
def _scaling(size: int) -> np.ndarray:
    scales = np.empty(size, dtype=float)
    pos, half, level = 0, size // 2, 1
    while half >= 1:
        scales[pos:pos + half] = 2.0 ** (-level / 2.0)
        pos += half
        half //= 2
        level += 1
    scales[pos] = 1.0 / math.sqrt(size)
    scales.setflags(write=False)
    return scales


def dpt_scaling(size: int) -> np.ndarray:
    """
    Diagonal that makes the paired matrix orthonormal.

    1/sqrt(2) on the first N/2 rows, 1/2 on the next N/4, ..., 1/sqrt(N) on
    the last two rows.
    """
    check_size(size)
    return _scaling(size).copy()


def dpt_unitary(size: int) -> UnitaryPairedMatrix:
    """
    Build the orthonormal paired transform matrix.

    Args:
        size (int): N, a power of two >= 2

    Returns:
        UnitaryPairedMatrix: diag(dpt_scaling(N)) @ dpt_matrix(N)
    """
    check_size(size)
    entries = _scaling(size)[:, None] * _dpt_rows(size)
    return UnitaryPairedMatrix(size=size, entries=entries)

# =============================================================================
# FAST TRANSFORM
# =============================================================================

def _prepare(x: ArrayLike) -> np.ndarray:
    values = np.asarray(x)
    if values.ndim == 0:
        raise InvalidSizeError("Transform input must have at least one dimension")
    if values.dtype.kind in 'bu':
        values = values.astype(np.int64)
    check_size(values.shape[-1])
    return values


def dpt_forward(x: ArrayLike, counter: Optional[AdditionCounter] = None) -> np.ndarray:
    """
    Fast integer paired transform along the last axis.

    The result equals dpt_matrix(N) @ x exactly. Each level writes the
    half-differences to the output and continues with the half-sums, for a
    total of 2N - 2 additions/subtractions per transformed vector.

    Args:
        x (ArrayLike): Input of shape (..., N)
        counter (AdditionCounter, optional): Receives the scalar operation count

    Returns:
        np.ndarray: Spectrum with the same shape and dtype as the input

    Raises:
        InvalidSizeError: If the last dimension is not a power of two >= 2
    """
    values = _prepare(x)
    size = values.shape[-1]
    batch = int(np.prod(values.shape[:-1], dtype=np.int64))

    out = np.empty_like(values)
    block = values
    pos = 0
    while block.shape[-1] > 1:
        half = block.shape[-1] // 2
        low, high = block[..., :half], block[..., half:]
        out[..., pos:pos + half] = low - high
        block = low + high
        pos += half
        if counter is not None:
            counter.add(2 * half * batch)
    out[..., pos] = block[..., 0]

    if counter is not None:
        counter.calls += 1
    logger.debug(f"Paired transform of length {size} over {batch} vector(s)")
    return out


def dpt_forward_unitary(x: ArrayLike) -> np.ndarray:
    """
    Orthonormal paired transform along the last axis.

    Preserves the Euclidean norm of every transformed vector.
    """
    values = _prepare(x).astype(float)
    return dpt_forward(values) * _scaling(values.shape[-1])


def dpt_inverse_unitary(c: ArrayLike) -> np.ndarray:
    """
    Inverse of the orthonormal transform, applied as the matrix transpose.

    Args:
        c (ArrayLike): Spectrum of shape (..., N)

    Returns:
        np.ndarray: Recovered signal
    """
    values = _prepare(c).astype(float)
    matrix = dpt_unitary(values.shape[-1]).entries
    return values @ matrix


__all__ = [
    'PairedMatrix',
    'UnitaryPairedMatrix',
    'Signal',
    'PairedSpectrum',
    'AdditionCounter',
    'as_signal',
    'is_power_of_two',
    'check_size',
    'next_power_of_two',
    'pad_to_power_of_two',
    'dpt_matrix',
    'dpt_scaling',
    'dpt_unitary',
    'dpt_forward',
    'dpt_forward_unitary',
    'dpt_inverse_unitary',
]
