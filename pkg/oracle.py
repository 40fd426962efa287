"""
Reference Implementations
=========================

Brute-force reference computations used by the self-checks and the tests:
direct periodic convolution with a short mask, and the paired transform as
a plain matrix product.

Version: 1.0
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple, Union

import numpy as np

from errors import InvalidSizeError
from paired_transform import Signal, as_signal, check_size, dpt_matrix

logger = logging.getLogger(__name__)

# =============================================================================
# DATA MODELS
# =============================================================================

@dataclass(frozen=True)
class MaskSpec:
    """
    Short convolution mask.

    taps[center] is the tap aligned with the output point, so
    out[n] = scale * sum_j taps[j] * f[n + j - center].
    """
    taps: Tuple[int, ...]
    center: int
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, 'taps', tuple(int(t) for t in self.taps))
        object.__setattr__(self, 'scale', Fraction(self.scale))
        if not self.taps:
            raise InvalidSizeError("Mask must have at least one tap")
        if not 0 <= self.center < len(self.taps):
            raise InvalidSizeError(
                f"Mask center {self.center} outside taps of length {len(self.taps)}"
            )

    @property
    def offsets(self) -> Tuple[int, ...]:
        return tuple(j - self.center for j in range(len(self.taps)))

    def wrapped(self, size: int) -> 'MaskSpec':
        """
        Same periodic convolution on a signal of the given length.

        Taps whose offsets coincide modulo size are summed, so a mask longer
        than the signal becomes a size-tap mask with its center on tap 0.
        """
        if len(self.taps) <= size:
            return self
        folded = [0] * size
        for tap, offset in zip(self.taps, self.offsets):
            folded[offset % size] += tap
        return MaskSpec(taps=tuple(folded), center=0, scale=self.scale)

    def __str__(self) -> str:
        taps = ' '.join(f"_{t}_" if j == self.center else str(t) for j, t in enumerate(self.taps))
        return f"[{taps}]" if self.scale == 1 else f"[{taps}]*{self.scale}"

# =============================================================================
# DIRECT CONVOLUTION
# =============================================================================

def direct_convolution(f: Union[Signal, Sequence[float], np.ndarray], mask: MaskSpec,
                       apply_scale: bool = True) -> np.ndarray:
    """
    Periodic convolution by the sliding-window definition.

    Args:
        f: Periodic signal
        mask (MaskSpec): Mask with its center tap
        apply_scale (bool): Multiply by mask.scale; with False the integer
            tap sums are returned so rational scales can be applied later

    Returns:
        np.ndarray: out[n] for n = 0..N-1

    Raises:
        InvalidSizeError: If the mask is longer than the signal
    """
    values = as_signal(f).values
    size = values.shape[0]
    if len(mask.taps) > size:
        raise InvalidSizeError(f"Mask of length {len(mask.taps)} is longer than signal of length {size}")

    total = np.zeros(size, dtype=np.result_type(values.dtype, np.int64))
    for tap, offset in zip(mask.taps, mask.offsets):
        if tap:
            total = total + tap * np.roll(values, -offset)

    if not apply_scale:
        return total
    return total * float(mask.scale)

# =============================================================================
# NAIVE PAIRED TRANSFORM
# =============================================================================

def dpt_naive(x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    """
    Paired transform as an O(N^2) matrix-vector product.

    Args:
        x: Input vector of power-of-two length

    Returns:
        np.ndarray: dpt_matrix(N) @ x
    """
    values = np.asarray(x)
    if values.ndim != 1:
        raise InvalidSizeError(f"Expected a vector, got shape {values.shape}")
    check_size(values.shape[0])
    if values.dtype.kind in 'bu':
        values = values.astype(np.int64)
    return dpt_matrix(values.shape[0]).entries @ values


__all__ = ['MaskSpec', 'direct_convolution', 'dpt_naive']
