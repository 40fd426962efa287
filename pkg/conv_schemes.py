"""
Convolution Quantum Representation Schemes
==========================================

A scheme lifts the signal window around point n into the 2^k amplitudes of
a k-qubit vector y_n. Applying the paired transform to y_n then produces a
short convolution together with several gradients as the transform
coefficients ("channels").

Five schemes are provided:

- S4_SMOOTH   2 qubits, smoothing [1 2 2 1]/6 and a 4-level gradient
- S3_LAPLACE  2 qubits, smoothing [1 2 1]/4 and gradient [1 -2 1]/2
- S8_A        3 qubits, [1 2 6 2 1]/12, 5-level Sobel and G2 at n-1, n+1
- S8_B        3 qubits, 5-level Sobel twice and an average-plus-gradient
- S8_C        3 qubits, [1 1 4 1 1]/8, [1 1 -4 1 1]/2 and three differences

Channel masks are written over the window offsets -2..+2 and always
reproduce the transform output exactly; the scale turns the raw integer
coefficient into the named operator.

Version: 1.0
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import TRANSFORM_CONFIG
from errors import InvalidSizeError, VerificationError
from oracle import MaskSpec, direct_convolution
from paired_transform import PairedSpectrum, Signal, as_signal, dpt_forward

logger = logging.getLogger(__name__)

# Window offsets covered by every mask
WINDOW_OFFSETS = (-2, -1, 0, 1, 2)
WINDOW_CENTER = 2

# =============================================================================
# DATA MODELS
# =============================================================================

class SchemeId(str, Enum):
    S4_SMOOTH = 'S4_SMOOTH'
    S3_LAPLACE = 'S3_LAPLACE'
    S8_A = 'S8_A'
    S8_B = 'S8_B'
    S8_C = 'S8_C'

    @property
    def slug(self) -> str:
        return self.value.lower().replace('_', '-')


class ChannelKind(str, Enum):
    CONVOLUTION = 'convolution'
    GRADIENT = 'gradient'
    ZERO = 'zero'
    AUXILIARY = 'auxiliary'


@dataclass(frozen=True)
class LiftTerm:
    """One amplitude of the lifted vector: weight * f[n + offset]"""
    offset: int
    weight: int


@dataclass(frozen=True)
class ChannelSpec:
    """One transform coefficient c_k and the operator it computes"""
    index: int
    name: str
    mask: Tuple[int, ...]
    scale: Fraction
    kind: ChannelKind

    def __post_init__(self):
        if len(self.mask) != len(WINDOW_OFFSETS):
            raise InvalidSizeError(f"Channel mask must have {len(WINDOW_OFFSETS)} taps")
        object.__setattr__(self, 'scale', Fraction(self.scale))
        if self.kind is ChannelKind.ZERO and any(self.mask):
            raise InvalidSizeError(f"Zero channel c{self.index} must have an all-zero mask")

    @property
    def has_mask(self) -> bool:
        return any(self.mask)

    def mask_spec(self) -> MaskSpec:
        """Mask trimmed to its nonzero support, center kept on offset 0."""
        nonzero = [j for j, tap in enumerate(self.mask) if tap]
        if not nonzero:
            return MaskSpec(taps=(0,), center=0, scale=self.scale)
        first = min(nonzero[0], WINDOW_CENTER)
        last = max(nonzero[-1], WINDOW_CENTER)
        return MaskSpec(taps=self.mask[first:last + 1], center=WINDOW_CENTER - first, scale=self.scale)

    def mask_text(self) -> str:
        taps = ' '.join(str(t) for t in self.mask)
        return f"[{taps}]" if self.scale == 1 else f"[{taps}]*{self.scale}"


@dataclass(frozen=True)
class ConvolutionScheme:
    """
    Static description of one representation: lift, qubit count, channels.

    equal_channels lists pairs (a, b) with c_a(n) == c_b(n); shifted_channels
    lists (a, b, s) with c_a(n) == c_b(n + s).
    """
    id: SchemeId
    qubits: int
    lift: Tuple[LiftTerm, ...]
    channels: Tuple[ChannelSpec, ...]
    description: str = ''
    equal_channels: Tuple[Tuple[int, int], ...] = ()
    shifted_channels: Tuple[Tuple[int, int, int], ...] = ()

    def __post_init__(self):
        if len(self.lift) != 2 ** self.qubits:
            raise InvalidSizeError(
                f"{self.id.value}: lift has {len(self.lift)} terms, expected {2 ** self.qubits}"
            )
        if tuple(c.index for c in self.channels) != tuple(range(2 ** self.qubits)):
            raise InvalidSizeError(f"{self.id.value}: channels must be listed as c0..c{2 ** self.qubits - 1}")
        for term in self.lift:
            if term.offset not in WINDOW_OFFSETS:
                raise InvalidSizeError(f"{self.id.value}: lift offset {term.offset} outside the window")

    @property
    def size(self) -> int:
        return 2 ** self.qubits

    @property
    def slug(self) -> str:
        return self.id.slug

    @property
    def offsets(self) -> np.ndarray:
        return np.array([t.offset for t in self.lift], dtype=np.int64)

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.lift], dtype=np.int64)

    @property
    def zero_channels(self) -> Tuple[int, ...]:
        return tuple(c.index for c in self.channels if c.kind is ChannelKind.ZERO)

    @property
    def measurable_channels(self) -> Tuple[int, ...]:
        """Channels a measurement can return (every non-zero channel)."""
        return tuple(c.index for c in self.channels if c.kind is not ChannelKind.ZERO)

    def channel(self, index: int) -> ChannelSpec:
        return self.channels[index]


@dataclass(frozen=True)
class LiftedWindow:
    """Unnormalized lifted vector y_n and its Euclidean norm A(n)"""
    point: int
    amplitudes: np.ndarray
    norm: float

    def unit(self) -> Optional[np.ndarray]:
        """y_n / A(n), or None for a zero window."""
        if self.norm == 0:
            return None
        return self.amplitudes / self.norm


@dataclass
class OracleReport:
    """Result of checking scheme channels against direct convolution"""
    scheme: SchemeId
    passed: bool = True
    checked_channels: List[int] = field(default_factory=list)
    failure: Optional[str] = None
    failing_channel: Optional[int] = None
    failing_point: Optional[int] = None

    def raise_on_failure(self) -> None:
        if not self.passed:
            raise VerificationError(self.failure, scheme=self.scheme.value,
                                    channel=self.failing_channel, point=self.failing_point)

# =============================================================================
# SCHEME CATALOG
# =============================================================================

def _lift(*terms: Tuple[int, int]) -> Tuple[LiftTerm, ...]:
    return tuple(LiftTerm(offset, weight) for offset, weight in terms)


def _ch(index: int, name: str, mask: Sequence[int], scale, kind: ChannelKind) -> ChannelSpec:
    return ChannelSpec(index=index, name=name, mask=tuple(mask), scale=Fraction(scale), kind=kind)


_AUX = ChannelKind.AUXILIARY
_GRAD = ChannelKind.GRADIENT
_CONV = ChannelKind.CONVOLUTION
_ZERO = ChannelKind.ZERO
_NONE = (0, 0, 0, 0, 0)

S4_SMOOTH = ConvolutionScheme(
    id=SchemeId.S4_SMOOTH,
    qubits=2,
    lift=_lift((-2, 1), (-1, 2), (0, 2), (1, 1)),
    channels=(
        _ch(0, 'f[n-2] - 2f[n]', (1, 0, -2, 0, 0), 1, _AUX),
        _ch(1, '2f[n-1] - f[n+1]', (0, 2, 0, -1, 0), 1, _AUX),
        # the sign-flipped variant [-1 2 -2 1]/3 computes -c2/3
        _ch(2, '4-level gradient', (1, -2, 2, -1, 0), Fraction(1, 3), _GRAD),
        _ch(3, 'smoothing [1 2 2 1]/6', (1, 2, 2, 1, 0), Fraction(1, 6), _CONV),
    ),
    description='Convolution with mask [1 2 2 1] (center on the second tap) plus a 4-level gradient',
)

S3_LAPLACE = ConvolutionScheme(
    id=SchemeId.S3_LAPLACE,
    qubits=2,
    lift=_lift((-1, 1), (0, -1), (1, 1), (0, -1)),
    channels=(
        _ch(0, 'central difference f[n-1] - f[n+1]', (0, 1, 0, -1, 0), 1, _AUX),
        _ch(1, 'zero', _NONE, 1, _ZERO),
        _ch(2, 'smoothing [1 2 1]/4', (0, 1, 2, 1, 0), Fraction(1, 4), _CONV),
        _ch(3, 'gradient [1 -2 1]/2', (0, 1, -2, 1, 0), Fraction(1, 2), _GRAD),
    ),
    description='Second-difference gradient [1 -2 1]/2 with smoothing [1 2 1]/4',
)

S8_A = ConvolutionScheme(
    id=SchemeId.S8_A,
    qubits=3,
    lift=_lift((-2, 1), (0, -1), (-1, 2), (0, -2), (0, 2), (1, -2), (0, 1), (2, -1)),
    channels=(
        _ch(0, 'f[n-2] - 2f[n]', (1, 0, -2, 0, 0), 1, _AUX),
        _ch(1, '2f[n+1] - f[n]', (0, 0, -1, 2, 0), 1, _AUX),
        _ch(2, '2f[n-1] - f[n]', (0, 2, -1, 0, 0), 1, _AUX),
        _ch(3, 'f[n+2] - 2f[n]', (0, 0, -2, 0, 1), 1, _AUX),
        _ch(4, '2-level gradient at n-1', (1, -2, 1, 0, 0), Fraction(1, 2), _GRAD),
        _ch(5, '2-level gradient at n+1', (0, 0, 1, -2, 1), Fraction(1, 2), _GRAD),
        _ch(6, 'smoothing [1 2 6 2 1]/12', (1, 2, 6, 2, 1), Fraction(1, 12), _CONV),
        _ch(7, '5-level Sobel gradient', (1, 2, 0, -2, -1), Fraction(1, 3), _GRAD),
    ),
    description='5-level Sobel gradient, smoothing [1 2 6 2 1]/12 and [1 -2 1]/2 at n-1 and n+1',
)

S8_B = ConvolutionScheme(
    id=SchemeId.S8_B,
    qubits=3,
    lift=_lift((-2, 1), (0, -1), (-1, 2), (0, -2), (1, -2), (0, 2), (2, -1), (0, 1)),
    channels=(
        _ch(0, 'f[n-2] + 2f[n+1]', (1, 0, 0, 2, 0), 1, _AUX),
        _ch(1, '-3f[n]', (0, 0, -3, 0, 0), 1, _AUX),
        _ch(2, '2f[n-1] + f[n+2]', (0, 2, 0, 0, 1), 1, _AUX),
        _ch(3, '-3f[n]', (0, 0, -3, 0, 0), 1, _AUX),
        # sign-flipped form of the average-plus-gradient [-1 2 0 2 -1]/2
        _ch(4, 'average plus gradient', (1, -2, 0, -2, 1), Fraction(1, 2), _GRAD),
        _ch(5, '2f[n]', (0, 0, 2, 0, 0), 1, _AUX),
        _ch(6, '5-level Sobel gradient', (1, 2, 0, -2, -1), Fraction(1, 3), _GRAD),
        _ch(7, '5-level Sobel gradient', (1, 2, 0, -2, -1), Fraction(1, 3), _GRAD),
    ),
    description='Alternative 3-qubit lift computing the 5-level Sobel gradient on two channels',
    equal_channels=((6, 7), (1, 3)),
)

S8_C = ConvolutionScheme(
    id=SchemeId.S8_C,
    qubits=3,
    lift=_lift((-2, 1), (0, -1), (-1, 1), (0, -1), (1, 1), (0, -1), (2, 1), (0, -1)),
    channels=(
        _ch(0, 'difference f[n-2] - f[n+1]', (1, 0, 0, -1, 0), 1, _GRAD),
        _ch(1, 'zero', _NONE, 1, _ZERO),
        _ch(2, 'difference f[n-1] - f[n+2]', (0, 1, 0, 0, -1), 1, _GRAD),
        _ch(3, 'zero', _NONE, 1, _ZERO),
        _ch(4, 'gradient [1 -1 0 1 -1]/2', (1, -1, 0, 1, -1), Fraction(1, 2), _GRAD),
        _ch(5, 'zero', _NONE, 1, _ZERO),
        _ch(6, 'smoothing [1 1 4 1 1]/8', (1, 1, 4, 1, 1), Fraction(1, 8), _CONV),
        _ch(7, 'gradient [1 1 -4 1 1]/2', (1, 1, -4, 1, 1), Fraction(1, 2), _GRAD),
    ),
    description='Gradient [1 1 -4 1 1] with smoothing [1 1 4 1 1]/8 and three difference operators',
    shifted_channels=((2, 0, 1),),
)

SCHEMES: Dict[SchemeId, ConvolutionScheme] = {
    scheme.id: scheme for scheme in (S4_SMOOTH, S3_LAPLACE, S8_A, S8_B, S8_C)
}


def get_scheme(name: Union[str, SchemeId, ConvolutionScheme]) -> ConvolutionScheme:
    """
    Look up a scheme by id ("S8_C") or command-line slug ("s8-c").

    Raises:
        KeyError: If the name matches no scheme
    """
    if isinstance(name, ConvolutionScheme):
        return name
    if isinstance(name, SchemeId):
        return SCHEMES[name]
    key = str(name).strip().upper().replace('-', '_')
    try:
        return SCHEMES[SchemeId(key)]
    except ValueError:
        known = ', '.join(s.slug for s in SCHEMES)
        raise KeyError(f"Unknown scheme '{name}' (known: {known})") from None

# =============================================================================
# LIFTING AND ANALYSIS
# =============================================================================

def lift_array(scheme: ConvolutionScheme, values: np.ndarray) -> np.ndarray:
    """
    Lift every point of one or more periodic rows at once.

    Args:
        scheme (ConvolutionScheme): Representation to use
        values (np.ndarray): Shape (..., N); the last axis is periodic

    Returns:
        np.ndarray: Shape (..., N, 2^k) with out[..., n, j] = w_j * f[n + o_j]
    """
    values = np.asarray(values)
    if values.dtype.kind in 'bu':
        values = values.astype(np.int64)
    columns = [weight * np.roll(values, -offset, axis=-1)
               for offset, weight in zip(scheme.offsets.tolist(), scheme.weights.tolist())]
    return np.stack(columns, axis=-1)


def lift_window(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]], n: int) -> LiftedWindow:
    """
    Lift the window around point n into the unnormalized vector y_n.

    Args:
        scheme (ConvolutionScheme): Representation to use
        f: Periodic signal
        n (int): Point, taken modulo N

    Returns:
        LiftedWindow: amplitudes[j] = weight_j * f[(n + offset_j) mod N]
    """
    values = as_signal(f).values
    size = values.shape[0]
    point = int(n) % size
    amplitudes = scheme.weights * values[(point + scheme.offsets) % size]
    norm = float(np.sqrt(np.sum(amplitudes.astype(float) ** 2)))
    return LiftedWindow(point=point, amplitudes=amplitudes, norm=norm)


def analyze_point(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]], n: int) -> PairedSpectrum:
    """
    Paired transform of the lifted window at point n.

    Returns:
        PairedSpectrum: c_0..c_{2^k-1}, integers for integer signals
    """
    window = lift_window(scheme, f, n)
    return PairedSpectrum(coefficients=dpt_forward(window.amplitudes), point=window.point)


def analyze_array(scheme: ConvolutionScheme, values: np.ndarray) -> np.ndarray:
    """Spectra of every point of one or more rows: shape (..., N, 2^k)."""
    return dpt_forward(lift_array(scheme, values))


def analyze_signal(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]]) -> Dict[int, np.ndarray]:
    """
    Run the scheme at every point of the signal.

    Returns:
        Dict[int, np.ndarray]: channel index -> output sequence of length N
    """
    spectra = analyze_array(scheme, as_signal(f).values)
    return {channel.index: spectra[:, channel.index] for channel in scheme.channels}


def extract_channel(values: Union[PairedSpectrum, np.ndarray], channel: ChannelSpec) -> np.ndarray:
    """Scaled operator value(s) of one channel: c_k * scale."""
    coefficients = values.coefficients if isinstance(values, PairedSpectrum) else np.asarray(values)
    return coefficients[..., channel.index] * float(channel.scale)


def window_norm(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]]) -> np.ndarray:
    """A(n) for every point n."""
    lifted = lift_array(scheme, as_signal(f).values).astype(float)
    return np.sqrt(np.sum(lifted ** 2, axis=-1))


def global_norm(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]]) -> float:
    """
    Norm C of the psi-form superposition over all points.

    Every lift term is a weighted periodic shift of f, so
    C^2 = sum_n A(n)^2 = (sum_j w_j^2) * (sum_n f_n^2).
    """
    values = as_signal(f).values.astype(float)
    return math.sqrt(float(np.sum(scheme.weights ** 2)) * float(np.sum(values ** 2)))

# =============================================================================
# CONSISTENCY CHECKS
# =============================================================================

def channel_oracle_check(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]],
                         include_auxiliary: bool = False) -> OracleReport:
    """
    Compare every mask-bearing channel with direct periodic convolution.

    Channel value times scale must equal the oracle convolution of the
    channel's mask (scale included) within the configured tolerance.

    Args:
        scheme (ConvolutionScheme): Scheme to check
        f: Test signal
        include_auxiliary (bool): Also check auxiliary channels

    Returns:
        OracleReport: passed flag plus the first failing (scheme, channel, n)
    """
    signal = as_signal(f)
    outputs = analyze_signal(scheme, signal)
    report = OracleReport(scheme=scheme.id, checked_channels=[])
    tolerance = TRANSFORM_CONFIG['oracle_tolerance']

    for channel in scheme.channels:
        if channel.kind is ChannelKind.AUXILIARY and not include_auxiliary:
            continue
        if channel.kind is ChannelKind.ZERO:
            actual = outputs[channel.index].astype(float)
            expected = np.zeros_like(actual)
        else:
            actual = outputs[channel.index] * float(channel.scale)
            expected = direct_convolution(signal, channel.mask_spec().wrapped(signal.length))
        errors = np.abs(actual - expected)
        bad = np.nonzero(errors > tolerance * np.maximum(1.0, np.abs(expected)))[0]
        report.checked_channels.append(channel.index)
        if bad.size:
            n = int(bad[0])
            report.passed = False
            report.failing_channel = channel.index
            report.failing_point = n
            report.failure = (f"{scheme.id.value} channel c{channel.index} ({channel.name}) "
                              f"at n={n}: got {actual[n]!r}, oracle {expected[n]!r}")
            logger.error(report.failure)
            return report

    logger.debug(f"{scheme.id.value}: channels {report.checked_channels} match the oracle")
    return report


def check_identities(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]]) -> List[str]:
    """
    Check the structural identities of a scheme on one signal.

    Zero channels must vanish, equal channel pairs must agree, and shifted
    pairs must satisfy c_a(n) == c_b(n + s), all exactly.

    Returns:
        List[str]: Descriptions of the identities that failed (empty if all hold)
    """
    outputs = analyze_signal(scheme, f)
    failures = []

    for index in scheme.zero_channels:
        if np.any(outputs[index] != 0):
            failures.append(f"{scheme.id.value}: c{index} is not identically zero")

    for a, b in scheme.equal_channels:
        if not np.array_equal(outputs[a], outputs[b]):
            failures.append(f"{scheme.id.value}: c{a} != c{b}")

    for a, b, shift in scheme.shifted_channels:
        if not np.array_equal(outputs[a], np.roll(outputs[b], -shift)):
            failures.append(f"{scheme.id.value}: c{a}(n) != c{b}(n+{shift})")

    return failures


def identity_labels(scheme: ConvolutionScheme) -> List[str]:
    """Human-readable list of the identities check_identities verifies."""
    labels = []
    if scheme.zero_channels:
        labels.append(' = '.join(f"c{i}" for i in scheme.zero_channels) + ' = 0')
    labels.extend(f"c{a} = c{b}" for a, b in scheme.equal_channels)
    labels.extend(f"c{a}(n) = c{b}(n+{s})" for a, b, s in scheme.shifted_channels)
    return labels


def with_channel_mask(scheme: ConvolutionScheme, index: int, mask: Sequence[int]) -> ConvolutionScheme:
    """Copy of a scheme with one channel's mask replaced."""
    channels = tuple(replace(c, mask=tuple(mask)) if c.index == index else c for c in scheme.channels)
    return replace(scheme, channels=channels)

# =============================================================================
# CATALOG EXPORT
# =============================================================================

def scheme_table(schemes: Optional[Iterable[ConvolutionScheme]] = None) -> pd.DataFrame:
    """
    Machine-readable catalog of schemes and channels.

    Returns:
        pd.DataFrame: One row per (scheme, channel)
    """
    rows = []
    for scheme in schemes if schemes is not None else SCHEMES.values():
        lift_text = ' '.join(f"{t.weight}*f[n{t.offset:+d}]" for t in scheme.lift)
        for channel in scheme.channels:
            rows.append({
                'scheme': scheme.slug,
                'qubits': scheme.qubits,
                'lift': lift_text,
                'channel': channel.index,
                'name': channel.name,
                'kind': channel.kind.value,
                'scale': str(channel.scale),
                'mask': ' '.join(str(t) for t in channel.mask),
            })
    return pd.DataFrame(rows, columns=['scheme', 'qubits', 'lift', 'channel', 'name', 'kind', 'scale', 'mask'])


__all__ = [
    'WINDOW_OFFSETS',
    'SchemeId',
    'ChannelKind',
    'LiftTerm',
    'ChannelSpec',
    'ConvolutionScheme',
    'LiftedWindow',
    'OracleReport',
    'S4_SMOOTH',
    'S3_LAPLACE',
    'S8_A',
    'S8_B',
    'S8_C',
    'SCHEMES',
    'get_scheme',
    'lift_array',
    'lift_window',
    'analyze_point',
    'analyze_array',
    'analyze_signal',
    'extract_channel',
    'window_norm',
    'global_norm',
    'channel_oracle_check',
    'check_identities',
    'identity_labels',
    'with_channel_mask',
    'scheme_table',
]
