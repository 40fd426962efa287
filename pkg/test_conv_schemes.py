"""
Convolution Scheme Tests
========================

Lifts, per-point spectra, channel masks against direct convolution and the
structural identities of the five schemes.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from conv_schemes import (
    S3_LAPLACE,
    S4_SMOOTH,
    S8_A,
    S8_B,
    S8_C,
    SCHEMES,
    ChannelKind,
    SchemeId,
    analyze_point,
    analyze_signal,
    channel_oracle_check,
    check_identities,
    extract_channel,
    get_scheme,
    global_norm,
    identity_labels,
    lift_window,
    scheme_table,
    window_norm,
    with_channel_mask,
)
from errors import InvalidSizeError, VerificationError
from oracle import direct_convolution

# =============================================================================
# LIFTING
# =============================================================================

def test_lift_s4_smooth():
    window = lift_window(S4_SMOOTH, [1, 2, 3, 4], 2)
    np.testing.assert_array_equal(window.amplitudes, [1, 4, 6, 4])
    assert window.norm == pytest.approx(math.sqrt(69))
    assert window.point == 2


@pytest.mark.parametrize('n', range(8))
def test_lift_s3_laplace_constant(n):
    window = lift_window(S3_LAPLACE, np.full(8, 7), n)
    np.testing.assert_array_equal(window.amplitudes, [7, -7, 7, -7])
    assert window.norm == pytest.approx(14.0)


def test_lift_s8_c():
    window = lift_window(S8_C, [1, 2, 3, 4, 5, 6, 7, 8], 2)
    np.testing.assert_array_equal(window.amplitudes, [1, -3, 2, -3, 4, -3, 5, -3])


def test_lift_wraps_around():
    window = lift_window(S4_SMOOTH, [1, 2, 3, 4], 0)
    # f[-2], 2 f[-1], 2 f[0], f[1]
    np.testing.assert_array_equal(window.amplitudes, [3, 8, 2, 2])
    assert lift_window(S4_SMOOTH, [1, 2, 3, 4], 6).point == 2


def test_unit_window(scheme, rng):
    window = lift_window(scheme, rng.integers(1, 10, size=8), 3)
    assert np.linalg.norm(window.unit()) == pytest.approx(1.0)
    assert lift_window(scheme, np.zeros(8), 3).unit() is None


def test_lift_lengths(scheme):
    assert len(scheme.lift) == 2 ** scheme.qubits
    assert scheme.size == len(scheme.channels)

# =============================================================================
# SPECTRA
# =============================================================================

def test_analyze_point_s4_smooth():
    spectrum = analyze_point(S4_SMOOTH, [1, 2, 3, 4], 2)
    np.testing.assert_array_equal(spectrum.coefficients, [-5, 0, -1, 15])
    assert extract_channel(spectrum, S4_SMOOTH.channel(3)) == pytest.approx(2.5)


def test_analyze_point_s3_laplace_constant():
    spectrum = analyze_point(S3_LAPLACE, np.full(8, 7), 5)
    np.testing.assert_array_equal(spectrum.coefficients, [0, 0, 28, 0])
    assert extract_channel(spectrum, S3_LAPLACE.channel(2)) == pytest.approx(7.0)


def test_analyze_point_s8_a():
    spectrum = analyze_point(S8_A, [1, 2, 3, 4, 5, 6, 7, 8], 2)
    np.testing.assert_array_equal(spectrum.coefficients, [-5, 5, 1, -1, 0, 0, 36, -8])


def test_analyze_signal_impulse_laplacian():
    channels = analyze_signal(S3_LAPLACE, [0, 0, 0, 1, 0, 0, 0, 0])
    np.testing.assert_array_equal(channels[3], [0, 0, 1, -2, 1, 0, 0, 0])


def test_analyze_signal_matches_points(scheme, rng):
    f = rng.integers(-9, 10, size=8)
    channels = analyze_signal(scheme, f)
    for n in range(8):
        spectrum = analyze_point(scheme, f, n)
        np.testing.assert_array_equal([channels[k][n] for k in range(scheme.size)], spectrum.coefficients)


def test_s8_c_zero_channels(rng):
    f = rng.integers(-100, 101, size=16)
    channels = analyze_signal(S8_C, f)
    for index in (1, 3, 5):
        np.testing.assert_array_equal(channels[index], 0)
    assert S8_C.measurable_channels == (0, 2, 4, 6, 7)


def test_s8_b_duplicate_sobel(rng):
    f = rng.integers(-100, 101, size=16)
    channels = analyze_signal(S8_B, f)
    np.testing.assert_array_equal(channels[6], channels[7])


def test_s8_c_shifted_difference(rng):
    f = rng.integers(-100, 101, size=16)
    channels = analyze_signal(S8_C, f)
    np.testing.assert_array_equal(channels[2], np.roll(channels[0], -1))


def test_shift_covariance(scheme, rng):
    f = rng.integers(-50, 51, size=16)
    shifted = analyze_signal(scheme, np.roll(f, 5))
    original = analyze_signal(scheme, f)
    for index in range(scheme.size):
        np.testing.assert_array_equal(shifted[index], np.roll(original[index], 5))

# =============================================================================
# MASK CONSISTENCY
# =============================================================================

def test_every_mask_reproduces_channel_exactly(scheme, rng):
    for _ in range(100):
        f = rng.integers(-50, 51, size=16)
        channels = analyze_signal(scheme, f)
        for channel in scheme.channels:
            expected = direct_convolution(f, channel.mask_spec(), apply_scale=False)
            np.testing.assert_array_equal(channels[channel.index], expected)


def test_oracle_check_passes(scheme, rng):
    for _ in range(100):
        report = channel_oracle_check(scheme, rng.integers(-50, 51, size=16))
        assert report.passed, report.failure
    report.raise_on_failure()


def test_oracle_check_on_shortest_signal(scheme, rng):
    for _ in range(20):
        report = channel_oracle_check(scheme, rng.integers(-50, 51, size=4), include_auxiliary=True)
        assert report.passed, report.failure
    assert channel_oracle_check(scheme, [1, 2, 3, 4]).passed


@pytest.mark.parametrize('scheme_, index, taps, scale', [
    (S4_SMOOTH, 3, (1, 2, 2, 1, 0), Fraction(1, 6)),
    (S4_SMOOTH, 2, (1, -2, 2, -1, 0), Fraction(1, 3)),
    (S3_LAPLACE, 3, (0, 1, -2, 1, 0), Fraction(1, 2)),
    (S3_LAPLACE, 2, (0, 1, 2, 1, 0), Fraction(1, 4)),
    (S8_A, 4, (1, -2, 1, 0, 0), Fraction(1, 2)),
    (S8_A, 5, (0, 0, 1, -2, 1), Fraction(1, 2)),
    (S8_A, 6, (1, 2, 6, 2, 1), Fraction(1, 12)),
    (S8_A, 7, (1, 2, 0, -2, -1), Fraction(1, 3)),
    (S8_C, 4, (1, -1, 0, 1, -1), Fraction(1, 2)),
    (S8_C, 6, (1, 1, 4, 1, 1), Fraction(1, 8)),
    (S8_C, 7, (1, 1, -4, 1, 1), Fraction(1, 2)),
])
def test_named_operators(scheme_, index, taps, scale):
    channel = scheme_.channel(index)
    assert channel.mask == taps
    assert channel.scale == scale


def test_sobel_on_ramp_interior():
    f = np.arange(16)
    channels = analyze_signal(S8_A, f)
    sobel = channels[7] * float(S8_A.channel(7).scale)
    np.testing.assert_allclose(sobel[2:14], -8 / 3)


def test_smoothing_keeps_constant():
    channels = analyze_signal(S3_LAPLACE, np.full(16, 11))
    np.testing.assert_allclose(channels[2] * float(S3_LAPLACE.channel(2).scale), 11.0)
    np.testing.assert_array_equal(channels[3], 0)


def test_oracle_check_names_corrupted_channel(rng):
    corrupted = with_channel_mask(S4_SMOOTH, 3, (1, 2, 2, 2, 0))
    report = channel_oracle_check(corrupted, rng.integers(1, 50, size=16))
    assert not report.passed
    assert report.failing_channel == 3
    assert report.failing_point == 0
    assert 'S4_SMOOTH' in report.failure
    with pytest.raises(VerificationError) as info:
        report.raise_on_failure()
    assert info.value.channel == 3


def test_identities_hold(scheme, rng):
    for _ in range(100):
        assert check_identities(scheme, rng.integers(-50, 51, size=16)) == []


def test_identity_labels():
    assert identity_labels(S8_C) == ['c1 = c3 = c5 = 0', 'c2(n) = c0(n+1)']
    assert 'c6 = c7' in identity_labels(S8_B)
    assert identity_labels(S3_LAPLACE) == ['c1 = 0']

# =============================================================================
# NORMS AND CATALOG
# =============================================================================

@pytest.mark.parametrize('scheme_, factor', [
    (S4_SMOOTH, 10), (S3_LAPLACE, 4), (S8_A, 20), (S8_B, 20), (S8_C, 8),
])
def test_global_norm_closed_forms(scheme_, factor, rng):
    f = rng.integers(-9, 10, size=8)
    total = float(np.sum(f.astype(float) ** 2))
    assert global_norm(scheme_, f) == pytest.approx(math.sqrt(factor * total))
    assert global_norm(scheme_, f) == pytest.approx(math.sqrt(np.sum(window_norm(scheme_, f) ** 2)))


def test_window_norm_matches_lift(scheme, rng):
    f = rng.integers(-9, 10, size=8)
    norms = window_norm(scheme, f)
    for n in range(8):
        assert norms[n] == pytest.approx(lift_window(scheme, f, n).norm)


@pytest.mark.parametrize('name', ['s8-c', 'S8_C', ' s8_c ', SchemeId.S8_C])
def test_get_scheme(name):
    assert get_scheme(name) is S8_C


def test_get_scheme_unknown():
    with pytest.raises(KeyError):
        get_scheme('s16-x')


def test_scheme_table():
    table = scheme_table()
    assert len(table) == sum(s.size for s in SCHEMES.values())
    row = table[(table['scheme'] == 's4-smooth') & (table['channel'] == 3)].iloc[0]
    assert row['mask'] == '1 2 2 1 0'
    assert row['scale'] == '1/6'
    assert row['kind'] == ChannelKind.CONVOLUTION.value


def test_mask_spec_trims_to_support():
    spec = S3_LAPLACE.channel(3).mask_spec()
    assert spec.taps == (1, -2, 1)
    assert spec.center == 1
    spec = S8_A.channel(5).mask_spec()
    assert spec.taps == (1, -2, 1)
    assert spec.center == 0


def test_zero_channel_must_have_zero_mask():
    with pytest.raises(InvalidSizeError):
        with_channel_mask(S3_LAPLACE, 1, (0, 1, 0, 0, 0))
