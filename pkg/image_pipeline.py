"""
Image Pipeline
==============

Row-wise application of the convolution schemes to grayscale images.

Every image row is treated as one periodic signal. Processing a row yields
one value per channel and pixel, so a scheme with 2^k channels turns an
image into 2^k channel images of the same size. The same spectra drive the
simulated-measurement image, where each pixel shows the magnitude of one
randomly selected channel.

Features:
- PGM reader (P5 binary and P2 ASCII, 8-bit) and P5 writer
- Row-blocked processing with an optional thread pool
- Affine and absolute-value display mappings
- Weighted, uniform and circuit channel selection with per-row seeded streams
- Channel image export with a CSV manifest
- Synthetic step-edge, constant and ramp images

Version: 1.0
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import EXPORT_CONFIG, IMAGE_CONFIG, SIMULATOR_CONFIG, TRANSFORM_CONFIG
from conv_schemes import S8_C, ConvolutionScheme, analyze_array, scheme_table
from errors import ImageFormatError, InvalidSizeError, TruncatedDataError
from paired_transform import dpt_scaling, is_power_of_two, pad_to_power_of_two

logger = logging.getLogger(__name__)

DISPLAY_POLICIES = ('affine', 'abs')
SELECTION_MODES = ('weighted', 'uniform', 'circuit')

# =============================================================================
# DATA MODELS
# =============================================================================

@dataclass
class GrayImage:
    """Grayscale image; pixels[y, x] with the origin at the top left"""
    pixels: np.ndarray
    maxval: int = 255

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2:
            raise InvalidSizeError(f"Image must be two-dimensional, got shape {pixels.shape}")
        if pixels.dtype.kind in 'bu':
            pixels = pixels.astype(np.int64)
        self.pixels = pixels

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width


@dataclass(frozen=True)
class DisplayParams:
    """How a real-valued image was mapped to 0..255"""
    policy: str
    low: float
    high: float


@dataclass
class ChannelImageSet:
    """
    Channel images of one scheme.

    channels[k] holds the raw channel-k values (no scale applied); display
    holds the mapping used the last time each channel was rendered.
    """
    scheme: ConvolutionScheme
    channels: Dict[int, np.ndarray]
    display: Dict[int, DisplayParams] = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        first = next(iter(self.channels.values()))
        return int(first.shape[0]), int(first.shape[1])

    def scaled(self, index: int) -> np.ndarray:
        """Channel values times the channel scale."""
        return self.channels[index] * float(self.scheme.channel(index).scale)

    def render(self, index: int, policy: str = 'affine') -> np.ndarray:
        """8-bit rendering of one channel; records its DisplayParams."""
        pixels, params = _display(self.channels[index], policy)
        self.display[index] = params
        return pixels

# =============================================================================
# PGM INPUT / OUTPUT
# =============================================================================

def _header_tokens(data: bytes, count: int, pos: int) -> Tuple[List[bytes], int]:
    tokens = []
    size = len(data)
    while len(tokens) < count:
        while pos < size and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= size:
            raise ImageFormatError("PGM header ends early")
        if data[pos:pos + 1] == b'#':
            while pos < size and data[pos:pos + 1] not in (b'\n', b'\r'):
                pos += 1
            continue
        start = pos
        while pos < size and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b'#':
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def _parse_int(token: bytes, what: str) -> int:
    if not token.isdigit():
        raise ImageFormatError(f"Invalid PGM {what}: {token!r}")
    return int(token)


def parse_pgm(data: bytes) -> GrayImage:
    """
    Decode PGM bytes (P5 or P2).

    Raises:
        ImageFormatError: Malformed header or unsupported maxval
        TruncatedDataError: Fewer pixels than the header declares
    """
    magic = data[:2]
    if magic not in (b'P5', b'P2'):
        raise ImageFormatError(f"Not a PGM file (magic {magic!r})")

    tokens, pos = _header_tokens(data, 3, 2)
    width = _parse_int(tokens[0], 'width')
    height = _parse_int(tokens[1], 'height')
    maxval = _parse_int(tokens[2], 'maxval')
    if width < 1 or height < 1:
        raise ImageFormatError(f"Invalid PGM size {width}x{height}")
    if not 1 <= maxval <= IMAGE_CONFIG['maxval']:
        raise ImageFormatError(f"Unsupported PGM maxval {maxval} (only 8-bit images)")

    count = width * height
    if magic == b'P5':
        # exactly one whitespace byte separates the header from the raster
        start = pos + 1
        payload = data[start:start + count]
        if len(payload) < count:
            raise TruncatedDataError(f"PGM payload has {len(payload)} bytes, expected {count}")
        pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    else:
        try:
            values, _ = _header_tokens(data, count, pos)
        except ImageFormatError:
            raise TruncatedDataError(f"P2 payload has fewer than {count} values") from None
        pixels = np.array([_parse_int(v, 'pixel value') for v in values], dtype=np.int64).reshape(height, width)

    if int(pixels.max()) > maxval:
        raise ImageFormatError(f"Pixel value {int(pixels.max())} exceeds maxval {maxval}")
    return GrayImage(pixels.astype(np.int64), maxval=maxval)


def load_pgm(path: str) -> GrayImage:
    """Read a P5 or P2 PGM file."""
    with open(path, 'rb') as handle:
        data = handle.read()
    image = parse_pgm(data)
    logger.debug(f"Loaded {image.width}x{image.height} PGM from {path}")
    return image


def encode_pgm(image: Union[GrayImage, np.ndarray]) -> bytes:
    """Encode pixels in 0..255 as binary P5."""
    pixels = image.pixels if isinstance(image, GrayImage) else np.asarray(image)
    maxval = image.maxval if isinstance(image, GrayImage) else IMAGE_CONFIG['maxval']
    if pixels.ndim != 2:
        raise InvalidSizeError(f"Image must be two-dimensional, got shape {pixels.shape}")
    if pixels.size and (pixels.min() < 0 or pixels.max() > maxval or np.any(pixels != np.round(pixels))):
        raise ImageFormatError(f"Pixels must be integers in 0..{maxval}; render the image first")
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n{maxval}\n".encode('ascii')
    return header + pixels.astype(np.uint8).tobytes()


def save_pgm(image: Union[GrayImage, np.ndarray], path: str) -> str:
    """Write a binary P5 PGM file and return its path."""
    data = encode_pgm(image)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'wb') as handle:
        handle.write(data)
    logger.debug(f"Wrote {path}")
    return path

# =============================================================================
# ROW PROCESSING
# =============================================================================

def _prepare_width(pixels: np.ndarray, pad: bool) -> np.ndarray:
    width = pixels.shape[1]
    if is_power_of_two(width) and width >= TRANSFORM_CONFIG['min_signal_length']:
        return pixels
    if not pad:
        raise InvalidSizeError(
            f"Image width {width} is not a power of two >= {TRANSFORM_CONFIG['min_signal_length']}; "
            f"use the pad option"
        )
    padded = pad_to_power_of_two(pixels, TRANSFORM_CONFIG['min_signal_length'])
    logger.info(f"Zero-padded rows from {width} to {padded.shape[1]} pixels")
    return padded


def row_spectra(image: GrayImage, scheme: ConvolutionScheme, pad: bool = False,
                workers: Optional[int] = None) -> np.ndarray:
    """
    Paired spectra of every pixel, row by row.

    Rows are analyzed in blocks of IMAGE_CONFIG['row_block_size']; with more
    than one worker the blocks run on a thread pool. Padded columns are
    cropped from the result.

    Returns:
        np.ndarray: Shape (height, width, 2^k)
    """
    width = image.width
    pixels = _prepare_width(image.pixels, pad)
    workers = workers or IMAGE_CONFIG['row_workers']
    block = IMAGE_CONFIG['row_block_size']
    starts = list(range(0, image.height, block))

    spectra = np.empty(pixels.shape + (scheme.size,), dtype=np.result_type(pixels.dtype, np.int64))
    if workers <= 1 or len(starts) == 1:
        for start in starts:
            spectra[start:start + block] = analyze_array(scheme, pixels[start:start + block])
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {
                executor.submit(analyze_array, scheme, pixels[start:start + block]): start
                for start in starts
            }
            for future in as_completed(futures):
                start = futures[future]
                spectra[start:start + block] = future.result()

    logger.debug(f"{scheme.id.value}: analyzed {image.height} rows in {len(starts)} block(s)")
    return spectra[:, :width]


def process_rows(image: GrayImage, scheme: ConvolutionScheme, pad: bool = False,
                 workers: Optional[int] = None) -> ChannelImageSet:
    """
    Apply a scheme to every row of an image.

    Row y of channel image k equals analyze_signal(scheme, row y)[k].

    Args:
        image (GrayImage): Source image
        scheme (ConvolutionScheme): Scheme to apply
        pad (bool): Zero-pad rows to a power of two and crop afterwards
        workers (int, optional): Thread count for row blocks

    Returns:
        ChannelImageSet: One image per channel, source dimensions

    Raises:
        InvalidSizeError: If the width is not a power of two and pad is False
    """
    spectra = row_spectra(image, scheme, pad=pad, workers=workers)
    channels = {c.index: np.ascontiguousarray(spectra[:, :, c.index]) for c in scheme.channels}
    logger.info(f"{scheme.id.value}: {len(channels)} channel images of {image.width}x{image.height}")
    return ChannelImageSet(scheme=scheme, channels=channels)

# =============================================================================
# DISPLAY
# =============================================================================

def _display(values: np.ndarray, policy: str) -> Tuple[np.ndarray, DisplayParams]:
    values = np.asarray(values, dtype=float)
    maxval = IMAGE_CONFIG['maxval']
    if policy == 'affine':
        low, high = (float(values.min()), float(values.max())) if values.size else (0.0, 0.0)
        source = values - low
    elif policy == 'abs':
        source = np.abs(values)
        low, high = 0.0, float(source.max()) if values.size else 0.0
    else:
        raise ValueError(f"Unknown display policy: {policy}")

    span = high - low
    if span <= 0 or values.max() == values.min():
        logger.debug(f"Constant image under {policy} display; rendered as zeros")
        return np.zeros(values.shape, dtype=np.uint8), DisplayParams(policy, low, high)
    # round half away from zero; all scaled values are non-negative
    pixels = np.floor(source / span * maxval + 0.5)
    return np.clip(pixels, 0, maxval).astype(np.uint8), DisplayParams(policy, low, high)


def to_display(values: Union[GrayImage, np.ndarray], policy: str = 'affine') -> np.ndarray:
    """
    Map a real-valued image to 8 bits.

    affine maps [min, max] onto [0, 255]; abs maps |v| with max |v| onto
    255. A constant image maps to 0 under either policy.
    """
    array = values.pixels if isinstance(values, GrayImage) else values
    return _display(array, policy)[0]

# =============================================================================
# SIMULATED MEASUREMENT
# =============================================================================

def row_generator(seed: int, row: int) -> np.random.Generator:
    """Independent stream for one image row, fixed by (seed, row)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(row)]))


def selection_weights(spectra: np.ndarray, scheme: ConvolutionScheme, mode: str) -> np.ndarray:
    """
    Selection weights over the scheme's measurable channels.

    Returns:
        np.ndarray: Shape (..., len(measurable_channels)), not normalized
    """
    measurable = list(scheme.measurable_channels)
    values = np.asarray(spectra, dtype=float)[..., measurable]
    if mode == 'weighted':
        return values ** 2
    if mode == 'circuit':
        return (values * dpt_scaling(scheme.size)[measurable]) ** 2
    if mode == 'uniform':
        return np.ones_like(values)
    raise ValueError(f"Unknown selection mode: {mode}")


def select_channels(spectra: np.ndarray, scheme: ConvolutionScheme, mode: str,
                    uniforms: np.ndarray) -> np.ndarray:
    """
    Pick one channel per spectrum by inverse-CDF sampling.

    A channel with zero weight is never chosen. Spectra whose weights are
    all zero get -1.

    Args:
        spectra (np.ndarray): Shape (..., 2^k)
        scheme (ConvolutionScheme): Scheme the spectra came from
        mode (str): weighted, uniform or circuit
        uniforms (np.ndarray): One draw in [0, 1) per spectrum, shape (...)

    Returns:
        np.ndarray: Selected channel index per spectrum
    """
    weights = selection_weights(spectra, scheme, mode)
    cumulative = np.cumsum(weights, axis=-1)
    total = cumulative[..., -1]
    target = np.minimum(np.asarray(uniforms) * total, np.nextafter(total, 0))
    position = np.argmax(cumulative > target[..., None], axis=-1)
    channels = np.asarray(scheme.measurable_channels)[position]
    return np.where(total > 0, channels, -1)


def measure_rows(image: GrayImage, scheme: ConvolutionScheme = S8_C, mode: str = 'weighted',
                 seed: Optional[int] = None, pad: bool = False,
                 workers: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Selected channel and emitted magnitude for every pixel.

    Returns:
        Tuple[np.ndarray, np.ndarray]: (channel indices, |c_k| values)
    """
    if mode not in SELECTION_MODES:
        raise ValueError(f"Unknown selection mode: {mode}")
    seed = SIMULATOR_CONFIG['default_seed'] if seed is None else seed
    spectra = row_spectra(image, scheme, pad=pad, workers=workers)
    uniforms = np.stack([row_generator(seed, y).random(image.width) for y in range(image.height)])

    choices = select_channels(spectra, scheme, mode, uniforms)
    picked = np.take_along_axis(spectra, np.maximum(choices, 0)[..., None], axis=-1)[..., 0]
    emitted = np.where(choices >= 0, np.abs(picked), 0)
    return choices, emitted


def simulate_measured_image(image: GrayImage, scheme: ConvolutionScheme = S8_C,
                            mode: str = 'weighted', seed: Optional[int] = None,
                            pad: bool = False, workers: Optional[int] = None) -> GrayImage:
    """
    Simulate measuring the transformed row states of an image.

    Each pixel n of each row draws one channel from the scheme's measurable
    channels (weighted: |c_k|^2, uniform: equiprobable, circuit: squared
    orthonormal amplitudes) and shows |c_k(n)|. Draws come from per-row
    streams, so the output depends only on (image, scheme, mode, seed).

    Returns:
        GrayImage: Real-valued magnitudes, source dimensions; use
        to_display to render
    """
    choices, emitted = measure_rows(image, scheme, mode, seed, pad, workers)
    logger.info(f"{scheme.id.value}: simulated {mode} measurement of {image.width}x{image.height} image")
    return GrayImage(emitted)


def channel_frequencies(image: GrayImage, scheme: ConvolutionScheme = S8_C, mode: str = 'weighted',
                        seed: Optional[int] = None, pad: bool = False) -> pd.DataFrame:
    """
    How often each channel was selected in a measured-image run.

    Returns:
        pd.DataFrame: Columns channel, name, count, fraction
    """
    choices, _ = measure_rows(image, scheme, mode, seed, pad)
    total = choices.size
    rows = []
    for index in scheme.measurable_channels:
        count = int(np.count_nonzero(choices == index))
        rows.append({'channel': index, 'name': scheme.channel(index).name,
                     'count': count, 'fraction': count / total if total else 0.0})
    blank = int(np.count_nonzero(choices < 0))
    if blank:
        rows.append({'channel': -1, 'name': 'zero spectrum', 'count': blank, 'fraction': blank / total})
    return pd.DataFrame(rows, columns=['channel', 'name', 'count', 'fraction'])

# =============================================================================
# EXPORT
# =============================================================================

def write_channel_images(channel_set: ChannelImageSet, out_dir: str, stem: str,
                         policy: str = 'affine', channels: Optional[Sequence[int]] = None) -> List[str]:
    """
    Write `<stem>.c<k>.pgm` for each selected channel plus a manifest.

    The manifest `<stem>.manifest.csv` lists channel, name, kind, scale,
    mask, file and the display range of each written image.

    Returns:
        List[str]: Written image paths followed by the manifest path
    """
    os.makedirs(out_dir, exist_ok=True)
    selected = list(channels) if channels is not None else sorted(channel_set.channels)
    catalog = scheme_table([channel_set.scheme]).set_index('channel')

    paths, rows = [], []
    for index in selected:
        if index not in channel_set.channels:
            raise InvalidSizeError(f"{channel_set.scheme.id.value} has no channel c{index}")
        name = stem + EXPORT_CONFIG['channel_suffix'].format(index=index)
        path = save_pgm(channel_set.render(index, policy), os.path.join(out_dir, name))
        params = channel_set.display[index]
        entry = catalog.loc[index]
        rows.append({
            'channel': index,
            'name': entry['name'],
            'kind': entry['kind'],
            'scale': entry['scale'],
            'mask': entry['mask'],
            'file': name,
            'display_policy': params.policy,
            'display_min': params.low,
            'display_max': params.high,
        })
        paths.append(path)

    manifest = os.path.join(out_dir, stem + EXPORT_CONFIG['manifest_suffix'])
    pd.DataFrame(rows).to_csv(manifest, **EXPORT_CONFIG['csv_settings'])
    logger.info(f"Wrote {len(paths)} channel image(s) and manifest to {out_dir}")
    return paths + [manifest]

# =============================================================================
# SYNTHETIC IMAGES
# =============================================================================

def constant_image(height: int, width: int, value: int = 128) -> GrayImage:
    return GrayImage(np.full((height, width), int(value), dtype=np.int64))


def step_edge_image(height: int, width: int, low: int = 0, high: int = 255) -> GrayImage:
    """Vertical step: left half `low`, right half `high`."""
    pixels = np.full((height, width), int(low), dtype=np.int64)
    pixels[:, width // 2:] = int(high)
    return GrayImage(pixels)


def ramp_image(height: int, width: int) -> GrayImage:
    """Horizontal ramp from 0 at the left edge to 255 at the right edge."""
    row = (np.arange(width, dtype=np.int64) * 255) // max(width - 1, 1)
    return GrayImage(np.tile(row, (height, 1)))


__all__ = [
    'DISPLAY_POLICIES',
    'SELECTION_MODES',
    'GrayImage',
    'DisplayParams',
    'ChannelImageSet',
    'parse_pgm',
    'load_pgm',
    'encode_pgm',
    'save_pgm',
    'row_spectra',
    'process_rows',
    'to_display',
    'row_generator',
    'selection_weights',
    'select_channels',
    'measure_rows',
    'simulate_measured_image',
    'channel_frequencies',
    'write_channel_images',
    'constant_image',
    'step_edge_image',
    'ramp_image',
]
