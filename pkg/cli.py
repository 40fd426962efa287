"""
Quantum Convolution Toolkit - Command Line Interface
====================================================

Entry point binding the paired transform, the convolution schemes, the
state-vector simulator and the image pipeline.

Commands:
- dpt          integer and orthonormal paired spectrum of a vector
- edge         channel images of a PGM image (or the scheme catalog)
- measure-sim  simulated-measurement image of a PGM image
- measure      sample a transformed convolution state
- verify       self-checks against the reference implementations
- bench        fast vs naive transform timings and addition counts

Exit codes: 0 success, 2 parse or usage error, 3 I/O or image format
error, 4 verification failure, 1 any other toolkit error.

Usage:
    python cli.py dpt vector.txt
    python cli.py edge image.pgm --scheme s3-laplace -o out/
    python cli.py verify

Version: 1.0
"""

import functools
import logging
import math
import os
import sys
import time
import traceback
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence

import click
import numpy as np
import pandas as pd
from tqdm import tqdm

from config import (
    BENCH_CONFIG,
    EXPORT_CONFIG,
    IMAGE_CONFIG,
    SIMULATOR_CONFIG,
    TRANSFORM_CONFIG,
    get_config,
    setup_logging,
)
from conv_schemes import (
    SCHEMES,
    ConvolutionScheme,
    analyze_array,
    channel_oracle_check,
    check_identities,
    get_scheme,
    global_norm,
    identity_labels,
    scheme_table,
    window_norm,
)
from errors import InputParseError, QConvError, VerificationError
from image_pipeline import (
    DISPLAY_POLICIES,
    SELECTION_MODES,
    channel_frequencies,
    load_pgm,
    process_rows,
    save_pgm,
    simulate_measured_image,
    to_display,
    write_channel_images,
)
from oracle import dpt_naive
from paired_transform import (
    AdditionCounter,
    check_size,
    dpt_forward,
    dpt_forward_unitary,
    dpt_inverse_unitary,
    dpt_matrix,
    dpt_unitary,
    pad_to_power_of_two,
)
from qsim import (
    apply_qpt_suffix,
    circuit_unitary,
    hadamard_count,
    histogram_to_frame,
    measure,
    point_state,
    prepare_conv_superposition,
    qpt_circuit,
    run_circuit,
    save_histogram_csv,
    suffix_spectra,
)

__version__ = '1.0.0'

logger = logging.getLogger(__name__)

SCHEME_SLUGS = [scheme.slug for scheme in SCHEMES.values()]

# Integer paired matrices as printed for N = 4 and N = 8
PAIRED_MATRIX_4 = np.array([
    [1, 0, -1, 0],
    [0, 1, 0, -1],
    [1, -1, 1, -1],
    [1, 1, 1, 1],
])
PAIRED_MATRIX_8 = np.array([
    [1, 0, 0, 0, -1, 0, 0, 0],
    [0, 1, 0, 0, 0, -1, 0, 0],
    [0, 0, 1, 0, 0, 0, -1, 0],
    [0, 0, 0, 1, 0, 0, 0, -1],
    [1, 0, -1, 0, 1, 0, -1, 0],
    [0, 1, 0, -1, 0, 1, 0, -1],
    [1, -1, 1, -1, 1, -1, 1, -1],
    [1, 1, 1, 1, 1, 1, 1, 1],
])

# =============================================================================
# RUN CONFIGURATION
# =============================================================================

@dataclass
class RunConfig:
    """Effective settings of one command invocation"""
    command: str
    scheme: str
    seed: int
    shots: int
    superposition: str
    selection: str
    norm: str
    pad: bool
    output_dir: str
    row_workers: int
    input_path: Optional[str] = None
    channels: Optional[List[int]] = None

    @classmethod
    def build(cls, command: str, input_path: Optional[str] = None,
              channels: Optional[Sequence[int]] = None, **overrides: Any) -> 'RunConfig':
        settings = get_config(**overrides)
        return cls(
            command=command,
            scheme=settings['scheme'],
            seed=int(settings['seed']),
            shots=int(settings['shots']),
            superposition=settings['superposition'],
            selection=settings['selection'],
            norm=settings['norm'],
            pad=bool(settings['pad']),
            output_dir=settings['output_dir'],
            row_workers=int(settings['row_workers']),
            input_path=input_path,
            channels=list(channels) if channels is not None else None,
        )

    @property
    def scheme_spec(self) -> ConvolutionScheme:
        return get_scheme(self.scheme)

# =============================================================================
# UTILITY FUNCTIONS
# =============================================================================

def format_number(value: Any) -> str:
    """Locale-independent text for one number."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value.is_integer() and abs(value) < 2 ** 53:
        return str(int(value))
    return f"{value:.12g}"


def format_vector(values: Sequence[Any]) -> str:
    return ' '.join(format_number(v) for v in values)


def parse_numbers(text: str) -> np.ndarray:
    """
    Parse whitespace-separated numbers.

    Integers stay int64 so the integer transform is exact.

    Raises:
        InputParseError: If the text is empty or has a non-numeric token
    """
    tokens = text.split()
    if not tokens:
        raise InputParseError("No numbers found in input")
    try:
        return np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError:
        pass
    try:
        values = np.array([float(t) for t in tokens], dtype=float)
    except ValueError as e:
        raise InputParseError(f"Could not parse input as numbers: {e}") from None
    if not np.all(np.isfinite(values)):
        raise InputParseError("Input contains non-finite numbers")
    return values


def parse_channels(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[List[int]]:
    """Click callback for comma-separated channel lists such as '0,4,6'."""
    if value is None:
        return None
    try:
        channels = [int(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated channel indices, got {value!r}")
    if not channels:
        raise click.BadParameter("no channels given")
    return channels


def handle_cli_error(func: Callable) -> Callable:
    """Turn toolkit errors into a message on stderr and the mapped exit code."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except QConvError as e:
            logger.debug(f"Traceback: {traceback.format_exc()}")
            click.echo(f"Error: {e}", err=True)
            sys.exit(e.exit_code)
        except OSError as e:
            logger.debug(f"Traceback: {traceback.format_exc()}")
            click.echo(f"Error: {e}", err=True)
            sys.exit(3)
    return wrapper


def image_stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]

# =============================================================================
# VERIFICATION
# =============================================================================

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ''
    scheme: Optional[str] = None
    channel: Optional[int] = None
    point: Optional[int] = None


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((check for check in self.checks if not check.passed), None)

    def add(self, check: CheckResult) -> None:
        level = logging.DEBUG if check.passed else logging.ERROR
        logger.log(level, f"{'PASS' if check.passed else 'FAIL'} {check.name} {check.detail}")
        self.checks.append(check)

    def raise_on_failure(self) -> None:
        failure = self.first_failure
        if failure is not None:
            raise VerificationError(f"{failure.name}: {failure.detail}", scheme=failure.scheme,
                                    channel=failure.channel, point=failure.point)


def _check_transform(report: VerificationReport, rng: np.random.Generator, trials: int) -> None:
    report.add(CheckResult('matrix N=4', bool(np.array_equal(dpt_matrix(4).entries, PAIRED_MATRIX_4))))
    report.add(CheckResult('matrix N=8', bool(np.array_equal(dpt_matrix(8).entries, PAIRED_MATRIX_8))))

    expected_unitary = np.diag([1 / math.sqrt(2)] * 2 + [0.5] * 2) @ PAIRED_MATRIX_4
    error = float(np.max(np.abs(dpt_unitary(4).entries - expected_unitary)))
    report.add(CheckResult('unitary N=4', error < TRANSFORM_CONFIG['unitary_tolerance'], f"max error {error:.3g}"))

    for size in (4, 8, 16, 32):
        matrix = dpt_unitary(size).entries
        error = float(np.max(np.abs(matrix @ matrix.T - np.eye(size))))
        report.add(CheckResult(f'orthonormal N={size}', error < TRANSFORM_CONFIG['unitary_tolerance'],
                               f"max error {error:.3g}"))

    size = 4
    while size <= 1024:
        vectors = rng.integers(-1000, 1001, size=(trials, size))
        fast = dpt_forward(vectors)
        naive = np.stack([dpt_naive(v) for v in vectors])
        counter = AdditionCounter()
        dpt_forward(vectors[0], counter=counter)
        passed = bool(np.array_equal(fast, naive)) and counter.count == 2 * size - 2
        report.add(CheckResult(f'fast vs naive N={size}', passed, f"{counter.count} additions"))

        signals = rng.standard_normal((trials, size))
        error = float(np.max(np.abs(dpt_inverse_unitary(dpt_forward_unitary(signals)) - signals)))
        report.add(CheckResult(f'round trip N={size}', error < TRANSFORM_CONFIG['roundtrip_tolerance'],
                               f"max error {error:.3g}"))
        size *= 2


def _check_scheme(report: VerificationReport, scheme: ConvolutionScheme,
                  rng: np.random.Generator, trials: int, length: int) -> None:
    name = scheme.id.value
    for trial in range(trials):
        signal = rng.integers(-50, 51, size=length)
        oracle = channel_oracle_check(scheme, signal)
        if not oracle.passed:
            report.add(CheckResult(f'{name} channels vs oracle', False, oracle.failure,
                                   scheme=name, channel=oracle.failing_channel, point=oracle.failing_point))
            return
        failures = check_identities(scheme, signal)
        if failures:
            report.add(CheckResult(f'{name} identities', False, '; '.join(failures), scheme=name))
            return
    report.add(CheckResult(f'{name} channels vs oracle', True, f"channels {oracle.checked_channels}", scheme=name))
    labels = identity_labels(scheme)
    if labels:
        report.add(CheckResult(f'{name} identities', True, ', '.join(labels), scheme=name))


def _check_circuits(report: VerificationReport) -> None:
    for k in range(1, 5):
        circuit = qpt_circuit(k)
        error = float(np.max(np.abs(circuit_unitary(circuit) - dpt_unitary(2 ** k).entries)))
        passed = error < TRANSFORM_CONFIG['unitary_tolerance'] and hadamard_count(circuit) == k
        report.add(CheckResult(f'QPT circuit k={k}', passed,
                               f"max error {error:.3g}, {hadamard_count(circuit)} Hadamard gates"))


def _check_agreement(report: VerificationReport, scheme: ConvolutionScheme, rng: np.random.Generator) -> None:
    name = scheme.id.value
    signal = rng.integers(1, 20, size=8)
    classical = analyze_array(scheme, signal).astype(float)
    tolerance = SIMULATOR_CONFIG['norm_tolerance']

    psi = suffix_spectra(apply_qpt_suffix(prepare_conv_superposition(scheme, signal, 'psi'), scheme.qubits),
                         scheme.qubits)
    error = float(np.max(np.abs(psi * global_norm(scheme, signal) - classical)))
    report.add(CheckResult(f'{name} quantum vs classical (psi)', error < tolerance * max(1.0, np.abs(classical).max()),
                           f"max error {error:.3g}", scheme=name))

    state = prepare_conv_superposition(scheme, signal, 'standard')
    standard = suffix_spectra(apply_qpt_suffix(state, scheme.qubits), scheme.qubits)
    norms = window_norm(scheme, signal)
    alive = int(np.count_nonzero(norms))
    rescaled = standard * (norms * math.sqrt(alive))[:, None]
    error = float(np.max(np.abs(rescaled - classical)))
    report.add(CheckResult(f'{name} quantum vs classical (standard)',
                           error < tolerance * max(1.0, np.abs(classical).max()),
                           f"max error {error:.3g}", scheme=name))


def run_verification(schemes: Optional[Sequence[ConvolutionScheme]] = None, trials: int = 100,
                     length: int = 16, seed: int = 0) -> VerificationReport:
    """
    Run every self-check and collect the results.

    Args:
        schemes: Schemes to check (all catalog schemes by default)
        trials (int): Random signals per scheme and vectors per transform size
        length (int): Length of the random test signals
        seed (int): Seed of the test signal generator

    Returns:
        VerificationReport: One entry per check; failures name the scheme,
        channel and point where available
    """
    rng = np.random.default_rng(seed)
    schemes = list(schemes) if schemes is not None else list(SCHEMES.values())
    report = VerificationReport()

    _check_transform(report, rng, max(1, trials // 10))
    for scheme in schemes:
        _check_scheme(report, scheme, rng, trials, length)
    _check_circuits(report)
    for scheme in schemes:
        _check_agreement(report, scheme, rng)

    failed = sum(1 for check in report.checks if not check.passed)
    logger.info(f"Verification finished: {len(report.checks) - failed} passed, {failed} failed")
    return report

# =============================================================================
# BENCHMARK
# =============================================================================

def run_benchmark(min_size: int, max_size: int, repeats: int, seed: int,
                  progress: bool = False) -> pd.DataFrame:
    """
    Time the fast and the naive transform per vector.

    Returns:
        pd.DataFrame: Columns size, additions, expected_additions, fast_us,
        naive_us, speedup
    """
    check_size(min_size)
    check_size(max_size)
    rng = np.random.default_rng(seed)
    sizes = [2 ** p for p in range(min_size.bit_length() - 1, max_size.bit_length())]

    rows = []
    for size in tqdm(sizes, desc='bench', disable=not progress):
        vectors = rng.integers(-1000, 1001, size=(repeats, size))
        counter = AdditionCounter()
        dpt_forward(vectors[0], counter=counter)

        start = time.perf_counter()
        for vector in vectors:
            dpt_forward(vector)
        fast = (time.perf_counter() - start) / repeats

        start = time.perf_counter()
        for vector in vectors:
            dpt_naive(vector)
        naive = (time.perf_counter() - start) / repeats

        rows.append({
            'size': size,
            'additions': counter.count,
            'expected_additions': 2 * size - 2,
            'fast_us': fast * 1e6,
            'naive_us': naive * 1e6,
            'speedup': naive / fast if fast > 0 else float('nan'),
        })
    return pd.DataFrame(rows)

# =============================================================================
# COMMANDS
# =============================================================================

@click.group()
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                                               case_sensitive=False),
              default=None, help='Override QCONV_LOG_LEVEL.')
@click.version_option(__version__, prog_name='qconv')
def cli(log_level: Optional[str]) -> None:
    """Convolution and gradient operators through the quantum paired transform."""
    setup_logging(log_level)


@cli.command('dpt')
@click.argument('input_file', type=click.File('r'), default='-')
@click.option('--pad', is_flag=True, help='Zero-pad to the next power of two.')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), default=None,
              help='Also write index,coefficient,unitary rows to this file.')
@handle_cli_error
def dpt_command(input_file, pad: bool, csv_path: Optional[str]) -> None:
    """Paired spectrum of whitespace-separated numbers (file or stdin)."""
    values = parse_numbers(input_file.read())
    if pad:
        values = pad_to_power_of_two(values, minimum=2)
    spectrum = dpt_forward(values)
    unitary = dpt_forward_unitary(values)

    click.echo(format_vector(spectrum))
    click.echo(format_vector(unitary))

    if csv_path:
        frame = pd.DataFrame({'index': np.arange(len(spectrum)), 'coefficient': spectrum, 'unitary': unitary})
        frame.to_csv(csv_path, **EXPORT_CONFIG['csv_settings'])
        logger.info(f"Spectrum written to {csv_path}")


@cli.command('edge')
@click.argument('image', type=click.Path(dir_okay=False), required=False)
@click.option('--scheme', type=click.Choice(SCHEME_SLUGS), default=None, help='Representation scheme.')
@click.option('--channels', callback=parse_channels, default=None, help='Comma-separated channel indices.')
@click.option('--pad', is_flag=True, help='Zero-pad rows whose width is not a power of two.')
@click.option('--norm', type=click.Choice(DISPLAY_POLICIES), default=None, help='Display mapping.')
@click.option('-o', '--output-dir', type=click.Path(file_okay=False), default=None, help='Output directory.')
@click.option('--list-schemes', is_flag=True, help='Print the scheme catalog and exit.')
@handle_cli_error
def edge_command(image: Optional[str], scheme: Optional[str], channels: Optional[List[int]],
                 pad: Optional[bool], norm: Optional[str], output_dir: Optional[str], list_schemes: bool) -> None:
    """Write one channel image per selected channel plus a manifest."""
    if list_schemes:
        click.echo(scheme_table().to_csv(index=False), nl=False)
        return
    if image is None:
        raise click.UsageError('IMAGE is required unless --list-schemes is given')

    run = RunConfig.build('edge', input_path=image, channels=channels, scheme=scheme,
                          pad=pad or None, norm=norm, output_dir=output_dir)
    spec = run.scheme_spec
    source = load_pgm(image)
    logger.info(f"Processing {image} ({source.width}x{source.height}) with {spec.id.value}")

    channel_set = process_rows(source, spec, pad=run.pad, workers=run.row_workers)
    paths = write_channel_images(channel_set, run.output_dir, image_stem(image), run.norm, run.channels)
    for path in paths:
        click.echo(path)


@cli.command('measure-sim')
@click.argument('image', type=click.Path(dir_okay=False))
@click.option('--scheme', type=click.Choice(SCHEME_SLUGS), default=None, help='Representation scheme.')
@click.option('--mode', type=click.Choice(SELECTION_MODES), default=None, help='Channel selection rule.')
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=None, help='Generator seed.')
@click.option('--pad', is_flag=True, help='Zero-pad rows whose width is not a power of two.')
@click.option('--norm', type=click.Choice(DISPLAY_POLICIES), default=IMAGE_CONFIG['measured_display_policy'],
              show_default=True,
              help='Display mapping.')
@click.option('-o', '--output-dir', type=click.Path(file_okay=False), default=None, help='Output directory.')
@click.option('--frequencies', is_flag=True, help='Print how often each channel was selected.')
@handle_cli_error
def measure_sim_command(image: str, scheme: Optional[str], mode: Optional[str], seed: Optional[int],
                        pad: Optional[bool], norm: str, output_dir: Optional[str], frequencies: bool) -> None:
    """Write the simulated-measurement image of a PGM image."""
    run = RunConfig.build('measure-sim', input_path=image, scheme=scheme, selection=mode, seed=seed,
                          pad=pad or None, norm=norm, output_dir=output_dir)
    spec = run.scheme_spec
    source = load_pgm(image)

    measured = simulate_measured_image(source, spec, run.selection, run.seed, run.pad, run.row_workers)
    os.makedirs(run.output_dir, exist_ok=True)
    path = os.path.join(run.output_dir, image_stem(image) + EXPORT_CONFIG['measured_suffix'])
    save_pgm(to_display(measured, run.norm), path)
    click.echo(path)

    if frequencies:
        table = channel_frequencies(source, spec, run.selection, run.seed, run.pad)
        click.echo(table.to_csv(index=False, float_format=EXPORT_CONFIG['csv_settings']['float_format']), nl=False)


@cli.command('measure')
@click.option('--signal', 'signal_text', required=True, help='Whitespace-separated signal values.')
@click.option('--scheme', type=click.Choice(SCHEME_SLUGS), default=None, help='Representation scheme.')
@click.option('--point', type=int, default=None, help='Measure only the window state at this point.')
@click.option('--superposition', type=click.Choice(['standard', 'psi']), default=None,
              help='Superposition form when no point is given.')
@click.option('--shots', type=click.IntRange(1), default=None, help='Number of shots.')
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=None, help='Generator seed.')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), default=None,
              help='Write outcome,count rows to this file.')
@handle_cli_error
def measure_command(signal_text: str, scheme: Optional[str], point: Optional[int], superposition: Optional[str],
                    shots: Optional[int], seed: Optional[int], csv_path: Optional[str]) -> None:
    """Sample the QPT-transformed convolution state of a signal."""
    run = RunConfig.build('measure', scheme=scheme, superposition=superposition, shots=shots, seed=seed)
    spec = run.scheme_spec
    signal = parse_numbers(signal_text)

    if point is not None:
        state = run_circuit(point_state(spec, signal, point), qpt_circuit(spec.qubits))
    else:
        state = apply_qpt_suffix(prepare_conv_superposition(spec, signal, run.superposition), spec.qubits)
        if state.dropped_prefixes:
            click.echo(f"# zero windows dropped at n = {format_vector(state.dropped_prefixes)}", err=True)

    histogram = measure(state, run.shots, run.seed)
    frame = histogram_to_frame(histogram, state.qubits)
    frame['expected'] = state.probabilities() * run.shots
    click.echo(frame.to_csv(index=False, float_format=EXPORT_CONFIG['csv_settings']['float_format']), nl=False)

    if csv_path:
        save_histogram_csv(histogram, state.qubits, csv_path)


@cli.command('verify')
@click.option('--trials', type=click.IntRange(1), default=100, show_default=True,
              help='Random signals per scheme.')
@click.option('--seed', type=click.IntRange(0), default=0, show_default=True, help='Seed of the test signals.')
@handle_cli_error
def verify_command(trials: int, seed: int) -> None:
    """Check transforms, schemes and circuits against the reference implementations."""
    report = run_verification(trials=trials, seed=seed)
    for check in report.checks:
        status = 'PASS' if check.passed else 'FAIL'
        click.echo(f"{status}  {check.name}  {check.detail}".rstrip())
    click.echo(f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed")
    report.raise_on_failure()


@cli.command('bench')
@click.option('--min-size', type=int, default=BENCH_CONFIG['min_size'], show_default=True)
@click.option('--max-size', type=int, default=BENCH_CONFIG['max_size'], show_default=True)
@click.option('--repeats', type=click.IntRange(1), default=BENCH_CONFIG['repeats'], show_default=True)
@click.option('--seed', type=click.IntRange(0), default=BENCH_CONFIG['seed'], show_default=True)
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), default=None, help='Write the table as CSV.')
@handle_cli_error
def bench_command(min_size: int, max_size: int, repeats: int, seed: int, csv_path: Optional[str]) -> None:
    """Time the fast and naive paired transforms and count additions."""
    table = run_benchmark(min_size, max_size, repeats, seed, progress=sys.stderr.isatty())
    click.echo(table.to_string(index=False, float_format=lambda v: f"{v:.3f}"))
    if csv_path:
        table.to_csv(csv_path, **EXPORT_CONFIG['csv_settings'])
        logger.info(f"Benchmark table written to {csv_path}")


def main() -> None:
    cli()


if __name__ == '__main__':
    main()
