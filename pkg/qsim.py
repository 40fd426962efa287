"""
State-Vector Simulator
======================

A small gate-level simulator for the quantum paired transform (QPT) and the
convolution superpositions it acts on.

Conventions:
- Qubit i is bit i of the basis index; qubit m-1 is the most significant.
- A (r + k)-qubit convolution state uses basis index n * 2^k + j, so the
  position prefix |n> lives on the high r qubits and the window suffix |j>
  on the low k qubits.
- Amplitudes are stored complex even though every prepared state is real.

Features:
- H and X gates with any number of zero/one controls
- Recursive QPT circuit whose unitary equals the orthonormal paired matrix
- Standard and psi-form convolution superpositions
- Seeded multinomial measurement, conditional and post-selected distributions
- Histogram export via pandas

Version: 1.0
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import EXPORT_CONFIG, SIMULATOR_CONFIG
from conv_schemes import ConvolutionScheme, lift_array, lift_window
from errors import (
    GateError,
    InvalidSizeError,
    NormalizationError,
    UndefinedConditionalError,
)
from paired_transform import Signal, as_signal, dpt_scaling

logger = logging.getLogger(__name__)

_SQRT2_INV = 1 / math.sqrt(2)
_GATE_MATRICES = {
    'H': np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
}

# =============================================================================
# DATA MODELS
# =============================================================================

class GateKind(str, Enum):
    H = 'H'
    X = 'X'

    @property
    def matrix(self) -> np.ndarray:
        return _GATE_MATRICES[self.value]


@dataclass(frozen=True)
class Gate:
    """
    Single-target gate with optional controls.

    controls holds (qubit, required value) pairs; a control with value 0 is
    drawn as an open circle and fires when the qubit is |0>.
    """
    kind: GateKind
    target: int
    controls: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'kind', GateKind(self.kind))
        controls = tuple((int(q), int(v)) for q, v in self.controls)
        object.__setattr__(self, 'controls', controls)
        if self.target < 0:
            raise GateError(f"Negative target qubit {self.target}")
        seen = set()
        for qubit, value in controls:
            if qubit == self.target:
                raise GateError(f"Target qubit {self.target} is also a control")
            if qubit in seen:
                raise GateError(f"Qubit {qubit} is listed twice as a control")
            if value not in (0, 1):
                raise GateError(f"Control value must be 0 or 1, got {value}")
            seen.add(qubit)

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.target,) + tuple(q for q, _ in self.controls)

    def controlled_by(self, controls: Sequence[Tuple[int, int]]) -> 'Gate':
        """Copy of the gate with extra controls prepended."""
        return Gate(self.kind, self.target, tuple(controls) + self.controls)

    def __str__(self) -> str:
        if not self.controls:
            return f"{self.kind.value}(q{self.target})"
        ctrl = ','.join(f"q{q}={v}" for q, v in self.controls)
        return f"{self.kind.value}(q{self.target} | {ctrl})"


@dataclass
class Circuit:
    """Ordered gate list on a fixed register"""
    qubits: int
    gates: List[Gate] = field(default_factory=list)

    def append(self, gate: Gate) -> 'Circuit':
        _check_gate(gate, self.qubits)
        self.gates.append(gate)
        return self

    def extend(self, gates: Sequence[Gate]) -> 'Circuit':
        for gate in gates:
            self.append(gate)
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def __str__(self) -> str:
        return f"Circuit({self.qubits} qubits): " + ' '.join(str(g) for g in self.gates)


@dataclass(frozen=True)
class QuantumState:
    """
    Normalized state of `qubits` qubits.

    dropped_prefixes lists position prefixes that received no amplitude
    because their lifted window was zero (standard superposition only).
    """
    qubits: int
    amplitudes: np.ndarray
    dropped_prefixes: Tuple[int, ...] = ()

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if self.qubits < 1:
            raise InvalidSizeError("A state needs at least one qubit")
        if self.qubits > SIMULATOR_CONFIG['max_qubits']:
            raise InvalidSizeError(
                f"{self.qubits} qubits exceed the simulator limit of {SIMULATOR_CONFIG['max_qubits']}"
            )
        if amplitudes.shape[0] != 2 ** self.qubits:
            raise InvalidSizeError(
                f"{self.qubits} qubits need {2 ** self.qubits} amplitudes, got {amplitudes.shape[0]}"
            )
        squared = float(np.sum(np.abs(amplitudes) ** 2))
        if abs(squared - 1.0) > SIMULATOR_CONFIG['norm_tolerance']:
            raise NormalizationError(f"State norm^2 is {squared!r}, expected 1")
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)
        object.__setattr__(self, 'dropped_prefixes', tuple(int(p) for p in self.dropped_prefixes))

    @property
    def size(self) -> int:
        return 2 ** self.qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        probs = np.abs(self.amplitudes) ** 2
        return probs / probs.sum()

    def blocks(self, k: int) -> np.ndarray:
        """Amplitudes reshaped to (prefixes, 2^k) suffix blocks."""
        if not 1 <= k <= self.qubits:
            raise InvalidSizeError(f"Suffix of {k} qubits does not fit a {self.qubits}-qubit state")
        return self.amplitudes.reshape(-1, 2 ** k)

# =============================================================================
# GATE APPLICATION
# =============================================================================

def _check_gate(gate: Gate, qubits: int) -> None:
    for qubit in gate.qubits:
        if not 0 <= qubit < qubits:
            raise GateError(f"Qubit index {qubit} out of range for a {qubits}-qubit register in {gate}")


def _apply_to_array(amplitudes: np.ndarray, gate: Gate, qubits: int) -> np.ndarray:
    """
    Apply one gate along axis 0 of an array of shape (2^m, ...) in place.

    Axis a of the reshaped tensor holds qubit m-1-a.
    """
    tail = amplitudes.shape[1:]
    tensor = amplitudes.reshape((2,) * qubits + tail)

    index = [slice(None)] * tensor.ndim
    for qubit, value in gate.controls:
        index[qubits - 1 - qubit] = value
    axis = qubits - 1 - gate.target
    index[axis] = 0
    zero = tuple(index)
    index[axis] = 1
    one = tuple(index)

    m = gate.kind.matrix
    a0 = tensor[zero].copy()
    a1 = tensor[one].copy()
    tensor[zero] = m[0, 0] * a0 + m[0, 1] * a1
    tensor[one] = m[1, 0] * a0 + m[1, 1] * a1
    return amplitudes


def _run_on_array(amplitudes: np.ndarray, gates: Sequence[Gate], qubits: int) -> np.ndarray:
    for gate in gates:
        _check_gate(gate, qubits)
        _apply_to_array(amplitudes, gate, qubits)
    return amplitudes


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """
    Apply a (controlled) gate to a state.

    Only basis states that match the control pattern are updated.

    Raises:
        GateError: If the gate refers to a qubit outside the register
    """
    _check_gate(gate, state.qubits)
    amplitudes = state.amplitudes.copy()
    _apply_to_array(amplitudes, gate, state.qubits)
    return QuantumState(state.qubits, amplitudes, state.dropped_prefixes)


def run_circuit(state: QuantumState, circuit: Circuit) -> QuantumState:
    """Apply every gate of the circuit in order."""
    if circuit.qubits > state.qubits:
        raise InvalidSizeError(
            f"Circuit on {circuit.qubits} qubits cannot act on a {state.qubits}-qubit state"
        )
    amplitudes = _run_on_array(state.amplitudes.copy(), circuit.gates, state.qubits)
    return QuantumState(state.qubits, amplitudes, state.dropped_prefixes)

# =============================================================================
# CIRCUITS
# =============================================================================

def _qpt_gates(k: int, controls: Tuple[Tuple[int, int], ...] = ()) -> List[Gate]:
    msb = k - 1
    gates = [Gate(GateKind.H, msb, controls)]
    if k > 1:
        gates.extend(_qpt_gates(k - 1, controls + ((msb, 0),)))
    gates.append(Gate(GateKind.X, msb, controls))
    return gates


def qpt_circuit(k: int) -> Circuit:
    """
    Build the k-qubit quantum paired transform.

    QPT_k is H on the most significant qubit, then QPT_{k-1} on the lower
    qubits controlled by the most significant qubit being |0>, then X on the
    most significant qubit. QPT_1 is X H.

    Args:
        k (int): Number of qubits, >= 1

    Returns:
        Circuit: k-qubit circuit with exactly k Hadamard gates

    Raises:
        InvalidSizeError: If k < 1
    """
    if k < 1:
        raise InvalidSizeError(f"QPT needs at least one qubit, got {k}")
    return Circuit(qubits=k).extend(_qpt_gates(k))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Composed 2^m x 2^m unitary: the circuit applied to every basis state."""
    columns = np.eye(2 ** circuit.qubits, dtype=complex)
    return _run_on_array(columns, circuit.gates, circuit.qubits)


def hadamard_count(circuit: Circuit) -> int:
    return sum(1 for gate in circuit.gates if gate.kind is GateKind.H)

# =============================================================================
# STATE PREPARATION
# =============================================================================

def state_from_amplitudes(amplitudes: Union[Sequence[complex], np.ndarray],
                          normalize: bool = False) -> QuantumState:
    """
    Wrap an amplitude vector as a state.

    Args:
        amplitudes: Vector of power-of-two length
        normalize (bool): Divide by the Euclidean norm first

    Raises:
        NormalizationError: If normalize is requested for a zero vector
    """
    values = np.asarray(amplitudes, dtype=complex).reshape(-1)
    qubits = values.shape[0].bit_length() - 1
    if values.shape[0] != 2 ** qubits or qubits < 1:
        raise InvalidSizeError(f"Amplitude vector length {values.shape[0]} is not a power of two >= 2")
    if normalize:
        norm = float(np.linalg.norm(values))
        if norm == 0:
            raise NormalizationError("Cannot normalize the zero vector")
        values = values / norm
    return QuantumState(qubits, values)


def basis_state(qubits: int, index: int) -> QuantumState:
    amplitudes = np.zeros(2 ** qubits, dtype=complex)
    amplitudes[index] = 1.0
    return QuantumState(qubits, amplitudes)


def point_state(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]], n: int) -> QuantumState:
    """
    k-qubit state |y_n> = y_n / A(n) of one lifted window.

    Raises:
        NormalizationError: If the window at n is zero
    """
    window = lift_window(scheme, f, n)
    unit = window.unit()
    if unit is None:
        raise NormalizationError(f"Window at n={window.point} is zero; |y_n> is undefined")
    return QuantumState(scheme.qubits, unit)


def prepare_conv_superposition(scheme: ConvolutionScheme, f: Union[Signal, Sequence[float]],
                               mode: str = 'psi') -> QuantumState:
    """
    Prepare the (r + k)-qubit convolution superposition of a signal.

    mode='psi': amplitude of |n>|j> is lift_j(n) / C with C the global norm.
    mode='standard': amplitude of |n>|j> is lift_j(n) / (A(n) sqrt(N')),
    where N' counts the points with a nonzero window; zero-window prefixes
    carry no amplitude and are reported in dropped_prefixes.

    Args:
        scheme (ConvolutionScheme): Representation to lift with
        f: Signal of length 2^r
        mode (str): 'standard' or 'psi'

    Returns:
        QuantumState: State over r + k qubits

    Raises:
        NormalizationError: If the signal is identically zero
        InvalidSizeError: If r + k exceeds the simulator limit
    """
    signal = as_signal(f)
    qubits = signal.r + scheme.qubits
    if qubits > SIMULATOR_CONFIG['max_qubits']:
        raise InvalidSizeError(
            f"{qubits} qubits exceed the simulator limit of {SIMULATOR_CONFIG['max_qubits']}"
        )

    lifted = lift_array(scheme, signal.values).astype(float)
    dropped: Tuple[int, ...] = ()

    if mode == 'psi':
        total = math.sqrt(float(np.sum(lifted ** 2)))
        if total == 0:
            raise NormalizationError("Signal is identically zero; the superposition cannot be normalized")
        amplitudes = lifted / total
    elif mode == 'standard':
        norms = np.sqrt(np.sum(lifted ** 2, axis=1))
        alive = norms > 0
        count = int(np.count_nonzero(alive))
        if count == 0:
            raise NormalizationError("Signal is identically zero; the superposition cannot be normalized")
        amplitudes = np.zeros_like(lifted)
        amplitudes[alive] = lifted[alive] / norms[alive, None] / math.sqrt(count)
        dropped = tuple(int(n) for n in np.nonzero(~alive)[0])
        if dropped:
            logger.warning(f"{scheme.id.value}: {len(dropped)} zero window(s) dropped from the standard superposition")
    else:
        raise ValueError(f"Unknown superposition mode: {mode}")

    logger.debug(f"Prepared {mode} superposition of {scheme.id.value} on {qubits} qubits")
    return QuantumState(qubits, amplitudes.reshape(-1), dropped)


def apply_qpt_suffix(state: QuantumState, k: int) -> QuantumState:
    """
    Apply the k-qubit QPT to the low k qubits of a state.

    The position prefix is untouched, so each suffix block becomes the
    orthonormal paired spectrum of its lifted window.

    Raises:
        InvalidSizeError: If the state has fewer than k qubits
    """
    if not 1 <= k <= state.qubits:
        raise InvalidSizeError(f"Cannot apply a {k}-qubit QPT to a {state.qubits}-qubit state")
    return run_circuit(state, qpt_circuit(k))


def suffix_spectra(state: QuantumState, k: int) -> np.ndarray:
    """
    Per-prefix suffix blocks with the orthonormal row scaling removed.

    For a state after apply_qpt_suffix, row n is proportional to the
    integer spectrum analyze_point(scheme, f, n).

    Returns:
        np.ndarray: Shape (2^(m-k), 2^k)
    """
    return state.blocks(k) / dpt_scaling(2 ** k)

# =============================================================================
# MEASUREMENT
# =============================================================================

def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(SIMULATOR_CONFIG['default_seed'] if seed is None else seed)


def measure(state: QuantumState, shots: int, seed: Optional[int] = None) -> Dict[int, int]:
    """
    Sample full-register measurements.

    Args:
        state (QuantumState): State to measure
        shots (int): Number of shots, >= 1
        seed (int, optional): Generator seed; defaults to the configured seed

    Returns:
        Dict[int, int]: basis index -> count for every outcome seen; counts
        sum to shots
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    counts = _rng(seed).multinomial(int(shots), state.probabilities())
    outcomes = np.nonzero(counts)[0]
    logger.debug(f"Measured {shots} shots on {state.qubits} qubits: {len(outcomes)} distinct outcomes")
    return {int(i): int(counts[i]) for i in outcomes}


def prefix_probabilities(state: QuantumState, k: int) -> np.ndarray:
    """Probability of each position prefix |n> (suffix traced out)."""
    return np.sum(np.abs(state.blocks(k)) ** 2, axis=1)


def conditional_suffix_distribution(state: QuantumState, prefix: int, k: int) -> np.ndarray:
    """
    Distribution of the k suffix qubits given the prefix |n>.

    Returns:
        np.ndarray: |b_j|^2 / sum |b|^2 over the 2^k suffix outcomes

    Raises:
        UndefinedConditionalError: If the prefix has probability zero
    """
    blocks = state.blocks(k)
    if not 0 <= prefix < blocks.shape[0]:
        raise InvalidSizeError(f"Prefix {prefix} out of range 0..{blocks.shape[0] - 1}")
    power = np.abs(blocks[prefix]) ** 2
    total = float(power.sum())
    if total <= SIMULATOR_CONFIG['norm_tolerance'] ** 2:
        raise UndefinedConditionalError(f"Prefix {prefix} has probability zero")
    return power / total


def postselect_suffix(state: QuantumState, prefix: int, k: int,
                      fixed_high_bits: Sequence[int]) -> np.ndarray:
    """
    Distribution of the remaining suffix qubits after observing the high ones.

    fixed_high_bits gives the observed values of the most significant suffix
    qubits, most significant first. With (1,) on a 3-qubit suffix the result
    is the distribution over outcomes 4..7.

    Returns:
        np.ndarray: Probabilities over the 2^(k - len(fixed_high_bits)) outcomes

    Raises:
        UndefinedConditionalError: If the observed event has probability zero
    """
    fixed = [int(b) for b in fixed_high_bits]
    if len(fixed) > k or any(b not in (0, 1) for b in fixed):
        raise InvalidSizeError(f"Cannot fix bits {fixed} of a {k}-qubit suffix")
    distribution = conditional_suffix_distribution(state, prefix, k)
    free = k - len(fixed)
    high = 0
    for bit in fixed:
        high = (high << 1) | bit
    part = distribution[high << free:(high + 1) << free]
    total = float(part.sum())
    if total <= SIMULATOR_CONFIG['norm_tolerance'] ** 2:
        raise UndefinedConditionalError(f"Suffix bits {fixed} have probability zero at prefix {prefix}")
    return part / total

# =============================================================================
# HISTOGRAM EXPORT
# =============================================================================

def histogram_to_frame(histogram: Dict[int, int], qubits: int) -> pd.DataFrame:
    """
    Tabulate a histogram over every basis outcome of the register.

    Returns:
        pd.DataFrame: Columns outcome, bitstring, count (zeros included)
    """
    outcomes = np.arange(2 ** qubits)
    return pd.DataFrame({
        'outcome': outcomes,
        'bitstring': [format(int(i), f'0{qubits}b') for i in outcomes],
        'count': [int(histogram.get(int(i), 0)) for i in outcomes],
    })


def save_histogram_csv(histogram: Dict[int, int], qubits: int, path: str) -> str:
    """Write `outcome,count` rows for every basis outcome."""
    frame = histogram_to_frame(histogram, qubits)
    frame.to_csv(path, columns=['outcome', 'count'], **EXPORT_CONFIG['csv_settings'])
    logger.info(f"Histogram written to {path}")
    return path


__all__ = [
    'GateKind',
    'Gate',
    'Circuit',
    'QuantumState',
    'apply_gate',
    'run_circuit',
    'qpt_circuit',
    'circuit_unitary',
    'hadamard_count',
    'state_from_amplitudes',
    'basis_state',
    'point_state',
    'prepare_conv_superposition',
    'apply_qpt_suffix',
    'suffix_spectra',
    'measure',
    'prefix_probabilities',
    'conditional_suffix_distribution',
    'postselect_suffix',
    'histogram_to_frame',
    'save_histogram_csv',
]
