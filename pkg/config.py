"""
Quantum Convolution Toolkit Configuration
=========================================

This configuration file contains the settings shared by the transform, the
convolution schemes, the state-vector simulator, the image pipeline and the
command-line interface.

Values are plain dictionaries so that every module can import exactly the
section it needs. Only the log level is read from the environment
(QCONV_LOG_LEVEL, optionally through a .env file); everything else is changed
by editing this file or by passing explicit options on the command line.

Version: 1.0
"""

import os
import logging
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Optional

import colorlog
from dotenv import load_dotenv

from errors import ConfigurationError

load_dotenv()

logger = logging.getLogger(__name__)

# =============================================================================
# LOGGING CONFIGURATION
# =============================================================================

LOGGING_CONFIG = {
    # Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    'level': os.getenv('QCONV_LOG_LEVEL', 'INFO').upper(),

    # Log format
    'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    'color_format': '%(log_color)s%(asctime)s - %(name)s - %(levelname)s%(reset)s - %(message)s',
    'date_format': '%Y-%m-%d %H:%M:%S',

    'log_colors': {
        'DEBUG': 'cyan',
        'INFO': 'green',
        'WARNING': 'yellow',
        'ERROR': 'red',
        'CRITICAL': 'bold_red',
    },

    # Console logging goes to stderr so stdout stays machine-readable
    'console_logging': True,
    'colored_console': True,

    # File logging is off unless switched on here
    'file_logging': False,
    'file_path': os.path.join(os.path.dirname(os.path.abspath(__file__)), 'logs', 'qconv.log'),
    'max_file_size': 10 * 1024 * 1024,  # 10MB
    'backup_count': 5,
}

# =============================================================================
# TRANSFORM CONFIGURATION
# =============================================================================

TRANSFORM_CONFIG = {
    # Largest transform length accepted by the paired transform
    'max_size': 2 ** 20,

    # Smallest signal length (r >= 2)
    'min_signal_length': 4,

    # Tolerances used by the self-checks
    'unitary_tolerance': 1e-12,
    'roundtrip_tolerance': 1e-10,
    'oracle_tolerance': 1e-12,
}

# =============================================================================
# SIMULATOR CONFIGURATION
# =============================================================================

SIMULATOR_CONFIG = {
    # Statevector ceiling: 2**24 amplitudes
    'max_qubits': 24,

    # Allowed drift of the squared norm from 1
    'norm_tolerance': 1e-10,

    # Measurement defaults
    'default_shots': 10000,

    # Fixed default seed so that default runs are reproducible
    'default_seed': 20221031,

    # Default superposition for measure runs (standard or psi)
    'default_mode': 'psi',
}

# =============================================================================
# IMAGE PIPELINE CONFIGURATION
# =============================================================================

IMAGE_CONFIG = {
    # Scheme used when none is given
    'default_scheme': 's8-c',

    # What to do with widths that are not a power of two: reject or pad
    'pad_policy': 'reject',

    # Display mapping for channel images: affine or abs
    'display_policy': 'affine',

    # Display mapping for simulated-measurement images
    'measured_display_policy': 'abs',

    # Channel selection for simulated measurement: weighted, uniform or circuit
    'selection_mode': 'weighted',

    # Rows are processed in blocks; more than one worker uses a thread pool
    'row_workers': 1,
    'row_block_size': 64,

    # Only 8-bit PGM is supported
    'maxval': 255,
}

# =============================================================================
# EXPORT CONFIGURATION
# =============================================================================

EXPORT_CONFIG = {
    # Directory for images, manifests, histograms and bench tables
    'output_directory': os.path.join(os.getcwd(), 'output'),

    # CSV settings (locale-independent formatting)
    'csv_settings': {
        'float_format': '%.12g',
        'index': False,
    },

    # File naming
    'channel_suffix': '.c{index}.pgm',
    'measured_suffix': '.measured.pgm',
    'manifest_suffix': '.manifest.csv',
}

# =============================================================================
# BENCHMARK CONFIGURATION
# =============================================================================

BENCH_CONFIG = {
    'min_size': 4,
    'max_size': 1024,
    'repeats': 200,
    'seed': 7,
}

# =============================================================================
# LOGGING SETUP
# =============================================================================

_logging_configured = False


def setup_logging(level: Optional[str] = None) -> None:
    """
    Configure the root logger once for command-line use.

    Library modules only create named loggers; handlers are attached here.

    Args:
        level (str, optional): Log level overriding LOGGING_CONFIG['level']
    """
    global _logging_configured

    level_name = (level or LOGGING_CONFIG['level']).upper()
    root = logging.getLogger()
    root.setLevel(getattr(logging, level_name, logging.INFO))

    if _logging_configured:
        return

    if LOGGING_CONFIG['console_logging']:
        handler = colorlog.StreamHandler()
        if LOGGING_CONFIG['colored_console']:
            handler.setFormatter(colorlog.ColoredFormatter(
                LOGGING_CONFIG['color_format'],
                datefmt=LOGGING_CONFIG['date_format'],
                log_colors=LOGGING_CONFIG['log_colors'],
            ))
        else:
            handler.setFormatter(logging.Formatter(
                LOGGING_CONFIG['format'], datefmt=LOGGING_CONFIG['date_format']
            ))
        root.addHandler(handler)

    if LOGGING_CONFIG['file_logging']:
        os.makedirs(os.path.dirname(LOGGING_CONFIG['file_path']), exist_ok=True)
        file_handler = RotatingFileHandler(
            LOGGING_CONFIG['file_path'],
            maxBytes=LOGGING_CONFIG['max_file_size'],
            backupCount=LOGGING_CONFIG['backup_count'],
        )
        file_handler.setFormatter(logging.Formatter(
            LOGGING_CONFIG['format'], datefmt=LOGGING_CONFIG['date_format']
        ))
        root.addHandler(file_handler)

    _logging_configured = True

# =============================================================================
# EFFECTIVE RUN SETTINGS
# =============================================================================

def get_config(**overrides: Any) -> Dict[str, Any]:
    """
    Get the effective run settings: configured defaults merged with overrides.

    Overrides whose value is None are ignored so that unset command-line
    options fall back to the defaults.

    Returns:
        Dict[str, Any]: Flat settings dictionary
    """
    settings = {
        'scheme': IMAGE_CONFIG['default_scheme'],
        'seed': SIMULATOR_CONFIG['default_seed'],
        'shots': SIMULATOR_CONFIG['default_shots'],
        'superposition': SIMULATOR_CONFIG['default_mode'],
        'selection': IMAGE_CONFIG['selection_mode'],
        'norm': IMAGE_CONFIG['display_policy'],
        'pad': IMAGE_CONFIG['pad_policy'] == 'pad',
        'output_dir': EXPORT_CONFIG['output_directory'],
        'row_workers': IMAGE_CONFIG['row_workers'],
    }
    settings.update({key: value for key, value in overrides.items() if value is not None})
    return settings

# =============================================================================
# VALIDATION FUNCTIONS
# =============================================================================

def validate_config() -> None:
    """
    Validate the configuration settings.

    Raises:
        ConfigurationError: If a configuration value is missing or invalid
    """
    if not isinstance(logging.getLevelName(LOGGING_CONFIG['level']), int):
        raise ConfigurationError(f"Unknown log level: {LOGGING_CONFIG['level']}")

    if SIMULATOR_CONFIG['max_qubits'] < 1:
        raise ConfigurationError("max_qubits must be at least 1")

    if SIMULATOR_CONFIG['default_shots'] < 1:
        raise ConfigurationError("default_shots must be positive")

    if not 0 <= SIMULATOR_CONFIG['default_seed'] < 2 ** 64:
        raise ConfigurationError("default_seed must be an unsigned 64-bit integer")

    if SIMULATOR_CONFIG['default_mode'] not in ('standard', 'psi'):
        raise ConfigurationError(f"Unknown superposition mode: {SIMULATOR_CONFIG['default_mode']}")

    if IMAGE_CONFIG['pad_policy'] not in ('reject', 'pad'):
        raise ConfigurationError(f"Unknown pad policy: {IMAGE_CONFIG['pad_policy']}")

    for key in ('display_policy', 'measured_display_policy'):
        if IMAGE_CONFIG[key] not in ('affine', 'abs'):
            raise ConfigurationError(f"Unknown display policy: {IMAGE_CONFIG[key]}")

    if IMAGE_CONFIG['selection_mode'] not in ('weighted', 'uniform', 'circuit'):
        raise ConfigurationError(f"Unknown selection mode: {IMAGE_CONFIG['selection_mode']}")

    if IMAGE_CONFIG['row_workers'] < 1 or IMAGE_CONFIG['row_block_size'] < 1:
        raise ConfigurationError("row_workers and row_block_size must be positive")

    if TRANSFORM_CONFIG['min_signal_length'] < 4:
        raise ConfigurationError("min_signal_length must be at least 4")

# =============================================================================
# INITIALIZATION
# =============================================================================

# Validate configuration on import
if __name__ != '__main__':
    try:
        validate_config()
    except ConfigurationError as e:
        logger.warning(f"Configuration validation warning: {e}")

# Export commonly used configurations
__all__ = [
    'LOGGING_CONFIG',
    'TRANSFORM_CONFIG',
    'SIMULATOR_CONFIG',
    'IMAGE_CONFIG',
    'EXPORT_CONFIG',
    'BENCH_CONFIG',
    'setup_logging',
    'get_config',
    'validate_config',
]
