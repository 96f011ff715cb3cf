"""
核心功能模块包
"""

from .number_theory import PrimeSet, odd_primes, max_common_primes, forward_div_step, reverse_div_step
from .automata import Symbol, QfaSpec, PfaSpec, Configuration, RunResult, run, trace_run, check_wellformed
from .spec_io import dump_spec, load_spec
from .log_utils import LogConfig, setup_logging

__all__ = [
    'PrimeSet',
    'odd_primes',
    'max_common_primes',
    'forward_div_step',
    'reverse_div_step',
    'Symbol',
    'QfaSpec',
    'PfaSpec',
    'Configuration',
    'RunResult',
    'run',
    'trace_run',
    'check_wellformed',
    'dump_spec',
    'load_spec',
    'LogConfig',
    'setup_logging',
]
