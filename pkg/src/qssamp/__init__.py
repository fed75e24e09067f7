"""Simulation and cost analysis of analog quantum sampling from Markov chain stationary distributions."""

from . import analog_sim, cost_model, errors, interpolation, markov_core, spectral_hamiltonian
from .analog_sim import ProtocolConfig, ProtocolResult, filter_stage, run_protocol
from .cost_model import cost_report, sweep_AB
from .interpolation import interpolated_chain, interpolated_stationary, s_star
from .markov_core import (
    MarkovChain,
    gen_family,
    hitting_time,
    mixing_time,
    spectral_gap,
    stationary_distribution,
    validate_chain,
)
from .spectral_hamiltonian import build_hamiltonian, discriminant, hamiltonian_for

__version__ = "0.1.0"

__all__ = [
    "analog_sim", "cost_model", "errors", "interpolation", "markov_core", "spectral_hamiltonian",
    "MarkovChain", "validate_chain", "stationary_distribution", "spectral_gap", "mixing_time",
    "hitting_time", "gen_family", "interpolated_chain", "interpolated_stationary", "s_star",
    "discriminant", "build_hamiltonian", "hamiltonian_for", "ProtocolConfig", "ProtocolResult",
    "filter_stage", "run_protocol", "cost_report", "sweep_AB",
]
