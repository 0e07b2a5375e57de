"""Generalized conclusive entangling-probe attack on BB84 quantum key distribution."""
from .attack_sim import ProtocolConfig, SimulationSummary, loss_matched_config, run_simulation
from .discrimination import Outcome, PovmSet, build_povm, outcome_probabilities, validate_povm
from .information import overlap_closed_form, overlap_from_vectors, renyi_information
from .probe_model import (
    DomainError,
    ErrorRate,
    InconclusiveRate,
    ProbeVector,
    alpha_error,
    alpha_minus,
    alpha_plus,
    error_from_inconclusive,
    inconclusive_from_error,
    state_A1,
    state_A2,
)

__version__ = "0.1.0"
