"""Exact logical channels and optimized hard decoding for concatenated stabilizer codes."""

__version__ = "0.1.0"

from .channels import (
    KrausChannel,
    NoiseFamily,
    amplitude_phase_damping,
    coherent_rotation,
    depolarizing,
    infidelity,
    kraus_to_process,
    pauli_twirl,
    perturb,
)
from .codes import StabilizerCode, builtin_code, symmetric_decoder, transversal_group
from .decoder import DecoderSchedule, group_conditionals, optimize_level, run_hard_decoder
from .logical import concatenate, conditional_channel, effective_channel
from .pauli import PauliOp, commutes, pauli_mul, weight
from .threshold import ThresholdQuery, correctable, optimized_threshold, symmetric_threshold

__all__ = [
    "DecoderSchedule",
    "KrausChannel",
    "NoiseFamily",
    "PauliOp",
    "StabilizerCode",
    "ThresholdQuery",
    "amplitude_phase_damping",
    "builtin_code",
    "coherent_rotation",
    "commutes",
    "concatenate",
    "conditional_channel",
    "correctable",
    "depolarizing",
    "effective_channel",
    "group_conditionals",
    "infidelity",
    "kraus_to_process",
    "optimize_level",
    "optimized_threshold",
    "pauli_mul",
    "pauli_twirl",
    "perturb",
    "run_hard_decoder",
    "symmetric_decoder",
    "symmetric_threshold",
    "transversal_group",
    "weight",
]
