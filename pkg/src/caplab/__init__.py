"""Entanglement-assisted classical capacity of finite-dimensional quantum channels."""

from caplab.qmat import DensityMatrix, PureBipartiteState
from caplab.channels import QuantumChannel, standard_channel
from caplab.entropy import Ensemble
from caplab.capacity import CapacityResult, OptimizerConfig, compute_ce, compute_one_shot_c1

__all__ = [
    "CapacityResult",
    "DensityMatrix",
    "Ensemble",
    "OptimizerConfig",
    "PureBipartiteState",
    "QuantumChannel",
    "compute_ce",
    "compute_one_shot_c1",
    "standard_channel",
]
