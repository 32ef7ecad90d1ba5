"""Measurement-based entanglement propagation with noisy resources and unsharp Bell measurements."""

from .channels import NoisePlacement, apply_local, make_channel, prepare_resource
from .entanglement import average_monogamy, monogamy_delta, monogamy_score, negativity
from .measurement import UnsharpBellMeasurement, measurement_operators, povm_elements
from .optimize import OptimizationProblem, best_delta, critical_lambda, maximize, optimal_resource
from .protocol import BranchResult, ProtocolSpec, enumerate_branches, post_select, protocol_delta, run_branch
from .states import AuxiliaryParams, ResourceParams, auxiliary_state, bell_state, resource_state

__version__ = "0.1.0"
