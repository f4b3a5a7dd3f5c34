"""Simulator and exhaustive verifier for bidirectional quantum-walk teleportation."""

from .errors import WalkportError
from .hilbert import RegisterLayout, SparseState, basis_state, inner_product, superpose
from .measure import (
    BranchResult,
    CorrectionTable,
    ProjectorSpec,
    enumerate_branches,
    project,
    synthesized_table,
    verify_branch,
)
from .protocols import (
    PROTOCOL_IDS,
    Payload,
    ProtocolSpec,
    build_initial,
    get_protocol,
    random_payload,
    run_walks,
)

__version__ = "0.1.0"

__all__ = [
    "BranchResult",
    "CorrectionTable",
    "PROTOCOL_IDS",
    "Payload",
    "ProjectorSpec",
    "ProtocolSpec",
    "RegisterLayout",
    "SparseState",
    "WalkportError",
    "basis_state",
    "build_initial",
    "enumerate_branches",
    "get_protocol",
    "inner_product",
    "project",
    "random_payload",
    "run_walks",
    "superpose",
    "synthesized_table",
    "verify_branch",
]
