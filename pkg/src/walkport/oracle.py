"""Independent dense ground truth for the sparse engine.

States become flat complex vectors indexed by a mixed-radix encoding of the
basis label, and each walk step becomes a literal operator matrix assembled
with Kronecker products of per-register factors.  Matrices are built with
scipy.sparse (dense conversion is available for small spaces), applied by
matrix-vector products, and checked for unitarity as matrices.

Truncated lattices are embedded cyclically here: the shift factor is the
cyclic permutation of the 2B+1 lattice values, which keeps every step
matrix exactly unitary.  The embedding is faithful because no protocol run
ever reaches the truncation edge with a further move pending; the entrywise
agreement checks against the sparse engine (which hard-errors at the
boundary instead) would expose any wraparound.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import scipy.sparse as sp

from .errors import DimensionOverflow
from .hilbert import COIN, LATTICE, Label, Register, RegisterLayout, SparseState
from .protocols import Payload, ProtocolSpec, get_protocol
from .walkops import WalkStep

DIM_CAP = 1 << 26

# Truncation half-widths sufficient for each protocol's reachable positions,
# with the cycle protocol keeping its native modulus.
ORACLE_BOUNDS = {"line1q": 4, "cycle1q": None, "single2q": 4, "twostep2q": 4}


def layout_dim(layout: RegisterLayout) -> int:
    dim = 1
    for reg in layout:
        dim *= reg.dim
    return dim


def check_dim(layout: RegisterLayout, cap: int = DIM_CAP) -> int:
    dim = layout_dim(layout)
    if dim > cap:
        raise DimensionOverflow(f"dense dimension {dim} exceeds cap {cap}")
    return dim


def value_index(reg: Register, value: int) -> int:
    """Position of a register value along its dense axis."""
    return value + reg.size if reg.kind == LATTICE else value


def index_value(reg: Register, index: int) -> int:
    return index - reg.size if reg.kind == LATTICE else index


def label_to_index(layout: RegisterLayout, label: Label) -> int:
    idx = 0
    for reg, value in zip(layout.registers, label):
        idx = idx * reg.dim + value_index(reg, value)
    return idx


def index_to_label(layout: RegisterLayout, index: int) -> Label:
    values = []
    for reg in reversed(layout.registers):
        index, sub = divmod(index, reg.dim)
        values.append(index_value(reg, sub))
    return tuple(reversed(values))


def densify(state: SparseState, cap: int = DIM_CAP) -> np.ndarray:
    dim = check_dim(state.layout, cap)
    vec = np.zeros(dim, dtype=complex)
    for label, amp in state.amps.items():
        vec[label_to_index(state.layout, label)] = amp
    return vec


def sparsify(vec: np.ndarray, layout: RegisterLayout, tol: float = 1e-12) -> SparseState:
    amps: dict[Label, complex] = {}
    for index in np.flatnonzero(np.abs(vec) >= tol):
        amps[index_to_label(layout, int(index))] = complex(vec[index])
    return SparseState(layout, amps, tol)


def oracle_spec(protocol_id: str, bound: int | None = None) -> ProtocolSpec:
    """The protocol rebuilt on the oracle's (smaller) truncation."""
    if bound is None:
        bound = ORACLE_BOUNDS[protocol_id]
    if bound is None:
        return get_protocol(protocol_id)
    return get_protocol(protocol_id, bound)


def shift_factor(reg: Register, step: int) -> sp.csr_matrix:
    """Cyclic permutation moving a position register by ``step``."""
    n = reg.dim
    rows = [(i + step) % n for i in range(n)]
    return sp.csr_matrix(
        (np.ones(n), (rows, np.arange(n))), shape=(n, n), dtype=complex
    )


def coin_projector_factor(value: int) -> sp.csr_matrix:
    mat = np.zeros((2, 2), dtype=complex)
    mat[value, value] = 1.0
    return sp.csr_matrix(mat)


def _kron_chain(factors: list[sp.spmatrix]) -> sp.csr_matrix:
    out = factors[0]
    for factor in factors[1:]:
        out = sp.kron(out, factor, format="csr")
    return out.tocsr()


def step_matrix(
    spec: ProtocolSpec, step_index: int, cap: int = DIM_CAP
) -> sp.csr_matrix:
    """The literal operator matrix of one walk step on the truncated space."""
    check_dim(spec.layout, cap)
    step: WalkStep = spec.steps[step_index]
    matrix: sp.csr_matrix | None = None
    for register, gate in step.gates:
        factors = [
            sp.csr_matrix(np.asarray(gate, dtype=complex))
            if reg.name == register
            else sp.identity(reg.dim, dtype=complex, format="csr")
            for reg in spec.layout
        ]
        term = _kron_chain(factors)
        matrix = term if matrix is None else term @ matrix
    for cs in step.shifts:
        total: sp.csr_matrix | None = None
        for outcome in itertools.product((0, 1), repeat=len(cs.coins)):
            step_size = cs.rule[outcome]
            factors = []
            for reg in spec.layout:
                if reg.name == cs.position:
                    factors.append(shift_factor(reg, step_size))
                elif reg.name in cs.coins:
                    factors.append(
                        coin_projector_factor(outcome[cs.coins.index(reg.name)])
                    )
                else:
                    factors.append(sp.identity(reg.dim, dtype=complex, format="csr"))
            term = _kron_chain(factors)
            total = term if total is None else total + term
        matrix = total if matrix is None else total @ matrix
    assert matrix is not None
    return matrix.tocsr()


def step_matrix_dense(spec: ProtocolSpec, step_index: int, cap: int = 4096) -> np.ndarray:
    """Dense ndarray form of a step matrix, for small spaces only."""
    dim = layout_dim(spec.layout)
    if dim > cap:
        raise DimensionOverflow(f"dense ndarray of dimension {dim} exceeds cap {cap}")
    return step_matrix(spec, step_index).toarray()


def unitarity_defect(matrix: sp.spmatrix) -> float:
    """max |U^dagger U - I|, computed sparsely."""
    dim = matrix.shape[0]
    deviation = (matrix.getH() @ matrix - sp.identity(dim, dtype=complex)).tocoo()
    return float(np.abs(deviation.data).max()) if deviation.nnz else 0.0


def dense_initial(spec: ProtocolSpec, payload: Payload) -> np.ndarray:
    """Initial product state assembled directly with numpy Kronecker products."""
    factors: list[np.ndarray] = []
    consumed: set[str] = set()
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    for reg in spec.layout:
        if reg.name in consumed:
            continue
        if reg.name in (spec.alice_coins[0], spec.bob_coins[0]):
            alice_side = reg.name == spec.alice_coins[0]
            factors.append(np.asarray(payload.alice if alice_side else payload.bob))
            consumed.update(spec.alice_coins if alice_side else spec.bob_coins)
        elif reg.name in spec.plus_coins:
            factors.append(plus)
        elif reg.kind == COIN:
            factors.append(np.array([1.0, 0.0], dtype=complex))
        else:
            vec = np.zeros(reg.dim, dtype=complex)
            vec[value_index(reg, 0)] = 1.0
            factors.append(vec)
    out = factors[0]
    for factor in factors[1:]:
        out = np.kron(out, factor)
    return out


_STEP_CACHE: dict[tuple[str, int, int], sp.csr_matrix] = {}


def cached_step_matrix(spec: ProtocolSpec, step_index: int) -> sp.csr_matrix:
    key = (spec.id, spec.layout.registers[0].size, step_index)
    if key not in _STEP_CACHE:
        _STEP_CACHE[key] = step_matrix(spec, step_index)
    return _STEP_CACHE[key]


def dense_run(spec: ProtocolSpec, payload: Payload, tol: float = 1e-12) -> SparseState:
    """Pre-measurement state computed entirely on the dense path."""
    vec = dense_initial(spec, payload)
    for k in range(len(spec.steps)):
        vec = cached_step_matrix(spec, k) @ vec
    return sparsify(vec, spec.layout, tol)
