"""The four bidirectional teleportation protocols as declarative data.

Each protocol names its registers, how the payloads and ancilla coins are
prepared, the four walk steps, which registers get measured, and how the
reachable position support is tiled into orthonormal measurement families.
Register names say what a register does: ``a_pos*`` are Alice's walker
positions, ``a_in*`` the coins carrying her unknown state, ``a_out*`` the
coins that end up holding the state teleported to her.

Layout order follows the ket convention used throughout: positions first,
then Alice's coins, then Bob's (``line1q``/``cycle1q``: a_pos, b_pos, a_in,
a_out, b_in, b_out).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotNormalized, ShapeMismatch
from .hilbert import (
    HADAMARD,
    PRUNE_TOL,
    Label,
    RegisterLayout,
    SparseState,
    coin,
    cycle,
    lattice,
)
from .walkops import ConditionedShift, WalkStep, apply_walk_step, two_coin_shift_rule

DEFAULT_BOUND = 8

PROTOCOL_IDS = ("line1q", "cycle1q", "single2q", "twostep2q")

PAYLOAD_NORM_TOL = 1e-10


def bits_to_index(bits: tuple[int, ...]) -> int:
    """Big-endian bit tuple to integer: (1, 0) -> 2."""
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value


@dataclass(frozen=True, eq=False)
class Payload:
    """The two unknown states: Alice's (headed to Bob) and Bob's (headed to Alice)."""

    alice: np.ndarray
    bob: np.ndarray

    def __post_init__(self) -> None:
        for name in ("alice", "bob"):
            vec = np.asarray(getattr(self, name), dtype=complex).reshape(-1)
            vec.setflags(write=False)
            object.__setattr__(self, name, vec)
        if self.alice.shape != self.bob.shape or len(self.alice) not in (2, 4):
            raise ShapeMismatch(
                f"payload vectors must both have length 2 or 4, "
                f"got {len(self.alice)} and {len(self.bob)}"
            )
        for name in ("alice", "bob"):
            norm = np.linalg.norm(getattr(self, name))
            if abs(norm - 1.0) > PAYLOAD_NORM_TOL:
                raise NotNormalized(f"{name} vector has norm {norm!r}")

    @property
    def qubits(self) -> int:
        return 1 if len(self.alice) == 2 else 2


def random_payload(rng: np.random.Generator, qubits: int) -> Payload:
    """Normalized complex-Gaussian payload pair (uniform on the sphere)."""
    dim = 2**qubits

    def draw() -> np.ndarray:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return v / np.linalg.norm(v)

    return Payload(draw(), draw())


def seeded_payloads(seed: int, count: int, qubits: int) -> list[Payload]:
    rng = np.random.default_rng(seed)
    return [random_payload(rng, qubits) for _ in range(count)]


@dataclass(frozen=True)
class PositionFamily:
    """A disjoint set of position tuples measured as one orthonormal family.

    Members are kept sorted; outcome ``r`` is the superposition whose sign
    on member ``k`` is (-1)^popcount(r & k), i.e. the sign-pattern basis
    over the members.  Families of size 1 have a single plain outcome.
    """

    name: str
    registers: tuple[str, ...]
    members: tuple[Label, ...]

    def __post_init__(self) -> None:
        if tuple(sorted(self.members)) != self.members:
            raise ValueError(f"family {self.name!r} members must be sorted")
        m = len(self.members)
        if m == 0 or m & (m - 1):
            raise ValueError(f"family {self.name!r} size must be a power of two")

    @property
    def outcome_count(self) -> int:
        return len(self.members)

    def outcome_name(self, r: int) -> str:
        return self.name if len(self.members) == 1 else f"{self.name}:{r}"

    def signs(self, r: int) -> tuple[int, ...]:
        return tuple(-1 if (r & k).bit_count() % 2 else 1 for k in range(len(self.members)))


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """Everything needed to run and measure one protocol."""

    id: str
    layout: RegisterLayout
    steps: tuple[WalkStep, ...]
    alice_coins: tuple[str, ...]
    bob_coins: tuple[str, ...]
    plus_coins: tuple[str, ...]
    measured_positions: tuple[str, ...]
    measured_coins: tuple[str, ...]
    target_coins: tuple[str, ...]
    position_families: tuple[PositionFamily, ...]
    qubits: int
    tol: float = PRUNE_TOL

    def __post_init__(self) -> None:
        if len(self.steps) != 4:
            raise ValueError("a protocol has exactly four walk steps")
        if set(self.target_coins) & set(self.measured_coins):
            raise ValueError("target coins must be disjoint from measured coins")


def _pattern_values_pair(bit: int) -> tuple[int, ...]:
    # Support values of one position register: stays at 0, or reaches +-2.
    return (0,) if bit == 0 else (-2, 2)


def _pattern_values_merged(bits: tuple[int, int]) -> tuple[int, ...]:
    # Support values of a single position driven by two coin pairs, keyed
    # by which of the paired +-2 / 0 patterns it merges (see Q families).
    return {
        (0, 0): (0,),
        (0, 1): (-1, 1),
        (1, 0): (-3, 3),
        (1, 1): (-4, -2, 2, 4),
    }[bits]


def _line1q_families(regs: tuple[str, str]) -> tuple[PositionFamily, ...]:
    families = []
    for pattern in itertools.product((0, 1), repeat=2):
        members = tuple(
            sorted(itertools.product(*(_pattern_values_pair(b) for b in pattern)))
        )
        name = "".join("2" if b else "0" for b in pattern)
        families.append(PositionFamily(name, regs, members))
    return tuple(families)


def _cycle1q_families(regs: tuple[str, str]) -> tuple[PositionFamily, ...]:
    # On the 4-cycle the +-2 line positions merge into vertex 2, so every
    # reachable position tuple is its own family.
    families = []
    for pattern in itertools.product((0, 1), repeat=2):
        member = tuple(2 if b else 0 for b in pattern)
        name = "".join(str(v) for v in member)
        families.append(PositionFamily(name, regs, (member,)))
    return tuple(families)


def _single2q_families(regs: tuple[str, ...]) -> tuple[PositionFamily, ...]:
    families = []
    for k in range(16):
        a_bits = ((k >> 1) & 1, k & 1)
        b_bits = ((k >> 3) & 1, (k >> 2) & 1)
        pattern = a_bits + b_bits
        members = tuple(
            sorted(itertools.product(*(_pattern_values_pair(b) for b in pattern)))
        )
        families.append(PositionFamily(f"P{k}", regs, members))
    return tuple(families)


def _twostep2q_families(regs: tuple[str, str]) -> tuple[PositionFamily, ...]:
    families = []
    for k in range(16):
        a_bits = ((k >> 1) & 1, k & 1)
        b_bits = ((k >> 3) & 1, (k >> 2) & 1)
        members = tuple(
            sorted(
                itertools.product(
                    _pattern_values_merged(a_bits), _pattern_values_merged(b_bits)
                )
            )
        )
        families.append(PositionFamily(f"Q{k}", regs, members))
    return tuple(families)


def _line1q(bound: int, tol: float, cyclic: bool) -> ProtocolSpec:
    pos = (cycle("a_pos", 4), cycle("b_pos", 4)) if cyclic else (
        lattice("a_pos", bound),
        lattice("b_pos", bound),
    )
    layout = RegisterLayout(
        pos + (coin("a_in"), coin("a_out"), coin("b_in"), coin("b_out"))
    )
    gates = {name: ((name, HADAMARD),) for name in ("a_out", "b_out")}
    steps = (
        WalkStep(shifts=(ConditionedShift("a_pos", ("a_in",)),)),
        WalkStep(shifts=(ConditionedShift("b_pos", ("b_in",)),)),
        WalkStep(
            gates=() if cyclic else gates["a_out"],
            shifts=(ConditionedShift("b_pos", ("a_out",)),),
        ),
        WalkStep(
            gates=() if cyclic else gates["b_out"],
            shifts=(ConditionedShift("a_pos", ("b_out",)),),
        ),
    )
    pos_names = ("a_pos", "b_pos")
    return ProtocolSpec(
        id="cycle1q" if cyclic else "line1q",
        layout=layout,
        steps=steps,
        alice_coins=("a_in",),
        bob_coins=("b_in",),
        plus_coins=("a_out", "b_out") if cyclic else (),
        measured_positions=pos_names,
        measured_coins=("a_in", "b_in"),
        target_coins=("a_out", "b_out"),
        position_families=_cycle1q_families(pos_names)
        if cyclic
        else _line1q_families(pos_names),
        qubits=1,
        tol=tol,
    )


def _single2q(bound: int, tol: float) -> ProtocolSpec:
    layout = RegisterLayout(
        (
            lattice("a_pos0", bound),
            lattice("a_pos1", bound),
            lattice("b_pos0", bound),
            lattice("b_pos1", bound),
            coin("a_in0"),
            coin("a_in1"),
            coin("a_out0"),
            coin("a_out1"),
            coin("b_in0"),
            coin("b_in1"),
            coin("b_out0"),
            coin("b_out1"),
        )
    )
    steps = (
        WalkStep(
            shifts=(
                ConditionedShift("a_pos0", ("a_in0",)),
                ConditionedShift("a_pos1", ("a_in1",)),
            )
        ),
        WalkStep(
            shifts=(
                ConditionedShift("b_pos0", ("b_in0",)),
                ConditionedShift("b_pos1", ("b_in1",)),
            )
        ),
        WalkStep(
            gates=(("a_out0", HADAMARD), ("a_out1", HADAMARD)),
            shifts=(
                ConditionedShift("b_pos0", ("a_out0",)),
                ConditionedShift("b_pos1", ("a_out1",)),
            ),
        ),
        WalkStep(
            gates=(("b_out0", HADAMARD), ("b_out1", HADAMARD)),
            shifts=(
                ConditionedShift("a_pos0", ("b_out0",)),
                ConditionedShift("a_pos1", ("b_out1",)),
            ),
        ),
    )
    pos_names = ("a_pos0", "a_pos1", "b_pos0", "b_pos1")
    return ProtocolSpec(
        id="single2q",
        layout=layout,
        steps=steps,
        alice_coins=("a_in0", "a_in1"),
        bob_coins=("b_in0", "b_in1"),
        plus_coins=(),
        measured_positions=pos_names,
        measured_coins=("a_in0", "a_in1", "b_in0", "b_in1"),
        target_coins=("a_out0", "a_out1", "b_out0", "b_out1"),
        position_families=_single2q_families(pos_names),
        qubits=2,
        tol=tol,
    )


def _twostep2q(bound: int, tol: float) -> ProtocolSpec:
    layout = RegisterLayout(
        (
            lattice("a_pos", bound),
            lattice("b_pos", bound),
            coin("a_in0"),
            coin("a_in1"),
            coin("a_out0"),
            coin("a_out1"),
            coin("b_in0"),
            coin("b_in1"),
            coin("b_out0"),
            coin("b_out1"),
        )
    )
    rule = two_coin_shift_rule()
    steps = (
        WalkStep(shifts=(ConditionedShift("a_pos", ("a_in0", "a_in1"), rule),)),
        WalkStep(shifts=(ConditionedShift("b_pos", ("b_in0", "b_in1"), rule),)),
        WalkStep(
            gates=(("a_out0", HADAMARD), ("a_out1", HADAMARD)),
            shifts=(ConditionedShift("b_pos", ("a_out0", "a_out1"), rule),),
        ),
        WalkStep(
            gates=(("b_out0", HADAMARD), ("b_out1", HADAMARD)),
            shifts=(ConditionedShift("a_pos", ("b_out0", "b_out1"), rule),),
        ),
    )
    pos_names = ("a_pos", "b_pos")
    return ProtocolSpec(
        id="twostep2q",
        layout=layout,
        steps=steps,
        alice_coins=("a_in0", "a_in1"),
        bob_coins=("b_in0", "b_in1"),
        plus_coins=(),
        measured_positions=pos_names,
        measured_coins=("a_in0", "a_in1", "b_in0", "b_in1"),
        target_coins=("a_out0", "a_out1", "b_out0", "b_out1"),
        position_families=_twostep2q_families(pos_names),
        qubits=2,
        tol=tol,
    )


def get_protocol(protocol_id: str, bound: int = DEFAULT_BOUND, tol: float = PRUNE_TOL) -> ProtocolSpec:
    if protocol_id == "line1q":
        return _line1q(bound, tol, cyclic=False)
    if protocol_id == "cycle1q":
        return _line1q(bound, tol, cyclic=True)
    if protocol_id == "single2q":
        return _single2q(bound, tol)
    if protocol_id == "twostep2q":
        return _twostep2q(bound, tol)
    raise KeyError(f"unknown protocol {protocol_id!r}; choose from {PROTOCOL_IDS}")


def build_initial(spec: ProtocolSpec, payload: Payload) -> SparseState:
    """Product state: walkers at the origin, payloads on the *_in coins."""
    if payload.qubits != spec.qubits:
        raise ShapeMismatch(
            f"{spec.id} needs {2**spec.qubits}-component payloads, "
            f"got {len(payload.alice)}"
        )
    plus = 1.0 / math.sqrt(2.0)
    blocks: list[tuple[list[tuple[int, ...]], list[complex]]] = []
    consumed: set[str] = set()
    for reg in spec.layout:
        if reg.name in consumed:
            continue
        if reg.name in (spec.alice_coins[0], spec.bob_coins[0]):
            names = spec.alice_coins if reg.name == spec.alice_coins[0] else spec.bob_coins
            vec = payload.alice if reg.name == spec.alice_coins[0] else payload.bob
            parts = list(itertools.product((0, 1), repeat=len(names)))
            blocks.append((parts, [vec[bits_to_index(p)] for p in parts]))
            consumed.update(names)
        elif reg.name in spec.plus_coins:
            blocks.append(([(0,), (1,)], [plus, plus]))
        else:
            blocks.append(([(0,)], [1.0]))
    terms: list[tuple[tuple[int, ...], complex]] = [((), 1.0 + 0.0j)]
    for parts, weights in blocks:
        terms = [
            (label + part, amp * w)
            for label, amp in terms
            for part, w in zip(parts, weights)
            if w != 0.0
        ]
    return SparseState(spec.layout, dict(terms), spec.tol)


def walk_states(spec: ProtocolSpec, payload: Payload) -> list[SparseState]:
    """The initial state followed by the state after each of the four steps."""
    states = [build_initial(spec, payload)]
    for step in spec.steps:
        states.append(apply_walk_step(states[-1], step))
    return states


def run_walks(spec: ProtocolSpec, payload: Payload) -> SparseState:
    """Pre-measurement state after all four walk steps."""
    return walk_states(spec, payload)[-1]
