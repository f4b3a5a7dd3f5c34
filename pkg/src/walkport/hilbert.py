"""Sparse state vectors over tensor products of heterogeneous finite registers.

A register is a bounded signed lattice, a cyclic lattice, or a two-level
coin.  A state stores only its nonzero amplitudes, keyed by a tuple of one
integer per register in layout order, so a serialized state reads like the
ket string it represents.  States are values: every operation returns a new
state and never mutates its inputs, which makes them safe to share across
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import (
    EmptyState,
    InvalidLabel,
    LayoutMismatch,
    NotUnitary,
    UnknownRegister,
    WrongRegisterKind,
)

PRUNE_TOL = 1e-12
NORM_TOL = 1e-10
GATE_TOL = 1e-12

LATTICE = "lattice"
CYCLE = "cycle"
COIN = "coin"

Label = tuple[int, ...]

SQRT1_2 = 1.0 / math.sqrt(2.0)
HADAMARD = np.array([[SQRT1_2, SQRT1_2], [SQRT1_2, -SQRT1_2]], dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class Register:
    """One tensor factor of the composite space.

    ``size`` is the half-width for a lattice (admitting values in
    [-size, size]), the modulus for a cycle (values in [0, size)), and
    unused for coins (values 0 or 1).
    """

    name: str
    kind: str
    size: int = 0

    def __post_init__(self) -> None:
        if self.kind not in (LATTICE, CYCLE, COIN):
            raise ValueError(f"unknown register kind {self.kind!r}")
        if self.kind in (LATTICE, CYCLE) and self.size < 1:
            raise ValueError(f"register {self.name!r} needs a positive size")

    @property
    def role(self) -> str:
        return "coin" if self.kind == COIN else "position"

    @property
    def dim(self) -> int:
        if self.kind == LATTICE:
            return 2 * self.size + 1
        if self.kind == CYCLE:
            return self.size
        return 2

    def values(self) -> range:
        if self.kind == LATTICE:
            return range(-self.size, self.size + 1)
        if self.kind == CYCLE:
            return range(self.size)
        return range(2)

    def admits(self, value: int) -> bool:
        if self.kind == LATTICE:
            return -self.size <= value <= self.size
        if self.kind == CYCLE:
            return 0 <= value < self.size
        return value in (0, 1)


def lattice(name: str, bound: int = 8) -> Register:
    return Register(name, LATTICE, bound)


def cycle(name: str, modulus: int) -> Register:
    return Register(name, CYCLE, modulus)


def coin(name: str) -> Register:
    return Register(name, COIN)


class RegisterLayout:
    """Ordered register list fixing label order and serialization order."""

    def __init__(self, registers: Iterable[Register]):
        self.registers = tuple(registers)
        names = [r.name for r in self.registers]
        if len(set(names)) != len(names):
            raise ValueError("duplicate register names in layout")
        self._index = {r.name: i for i, r in enumerate(self.registers)}

    def __len__(self) -> int:
        return len(self.registers)

    def __iter__(self) -> Iterator[Register]:
        return iter(self.registers)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RegisterLayout) and self.registers == other.registers

    def __hash__(self) -> int:
        return hash(self.registers)

    def __repr__(self) -> str:
        return f"RegisterLayout({', '.join(r.name for r in self.registers)})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.registers)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownRegister(f"no register named {name!r}") from None

    def register(self, name: str) -> Register:
        return self.registers[self.index(name)]

    def validate_label(self, label: Iterable[int]) -> Label:
        label = tuple(int(v) for v in label)
        if len(label) != len(self.registers):
            raise InvalidLabel(
                f"label {label} has {len(label)} entries, layout has {len(self.registers)}"
            )
        for reg, value in zip(self.registers, label):
            if not reg.admits(value):
                raise InvalidLabel(f"value {value} outside range of register {reg.name!r}")
        return label

    def subset(self, names: Iterable[str]) -> tuple[int, ...]:
        """Indices of the named registers, in the order given."""
        return tuple(self.index(n) for n in names)

    def without(self, names: Iterable[str]) -> "RegisterLayout":
        drop = set(names)
        for n in drop:
            self.index(n)
        return RegisterLayout(r for r in self.registers if r.name not in drop)

    def descriptor(self) -> list[dict]:
        return [{"name": r.name, "kind": r.kind, "size": r.size} for r in self.registers]

    @classmethod
    def from_descriptor(cls, desc: Iterable[Mapping]) -> "RegisterLayout":
        return cls(Register(d["name"], d["kind"], int(d.get("size", 0))) for d in desc)


class SparseState:
    """Immutable sparse wavefunction: a map from basis labels to amplitudes.

    Entries below the prune tolerance are dropped at construction; all
    labels are range-checked and all amplitudes checked finite, so a state
    that exists is a valid one.
    """

    __slots__ = ("layout", "tol", "_amps")

    def __init__(
        self,
        layout: RegisterLayout,
        amps: Mapping[Label, complex],
        tol: float = PRUNE_TOL,
    ):
        kept: dict[Label, complex] = {}
        for label, amp in amps.items():
            amp = complex(amp)
            if abs(amp) < tol:
                continue
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude at {label}")
            kept[layout.validate_label(label)] = amp
        self.layout = layout
        self.tol = tol
        self._amps = kept

    @property
    def amps(self) -> Mapping[Label, complex]:
        return MappingProxyType(self._amps)

    def __len__(self) -> int:
        return len(self._amps)

    def __repr__(self) -> str:
        return f"SparseState({len(self._amps)} terms on {self.layout!r})"

    def amplitude(self, label: Iterable[int]) -> complex:
        return self._amps.get(tuple(label), 0.0 + 0.0j)

    def terms(self) -> list[tuple[Label, complex]]:
        """Entries sorted by label, the canonical iteration order."""
        return sorted(self._amps.items())

    def norm2(self) -> float:
        return sum((a * a.conjugate()).real for a in self._amps.values())

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm2() - 1.0) < tol

    def is_zero(self) -> bool:
        return not self._amps

    def scaled(self, factor: complex) -> "SparseState":
        return SparseState(
            self.layout, {l: factor * a for l, a in self._amps.items()}, self.tol
        )

    def normalized(self) -> "SparseState":
        n = math.sqrt(self.norm2())
        if n == 0.0:
            raise EmptyState("cannot normalize the zero state")
        return self.scaled(1.0 / n)

    def allclose(self, other: "SparseState", tol: float = NORM_TOL) -> bool:
        if self.layout != other.layout:
            return False
        for label in self._amps.keys() | other._amps.keys():
            if abs(self.amplitude(label) - other.amplitude(label)) > tol:
                return False
        return True

    def max_delta(self, other: "SparseState") -> float:
        keys = self._amps.keys() | other._amps.keys()
        return max((abs(self.amplitude(k) - other.amplitude(k)) for k in keys), default=0.0)

    def to_json_dict(self) -> dict:
        return {
            "layout": self.layout.descriptor(),
            "amps": [
                {"label": list(label), "re": amp.real, "im": amp.imag}
                for label, amp in self.terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "SparseState":
        layout = RegisterLayout.from_descriptor(data["layout"])
        amps = {
            tuple(entry["label"]): complex(entry["re"], entry["im"])
            for entry in data["amps"]
        }
        return cls(layout, amps)


def basis_state(layout: RegisterLayout, label: Iterable[int], tol: float = PRUNE_TOL) -> SparseState:
    """Single-basis-vector state |label>."""
    return SparseState(layout, {layout.validate_label(label): 1.0 + 0.0j}, tol)


def superpose(
    layout: RegisterLayout,
    terms: Iterable[tuple[Iterable[int], complex]],
    tol: float = PRUNE_TOL,
) -> SparseState:
    """Weighted sum of basis vectors; duplicate labels merge additively."""
    amps: dict[Label, complex] = {}
    count = 0
    for label, amp in terms:
        key = layout.validate_label(label)
        amps[key] = amps.get(key, 0.0 + 0.0j) + complex(amp)
        count += 1
    if count == 0:
        raise EmptyState("superpose needs at least one term")
    return SparseState(layout, amps, tol)


def inner_product(x: SparseState, y: SparseState) -> complex:
    """<x|y>, conjugating x."""
    if x.layout != y.layout:
        raise LayoutMismatch("inner product needs matching layouts")
    if len(x) > len(y):
        return inner_product(y, x).conjugate()
    return sum(
        (amp.conjugate() * y._amps[label] for label, amp in x._amps.items() if label in y._amps),
        0.0 + 0.0j,
    )


def check_unitary(gate: np.ndarray, tol: float = GATE_TOL) -> None:
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2, 2):
        raise NotUnitary(f"expected a 2x2 matrix, got shape {gate.shape}")
    defect = np.abs(gate.conj().T @ gate - np.eye(2)).max()
    if defect > tol:
        raise NotUnitary(f"matrix fails unitarity by {defect:.3e}")


def apply_coin_gate(state: SparseState, register: str, gate: np.ndarray) -> SparseState:
    """Apply a 2x2 unitary to one coin register."""
    idx = state.layout.index(register)
    if state.layout.registers[idx].kind != COIN:
        raise WrongRegisterKind(f"register {register!r} is not a coin")
    check_unitary(gate)
    gate = np.asarray(gate, dtype=complex)
    amps: dict[Label, complex] = {}
    for label, amp in state._amps.items():
        v = label[idx]
        for u in (0, 1):
            w = gate[u, v]
            if w == 0.0:
                continue
            new_label = label[:idx] + (u,) + label[idx + 1 :]
            amps[new_label] = amps.get(new_label, 0.0 + 0.0j) + w * amp
    return SparseState(state.layout, amps, state.tol)


def prune(state: SparseState, tol: float | None = None) -> SparseState:
    """Drop entries below the tolerance (re-applying the constructor rule)."""
    return SparseState(state.layout, state._amps, state.tol if tol is None else tol)
