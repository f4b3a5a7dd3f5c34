"""Projective measurement, branch enumeration, and Pauli correction tables.

A measurement plan is a list of position-outcome projectors (possibly
superpositions over a family's members) crossed with sign-basis outcomes
on the measured coins.  For every branch we compute the probability, apply
the correction table's Pauli string to the residual on the target coins,
and score the result against the expected swapped payloads.

Correction tables are synthesized by searching Pauli strings against a
generic payload and confirming on fresh random payloads; the synthesized
tables are the source of truth.  Reference tables bundled under ``data/``
are compared against them row by row and any disagreement is reported, not
silently adopted.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import MalformedProjector, MissingCorrection, NoPauliCorrection
from .hilbert import Label, RegisterLayout, SparseState
from .protocols import (
    Payload,
    PositionFamily,
    ProtocolSpec,
    bits_to_index,
    random_payload,
    run_walks,
    seeded_payloads,
)

VACUOUS_TOL = 1e-14
RENORM_TOL_SQ = 1e-24
PROJECTOR_TOL = 1e-12
SYNTH_FIDELITY_TOL = 1e-10
BRANCH_FIDELITY_TOL = 1e-9

PAULI_OPS = ("I", "X", "Z", "ZX")

# Seed for the generic payload used during table synthesis, and the number
# of fresh payloads the synthesized table is confirmed against.
SYNTH_SEED = 1889
SYNTH_CONFIRM = 20


@dataclass(frozen=True, eq=False)
class ProjectorSpec:
    """One orthonormal measurement outcome on a subset of registers."""

    name: str
    registers: tuple[str, ...]
    terms: tuple[tuple[Label, complex], ...]

    def __post_init__(self) -> None:
        norm2 = sum(abs(a) ** 2 for _, a in self.terms)
        if abs(norm2 - 1.0) > PROJECTOR_TOL:
            raise MalformedProjector(f"projector {self.name!r} has norm^2 {norm2!r}")
        if len({l for l, _ in self.terms}) != len(self.terms):
            raise MalformedProjector(f"projector {self.name!r} repeats a label")

    def weights(self) -> dict[Label, complex]:
        return dict(self.terms)


def check_orthogonal(projectors: Sequence[ProjectorSpec]) -> None:
    """Raise unless the projectors are pairwise orthogonal."""
    for i, p in enumerate(projectors):
        wp = p.weights()
        for q in projectors[i + 1 :]:
            overlap = sum(
                wp[l].conjugate() * a for l, a in q.terms if l in wp
            )
            if abs(overlap) > PROJECTOR_TOL:
                raise MalformedProjector(
                    f"projectors {p.name!r} and {q.name!r} overlap by {abs(overlap):.3e}"
                )


def position_projectors(
    family: PositionFamily, mode: str = "hadamard"
) -> list[ProjectorSpec]:
    """The orthonormal outcomes measuring one position family.

    ``hadamard`` combines the members with sign patterns (the reading that
    keeps every payload component alive); ``computational`` measures the
    members directly.
    """
    if mode == "computational":
        projs = [
            ProjectorSpec(family.outcome_name(r), family.registers, ((member, 1.0),))
            for r, member in enumerate(family.members)
        ]
    elif mode == "hadamard":
        w = 1.0 / math.sqrt(family.outcome_count)
        projs = [
            ProjectorSpec(
                family.outcome_name(r),
                family.registers,
                tuple(
                    (member, s * w)
                    for member, s in zip(family.members, family.signs(r))
                ),
            )
            for r in range(family.outcome_count)
        ]
    else:
        raise ValueError(f"unknown projector mode {mode!r}")
    check_orthogonal(projs)
    return projs


def coin_outcome_name(spec: ProtocolSpec, signs: tuple[int, ...]) -> str:
    chars = ["+" if s > 0 else "-" for s in signs]
    q = spec.qubits
    return "".join(chars[:q]) + ("," + "".join(chars[q:]) if q > 1 else "".join(chars[q:]))


def coin_projectors(spec: ProtocolSpec) -> list[ProjectorSpec]:
    """Sign-basis outcomes on the measured coins, '+' before '-'."""
    n = len(spec.measured_coins)
    w = (1.0 / math.sqrt(2.0)) ** n
    projs = []
    for signs in itertools.product((1, -1), repeat=n):
        terms = []
        for bits in itertools.product((0, 1), repeat=n):
            sign = 1
            for s, b in zip(signs, bits):
                if s < 0 and b == 1:
                    sign = -sign
            terms.append((bits, sign * w))
        projs.append(
            ProjectorSpec(coin_outcome_name(spec, signs), spec.measured_coins, tuple(terms))
        )
    check_orthogonal(projs)
    return projs


def project(state: SparseState, proj: ProjectorSpec) -> tuple[float, SparseState]:
    """Measure one outcome.

    Returns the outcome probability and the renormalized post-measurement
    state on the remaining registers (the zero state when the probability
    is numerically zero).
    """
    indices = state.layout.subset(proj.registers)
    keep = [i for i in range(len(state.layout)) if i not in indices]
    rest_layout = state.layout.without(proj.registers)
    weights = proj.weights()
    amps: dict[Label, complex] = {}
    for label, amp in state.amps.items():
        w = weights.get(tuple(label[i] for i in indices))
        if w is None:
            continue
        rest = tuple(label[i] for i in keep)
        amps[rest] = amps.get(rest, 0.0 + 0.0j) + w.conjugate() * amp
    prob = sum((a * a.conjugate()).real for a in amps.values())
    if prob <= RENORM_TOL_SQ:
        return prob, SparseState(rest_layout, {}, state.tol)
    scale = 1.0 / math.sqrt(prob)
    residual = SparseState(
        rest_layout, {l: a * scale for l, a in amps.items()}, state.tol
    )
    return prob, residual


# ---------------------------------------------------------------------------
# Correction tables


@dataclass(frozen=True, eq=False)
class CorrectionTable:
    """(position outcome, coin outcome) -> Pauli string on the target coins.

    A row lists (register, op) pairs with op in {X, Z, ZX}; identity rows
    are empty lists.  Rows apply right to left, matching how composed
    corrections are written.
    """

    protocol: str
    rows: Mapping[tuple[str, str], tuple[tuple[str, str], ...]]

    def get(self, position: str, coin: str) -> tuple[tuple[str, str], ...]:
        try:
            return self.rows[(position, coin)]
        except KeyError:
            raise MissingCorrection(
                f"no correction for outcome ({position!r}, {coin!r}) in {self.protocol}"
            ) from None

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "protocol": self.protocol,
            "rows": [
                {
                    "position": pos,
                    "coin": coin,
                    "pauli": [{"reg": r, "op": o} for r, o in ops],
                }
                for (pos, coin), ops in sorted(self.rows.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "CorrectionTable":
        rows = {
            (row["position"], row["coin"]): tuple(
                (p["reg"], p["op"]) for p in row["pauli"]
            )
            for row in data["rows"]
        }
        return cls(data["protocol"], rows)


def apply_pauli_string(
    state: SparseState, ops: Iterable[tuple[str, str]]
) -> SparseState:
    """Apply listed (register, op) pairs right to left; op in {X, Z, ZX}."""
    amps = dict(state.amps)
    for reg, op in reversed(list(ops)):
        idx = state.layout.index(reg)
        out: dict[Label, complex] = {}
        for label, amp in amps.items():
            bit = label[idx]
            if op == "X":
                label = label[:idx] + (1 - bit,) + label[idx + 1 :]
            elif op == "Z":
                amp = -amp if bit else amp
            elif op == "ZX":
                label = label[:idx] + (1 - bit,) + label[idx + 1 :]
                amp = -amp if 1 - bit else amp
            elif op != "I":
                raise ValueError(f"unknown Pauli op {op!r}")
            out[label] = amp
        amps = out
    return SparseState(state.layout, amps, state.tol)


def pauli_net_classes(
    ops: Iterable[tuple[str, str]], targets: Sequence[str]
) -> dict[str, str]:
    """Reduce a listed Pauli string to one class per register, phase ignored."""
    parity = {t: [0, 0] for t in targets}
    for reg, op in ops:
        x = "X" in op
        z = "Z" in op
        parity[reg][0] ^= int(x)
        parity[reg][1] ^= int(z)
    classes = {}
    for reg, (x, z) in parity.items():
        classes[reg] = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "ZX"}[(x, z)]
    return classes


# Candidate Pauli strings on k coins: (op tuple, xmask, sign vector) with
# the first coin most significant, ops ordered I < X < Z < ZX.
_CANDIDATE_CACHE: dict[int, list[tuple[tuple[str, ...], int, np.ndarray]]] = {}


def _candidates(k: int) -> list[tuple[tuple[str, ...], int, np.ndarray]]:
    if k not in _CANDIDATE_CACHE:
        dim = 1 << k
        idx = np.arange(dim)
        entries = []
        for ops in itertools.product(PAULI_OPS, repeat=k):
            xmask = sum(1 << (k - 1 - i) for i, op in enumerate(ops) if "X" in op)
            zmask = sum(1 << (k - 1 - i) for i, op in enumerate(ops) if "Z" in op)
            signs = np.where(_parity(idx & zmask), -1.0, 1.0)
            entries.append((ops, xmask, signs))
        _CANDIDATE_CACHE[k] = entries
    return _CANDIDATE_CACHE[k]


def _parity(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values, dtype=bool)
    v = values.copy()
    while v.any():
        out ^= (v & 1).astype(bool)
        v >>= 1
    return out


def dense_on_targets(state: SparseState) -> np.ndarray:
    """A coin-only state as a dense vector, first register most significant."""
    k = len(state.layout)
    vec = np.zeros(1 << k, dtype=complex)
    for label, amp in state.amps.items():
        vec[bits_to_index(label)] = amp
    return vec


def expected_output(spec: ProtocolSpec, payload: Payload) -> SparseState:
    """The verified target: Bob's state on Alice's output coins and vice versa."""
    layout = RegisterLayout(
        spec.layout.register(name) for name in spec.target_coins
    )
    q = spec.qubits
    amps = {}
    for bits in itertools.product((0, 1), repeat=2 * q):
        amp = payload.bob[bits_to_index(bits[:q])] * payload.alice[bits_to_index(bits[q:])]
        amps[bits] = amp
    return SparseState(layout, amps, spec.tol)


def expected_output_dense(spec: ProtocolSpec, payload: Payload) -> np.ndarray:
    return np.kron(payload.bob, payload.alice)


@dataclass(frozen=True, eq=False)
class BranchResult:
    """One joint measurement outcome with its corrected residual."""

    position: str
    coin: str
    probability: float
    corrected: SparseState
    fidelity: float
    vacuous: bool
    targets: tuple[str, ...]


def verify_branch(branch: BranchResult, payload: Payload) -> float:
    """Fidelity of the corrected residual against the swapped payloads."""
    if branch.vacuous:
        return 0.0
    expected = np.kron(payload.bob, payload.alice)
    vec = dense_on_targets(branch.corrected)
    return float(abs(np.vdot(expected, vec)) ** 2)


def branch_finals(
    spec: ProtocolSpec,
    payload: Payload,
    families: Sequence[PositionFamily] | None = None,
    mode: str = "hadamard",
) -> dict[tuple[str, str], tuple[float, SparseState]]:
    """Probability and uncorrected target-coin residual for every branch."""
    state = run_walks(spec, payload)
    out: dict[tuple[str, str], tuple[float, SparseState]] = {}
    coins = coin_projectors(spec)
    for family in families if families is not None else spec.position_families:
        for pproj in position_projectors(family, mode):
            p_pos, residual = project(state, pproj)
            for cproj in coins:
                p_coin, final = project(residual, cproj)
                out[(pproj.name, cproj.name)] = (p_pos * p_coin, final)
    return out


def enumerate_branches(
    spec: ProtocolSpec,
    payload: Payload,
    table: CorrectionTable | None = None,
    families: Sequence[PositionFamily] | None = None,
    mode: str = "hadamard",
) -> list[BranchResult]:
    """Every (position outcome, coin outcome) branch, corrected and scored."""
    if table is None:
        table = synthesized_table(spec)
    expected = expected_output_dense(spec, payload)
    results = []
    for (pos_name, coin_name), (prob, final) in branch_finals(
        spec, payload, families, mode
    ).items():
        ops = table.get(pos_name, coin_name)
        vacuous = prob < VACUOUS_TOL
        if vacuous:
            corrected = final
            fidelity = 0.0
        else:
            corrected = apply_pauli_string(final, ops)
            fidelity = float(abs(np.vdot(expected, dense_on_targets(corrected))) ** 2)
        results.append(
            BranchResult(
                position=pos_name,
                coin=coin_name,
                probability=prob,
                corrected=corrected,
                fidelity=fidelity,
                vacuous=vacuous,
                targets=spec.target_coins,
            )
        )
    results.sort(key=lambda b: (b.position, b.coin))
    return results


def synthesize_table(
    spec: ProtocolSpec,
    families: Sequence[PositionFamily] | None = None,
    mode: str = "hadamard",
    seed: int = SYNTH_SEED,
    confirm: int = SYNTH_CONFIRM,
) -> CorrectionTable:
    """Search the Pauli string for every branch and confirm on fresh payloads.

    The search runs per branch over products of {I, X, Z, ZX} on the target
    coins, in lexicographic order, and keeps the first string reaching
    fidelity one on a generic payload.  Raises NoPauliCorrection if a branch
    admits none, which signals a malformed projector family.
    """
    rng = np.random.default_rng(seed)
    payload = random_payload(rng, spec.qubits)
    expected = expected_output_dense(spec, payload)
    k = len(spec.target_coins)
    rows: dict[tuple[str, str], tuple[tuple[str, str], ...]] = {}
    for key, (prob, final) in branch_finals(spec, payload, families, mode).items():
        if prob < VACUOUS_TOL:
            raise NoPauliCorrection(
                f"branch {key} is vacuous on a generic payload; family is malformed"
            )
        vec = dense_on_targets(final)
        chosen = None
        for ops, xmask, signs in _candidates(k):
            corrected = signs * vec[np.arange(len(vec)) ^ xmask]
            if abs(np.vdot(expected, corrected)) ** 2 >= 1.0 - SYNTH_FIDELITY_TOL:
                chosen = ops
                break
        if chosen is None:
            raise NoPauliCorrection(f"no Pauli string corrects branch {key}")
        rows[key] = tuple(
            (reg, op) for reg, op in zip(spec.target_coins, chosen) if op != "I"
        )
    table = CorrectionTable(spec.id, rows)
    for _ in range(confirm):
        check = random_payload(rng, spec.qubits)
        for branch in enumerate_branches(spec, check, table, families, mode):
            if not branch.vacuous and branch.fidelity < 1.0 - BRANCH_FIDELITY_TOL:
                raise NoPauliCorrection(
                    f"correction for ({branch.position}, {branch.coin}) failed "
                    f"confirmation at fidelity {branch.fidelity!r}"
                )
    return table


def generate_family_tables(
    spec: ProtocolSpec, family: PositionFamily, mode: str = "hadamard"
) -> CorrectionTable:
    """Synthesize the correction table for a single position family."""
    return synthesize_table(spec, [family], mode)


_TABLE_CACHE: dict[str, CorrectionTable] = {}


def synthesized_table(spec: ProtocolSpec) -> CorrectionTable:
    """The full synthesized table for a protocol, cached per protocol id."""
    if spec.id not in _TABLE_CACHE:
        _TABLE_CACHE[spec.id] = synthesize_table(spec)
    return _TABLE_CACHE[spec.id]


# ---------------------------------------------------------------------------
# Bundled reference tables


def bundled_table(protocol_id: str) -> CorrectionTable:
    """Reference correction table shipped with the package.

    The reference tables are data, not ground truth: compare_tables()
    reports where they disagree with the synthesized corrections, and a
    handful of known transcription defects are expected to be flagged.
    """
    path = resources.files("walkport.data").joinpath(f"table_{protocol_id}.json")
    return CorrectionTable.from_json_dict(json.loads(path.read_text()))


def compare_tables(
    spec: ProtocolSpec,
    reference: CorrectionTable,
    payloads: Sequence[Payload] | None = None,
) -> dict:
    """Row-by-row comparison of a reference table against the synthesized one.

    Reports net-Pauli mismatches (with whether the reference row still
    reaches the target on generic payloads), rows the reference omits for
    families it covers, and rows it lists that the plan does not contain.
    """
    synth = synthesized_table(spec)
    if payloads is None:
        payloads = seeded_payloads(SYNTH_SEED + 1, 3, spec.qubits)
    covered_positions = sorted({pos for pos, _ in reference.rows})
    expected_keys = [k for k in sorted(synth.rows) if k[0] in covered_positions]
    mismatches = []
    missing = [list(k) for k in expected_keys if k not in reference.rows]
    extra = [list(k) for k in sorted(reference.rows) if k not in synth.rows]
    finals = [
        (payload, branch_finals(spec, payload)) for payload in payloads
    ]
    for key in expected_keys:
        if key not in reference.rows:
            continue
        ref_ops = reference.rows[key]
        syn_ops = synth.rows[key]
        if pauli_net_classes(ref_ops, spec.target_coins) == pauli_net_classes(
            syn_ops, spec.target_coins
        ):
            continue
        ok = True
        for payload, table in finals:
            expected = expected_output_dense(spec, payload)
            prob, final = table[key]
            if prob < VACUOUS_TOL:
                continue
            corrected = dense_on_targets(apply_pauli_string(final, ref_ops))
            if abs(np.vdot(expected, corrected)) ** 2 < 1.0 - BRANCH_FIDELITY_TOL:
                ok = False
                break
        mismatches.append(
            {
                "position": key[0],
                "coin": key[1],
                "reference": [list(p) for p in ref_ops],
                "synthesized": [list(p) for p in syn_ops],
                "reference_achieves_target": ok,
            }
        )
    return {
        "protocol": spec.id,
        "rows_checked": len(expected_keys),
        "mismatches": mismatches,
        "missing_rows": missing,
        "extra_rows": extra,
    }


def corrupt_table(
    table: CorrectionTable, family: str, targets: Sequence[str]
) -> CorrectionTable:
    """Deterministically break every row of one family (for failure injection)."""
    rows = dict(table.rows)
    hit = False
    for (pos, coin), ops in table.rows.items():
        if pos == family or pos.startswith(family + ":"):
            rows[(pos, coin)] = ops + ((targets[0], "Z"),)
            hit = True
    if not hit:
        raise KeyError(f"no rows for family {family!r} in table {table.protocol}")
    return CorrectionTable(table.protocol, rows)
