"""Machine checks of the cross-protocol claims.

Two claims are checked: the single-step and two-step two-qubit protocols
are the same protocol under a bijection between their position families,
and the 4-cycle protocol is the line protocol with positions reduced mod 4.
Both are verified branch by branch on random payloads and table row by
table row, and the checks report deltas rather than trusting structure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MappingIncomplete, NoPauliCorrection
from .hilbert import Label, SparseState
from .measure import (
    enumerate_branches,
    pauli_net_classes,
    project,
    position_projectors,
    synthesize_table,
    synthesized_table,
)
from .protocols import Payload, ProtocolSpec, get_protocol, run_walks

EQUIV_TOL = 1e-10

# Family sizes shared by the two two-qubit plans, origin family first.
FAMILY_SIZES = (1, 2, 2, 4, 2, 4, 4, 8, 2, 4, 4, 8, 4, 8, 8, 16)


@dataclass(frozen=True)
class BasisMapping:
    """Pairing of position families across two protocols, member by member."""

    pairs: tuple[tuple[str, str, tuple[tuple[Label, Label], ...]], ...]

    def outcome_pairs(self) -> list[tuple[str, str]]:
        names = []
        for src, dst, members in self.pairs:
            if len(members) == 1:
                names.append((src, dst))
            else:
                names.extend(
                    (f"{src}:{r}", f"{dst}:{r}") for r in range(len(members))
                )
        return names


def two_qubit_mapping(
    single: ProtocolSpec | None = None, twostep: ProtocolSpec | None = None
) -> BasisMapping:
    """Rank-order bijection between the two-qubit plans' families."""
    single = single or get_protocol("single2q")
    twostep = twostep or get_protocol("twostep2q")
    src = {f.name: f for f in single.position_families}
    dst = {f.name: f for f in twostep.position_families}
    pairs = []
    for k, size in enumerate(FAMILY_SIZES):
        sname, tname = f"P{k}", f"Q{k}"
        if sname not in src or tname not in dst:
            raise MappingIncomplete(f"missing family pair ({sname}, {tname})")
        p, q = src[sname], dst[tname]
        if len(p.members) != size or len(q.members) != size:
            raise MappingIncomplete(
                f"family pair ({sname}, {tname}) sizes "
                f"{len(p.members)}/{len(q.members)} != {size}"
            )
        pairs.append((sname, tname, tuple(zip(p.members, q.members))))
    return BasisMapping(tuple(pairs))


def phase_aligned_delta(u: SparseState, v: SparseState) -> float:
    """Entrywise distance after removing the global phase between two states."""
    overlap = sum(
        v.amplitude(label).conjugate() * amp for label, amp in u.amps.items()
    )
    phase = overlap / abs(overlap) if abs(overlap) > 1e-12 else 1.0
    keys = set(u.amps) | set(v.amps)
    return max(
        (abs(u.amplitude(k) - phase * v.amplitude(k)) for k in keys), default=0.0
    )


def probe_family_basis_readings(spec: ProtocolSpec) -> dict:
    """How many families admit Pauli corrections under each projector reading."""
    out = {}
    for mode in ("hadamard", "computational"):
        correctable = []
        failed = []
        for family in spec.position_families:
            try:
                synthesize_table(spec, [family], mode=mode, confirm=2)
                correctable.append(family.name)
            except NoPauliCorrection:
                failed.append(family.name)
        out[mode] = {
            "families_correctable": len(correctable),
            "families_total": len(spec.position_families),
            "failed_families": failed,
        }
    return out


def check_two_qubit_equivalence(
    payloads: list[Payload],
    mapping: BasisMapping | None = None,
    tol: float = EQUIV_TOL,
    single_table=None,
    twostep_table=None,
    probe_readings: bool = False,
) -> dict:
    """Compare every mapped branch pair and the two synthesized tables."""
    single = get_protocol("single2q")
    twostep = get_protocol("twostep2q")
    if mapping is None:
        mapping = two_qubit_mapping(single, twostep)
    outcome_pairs = mapping.outcome_pairs()
    table_s = single_table if single_table is not None else synthesized_table(single)
    table_t = twostep_table if twostep_table is not None else synthesized_table(twostep)

    table_mismatches = []
    for src, dst in outcome_pairs:
        for coin in sorted({c for _, c in table_s.rows}):
            ops_s = table_s.rows.get((src, coin))
            ops_t = table_t.rows.get((dst, coin))
            if ops_s is None or ops_t is None:
                raise MappingIncomplete(f"table row missing for ({src}, {dst}, {coin})")
            if pauli_net_classes(ops_s, single.target_coins) != pauli_net_classes(
                ops_t, twostep.target_coins
            ):
                table_mismatches.append(
                    {
                        "single_outcome": src,
                        "twostep_outcome": dst,
                        "coin": coin,
                        "single_pauli": [list(p) for p in ops_s],
                        "twostep_pauli": [list(p) for p in ops_t],
                    }
                )

    max_dp = 0.0
    max_ds = 0.0
    branch_mismatches = []
    compared = 0
    for index, payload in enumerate(payloads):
        bs = {
            (b.position, b.coin): b
            for b in enumerate_branches(single, payload, table_s)
        }
        bt = {
            (b.position, b.coin): b
            for b in enumerate_branches(twostep, payload, table_t)
        }
        for src, dst in outcome_pairs:
            for coin in sorted({c for _, c in bs}):
                u, v = bs[(src, coin)], bt[(dst, coin)]
                dp = abs(u.probability - v.probability)
                ds = (
                    0.0
                    if u.vacuous and v.vacuous
                    else phase_aligned_delta(u.corrected, v.corrected)
                )
                compared += 1
                max_dp = max(max_dp, dp)
                max_ds = max(max_ds, ds)
                if dp > tol or ds > tol:
                    branch_mismatches.append(
                        {
                            "payload": index,
                            "single_outcome": src,
                            "twostep_outcome": dst,
                            "coin": coin,
                            "probability_delta": dp,
                            "state_delta": ds,
                        }
                    )
    report = {
        "claim": "two-qubit single-step and two-step protocols are equivalent",
        "payloads": len(payloads),
        "branches_compared": compared,
        "max_probability_delta": max_dp,
        "max_state_delta": max_ds,
        "branch_mismatches": branch_mismatches,
        "table_mismatches": table_mismatches,
        "ok": not branch_mismatches and not table_mismatches,
    }
    if probe_readings:
        report["basis_readings"] = {
            "single2q": probe_family_basis_readings(single),
            "twostep2q": probe_family_basis_readings(twostep),
        }
    return report


# Family names of the line protocol and their counterparts on the cycle,
# where the +-2 positions merge and only the all-plus outcome survives.
CYCLE_LINE_FAMILY_MAP = (
    ("00", "00"),
    ("02:0", "02"),
    ("20:0", "20"),
    ("22:0", "22"),
)


def reduce_mod4(state: SparseState, cycle_layout) -> SparseState:
    """Map a line-protocol state onto the cycle layout, positions mod 4."""
    amps: dict[Label, complex] = {}
    for label, amp in state.amps.items():
        reduced = tuple(
            v % 4 if reg.role == "position" else v
            for reg, v in zip(state.layout.registers, label)
        )
        amps[reduced] = amps.get(reduced, 0.0 + 0.0j) + amp
    return SparseState(cycle_layout, amps, state.tol)


def check_cycle_line_equivalence(
    payloads: list[Payload],
    tol: float = EQUIV_TOL,
    cycle_table=None,
) -> dict:
    """Line state mod 4 vs cycle state, plus the mapped table rows."""
    line = get_protocol("line1q")
    cyc = get_protocol("cycle1q")
    table_line = synthesized_table(line)
    table_cycle = cycle_table if cycle_table is not None else synthesized_table(cyc)

    table_mismatches = []
    for line_outcome, cycle_outcome in CYCLE_LINE_FAMILY_MAP:
        for coin in sorted({c for _, c in table_line.rows}):
            ops_l = table_line.rows[(line_outcome, coin)]
            ops_c = table_cycle.rows[(cycle_outcome, coin)]
            if pauli_net_classes(ops_l, line.target_coins) != pauli_net_classes(
                ops_c, cyc.target_coins
            ):
                table_mismatches.append(
                    {
                        "line_outcome": line_outcome,
                        "cycle_outcome": cycle_outcome,
                        "coin": coin,
                        "line_pauli": [list(p) for p in ops_l],
                        "cycle_pauli": [list(p) for p in ops_c],
                    }
                )

    max_ds = 0.0
    state_mismatches = []
    spot_checks = []
    for index, payload in enumerate(payloads):
        line_state = run_walks(line, payload)
        cycle_state = run_walks(cyc, payload)
        delta = reduce_mod4(line_state, cyc.layout).max_delta(cycle_state)
        max_ds = max(max_ds, delta)
        if delta > tol:
            state_mismatches.append({"payload": index, "state_delta": delta})
        if index == 0:
            spot_checks.append(_origin_residual_spot_check(cyc, cycle_state, payload))
    report = {
        "claim": "cycle protocol equals line protocol reduced mod 4",
        "payloads": len(payloads),
        "max_state_delta": max_ds,
        "state_mismatches": state_mismatches,
        "table_mismatches": table_mismatches,
        "text_discrepancies": spot_checks,
        "ok": not state_mismatches
        and not table_mismatches
        and all(c["corrected_term_reproduced"] for c in spot_checks),
    }
    return report


def _origin_residual_spot_check(
    spec: ProtocolSpec, state: SparseState, payload: Payload
) -> dict:
    """The origin-position residual carries a1*b1 on coins 1010, not 1111.

    A reference transcription of this residual lists its last term on coin
    label 1111; the simulator shows that label is empty and the weight
    sits on 1010, which is also what the factorized product form requires.
    """
    family = next(f for f in spec.position_families if f.name == "00")
    (proj,) = position_projectors(family)
    _, residual = project(state, proj)
    printed = residual.amplitude((1, 1, 1, 1))
    corrected = residual.amplitude((1, 0, 1, 0))
    # The renormalized origin residual carries a_i * b_j directly.
    target = payload.alice[1] * payload.bob[1]
    return {
        "outcome": "00",
        "printed_term_label": [1, 1, 1, 1],
        "printed_term_reproduced": bool(abs(printed - target) < 1e-9),
        "corrected_term_label": [1, 0, 1, 0],
        "corrected_term_reproduced": bool(abs(corrected - target) < 1e-9),
    }
