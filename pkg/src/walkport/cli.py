"""Batch command-line interface.

Verbs: ``run`` enumerates and verifies every measurement branch of one
protocol, ``equiv`` runs the cross-protocol equivalence checks, ``tables``
emits synthesized correction tables next to the bundled reference ones
with disagreements flagged, and ``oracle-check`` cross-validates the
sparse engine against the dense-matrix path.

Exit status: 0 on verified success, 1 on verification failure, 2 on a
configuration error.  Reports are JSON with a top-level ``schema`` field
and are byte-identical for identical configurations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import equivalence, measure, oracle
from .errors import WalkportError
from .protocols import (
    DEFAULT_BOUND,
    PROTOCOL_IDS,
    Payload,
    get_protocol,
    run_walks,
    seeded_payloads,
)

SCHEMA = 1
DEFAULT_TOL = 1e-9
SEED_ENV = "WALKPORT_SEED"

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


def parse_amplitudes(text: str) -> np.ndarray:
    """Comma-separated amplitudes, each ``re`` or ``re:im``."""
    values = []
    for token in text.split(","):
        token = token.strip()
        try:
            if ":" in token:
                re_part, im_part = token.split(":", 1)
                values.append(complex(float(re_part), float(im_part)))
            else:
                values.append(complex(float(token), 0.0))
        except ValueError:
            raise ConfigError(f"cannot parse amplitude {token!r}") from None
    return np.array(values, dtype=complex)


def dyadic(p: float, tol: float = 1e-9, max_power: int = 20) -> str | None:
    """Nearest small dyadic rational as a string, if one is within tol."""
    for power in range(max_power + 1):
        denom = 1 << power
        num = round(p * denom)
        if abs(p - num / denom) <= tol:
            return str(Fraction(num, denom))
    return None


def explicit_payload(args, qubits: int) -> tuple[Payload, list[str]]:
    warnings = []
    vectors = {}
    for name in ("alice", "bob"):
        vec = parse_amplitudes(getattr(args, name))
        if len(vec) != 2**qubits:
            raise ConfigError(
                f"--{name} needs {2 ** qubits} amplitudes for this protocol"
            )
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-8:
            raise ConfigError(f"--{name} has norm {norm!r}, not within 1e-8 of 1")
        if abs(norm - 1.0) > 1e-10:
            warnings.append(f"{name} payload renormalized from norm {norm!r}")
            vec = vec / norm
        vectors[name] = vec
    return Payload(vectors["alice"], vectors["bob"]), warnings


def resolve_payloads(args, qubits: int) -> tuple[list[Payload], dict, list[str]]:
    if (args.alice is None) != (args.bob is None):
        raise ConfigError("--alice and --bob must be given together")
    if args.alice is not None:
        payload, warnings = explicit_payload(args, qubits)
        return [payload], {"source": "explicit"}, warnings
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from None
    if seed is None:
        seed = 0
    count = args.count if args.count is not None else 1
    if count < 1:
        raise ConfigError("--count must be positive")
    return (
        seeded_payloads(seed, count, qubits),
        {"source": "seeded", "seed": seed, "count": count},
        [],
    )


def payload_descriptor(payload: Payload) -> dict:
    return {
        "alice": [[z.real, z.imag] for z in payload.alice],
        "bob": [[z.real, z.imag] for z in payload.bob],
    }


def emit(report: dict, args) -> None:
    if getattr(args, "format", "json") == "table-text":
        text = render_text(report)
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def render_text(report: dict, indent: str = "") -> str:
    lines = []
    for key, value in sorted(report.items()):
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(render_text(value, indent + "  "))
        elif isinstance(value, list):
            lines.append(f"{indent}{key}: [{len(value)} entries]")
            for item in value[:50]:
                lines.append(f"{indent}  {json.dumps(item, sort_keys=True)}")
        else:
            lines.append(f"{indent}{key}: {value}")
    return "\n".join(line for line in lines if line) + ("\n" if not indent else "")


def protocol_table(args, spec):
    table = measure.synthesized_table(spec)
    if getattr(args, "corrupt_table", None):
        table = measure.corrupt_table(table, args.corrupt_table, spec.target_coins)
    return table


def cmd_run(args) -> int:
    spec = get_protocol(args.protocol, bound=args.bound)
    payloads, source, warnings = resolve_payloads(args, spec.qubits)
    table = protocol_table(args, spec)
    tol = args.tol
    payload_reports = []
    ok = True
    for index, payload in enumerate(payloads):
        branches = measure.enumerate_branches(spec, payload, table)
        prob_sum = sum(b.probability for b in branches)
        fid_ok = all(b.vacuous or b.fidelity >= 1.0 - tol for b in branches)
        sum_ok = abs(prob_sum - 1.0) <= tol
        ok = ok and fid_ok and sum_ok
        payload_reports.append(
            {
                "payload": index,
                "probability_sum": prob_sum,
                "fidelities_ok": fid_ok,
                "branches": [
                    {
                        "position": b.position,
                        "coin": b.coin,
                        "probability": b.probability,
                        "probability_dyadic": dyadic(b.probability),
                        "fidelity": b.fidelity,
                        "vacuous": b.vacuous,
                    }
                    for b in branches
                ],
            }
        )
    report = {
        "schema": SCHEMA,
        "command": "run",
        "protocol": spec.id,
        "payload_source": source,
        "payload_values": [payload_descriptor(p) for p in payloads]
        if source["source"] == "explicit"
        else None,
        "tolerance": tol,
        "bound": args.bound,
        "warnings": warnings,
        "corrupted_family": getattr(args, "corrupt_table", None),
        "payloads": payload_reports,
        "ok": ok,
    }
    emit(report, args)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_equiv(args) -> int:
    seed = args.seed if args.seed is not None else 0
    if args.claim == "two-qubit":
        count = args.count if args.count is not None else 25
        payloads = seeded_payloads(seed, count, 2)
        corrupted = None
        kwargs = {}
        if args.corrupt_table:
            family = args.corrupt_table
            if family.startswith("Q"):
                spec = get_protocol("twostep2q")
                kwargs["twostep_table"] = measure.corrupt_table(
                    measure.synthesized_table(spec), family, spec.target_coins
                )
            else:
                spec = get_protocol("single2q")
                kwargs["single_table"] = measure.corrupt_table(
                    measure.synthesized_table(spec), family, spec.target_coins
                )
            corrupted = family
        core = equivalence.check_two_qubit_equivalence(payloads, **kwargs)
    elif args.claim == "cycle-line":
        count = args.count if args.count is not None else 25
        payloads = seeded_payloads(seed, count, 1)
        corrupted = None
        kwargs = {}
        if args.corrupt_table:
            spec = get_protocol("cycle1q")
            kwargs["cycle_table"] = measure.corrupt_table(
                measure.synthesized_table(spec), args.corrupt_table, spec.target_coins
            )
            corrupted = args.corrupt_table
        core = equivalence.check_cycle_line_equivalence(payloads, **kwargs)
    else:
        raise ConfigError(f"unknown claim {args.claim!r}")
    report = {
        "schema": SCHEMA,
        "command": "equiv",
        "claim": args.claim,
        "seed": seed,
        "count": len(payloads),
        "corrupted_family": corrupted,
        **core,
    }
    emit(report, args)
    return EXIT_OK if core["ok"] else EXIT_VERIFY


def parse_family_selection(text: str, available: list[str]) -> list[str]:
    """Family selections like 'P3', 'P1..P15', or 'P1,P4'."""
    names: list[str] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            if lo not in available or hi not in available:
                raise ConfigError(f"unknown family range {part!r}")
            i, j = available.index(lo), available.index(hi)
            if i > j:
                raise ConfigError(f"empty family range {part!r}")
            names.extend(available[i : j + 1])
        elif part:
            if part not in available:
                raise ConfigError(f"unknown family {part!r}")
            names.append(part)
    if not names:
        raise ConfigError(f"no families selected by {text!r}")
    return names


def cmd_tables(args) -> int:
    spec = get_protocol(args.protocol, bound=args.bound)
    available = [f.name for f in spec.position_families]
    selected = (
        parse_family_selection(args.families, available) if args.families else available
    )
    synth = measure.synthesized_table(spec)
    reference = measure.bundled_table(spec.id)
    comparison = measure.compare_tables(spec, reference)
    family_tables = {}
    for name in selected:
        family = next(f for f in spec.position_families if f.name == name)
        keys = [k for k in sorted(synth.rows) if k[0] == name or k[0].startswith(name + ":")]
        family_tables[name] = measure.CorrectionTable(
            spec.id, {k: synth.rows[k] for k in keys}
        ).to_json_dict()
    report = {
        "schema": SCHEMA,
        "command": "tables",
        "protocol": spec.id,
        "families": selected,
        "synthesized": family_tables,
        "reference": reference.to_json_dict(),
        "comparison": comparison,
        "ok": True,
    }
    out = getattr(args, "out", None)
    if out and Path(out).is_dir():
        base = Path(out)
        for name, data in family_tables.items():
            path = base / f"{spec.id}_{name}.json"
            path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        summary = dict(report)
        summary["synthesized"] = sorted(family_tables)
        (base / f"{spec.id}_tables_report.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n"
        )
    else:
        emit(report, args)
    return EXIT_OK


ORACLE_TOL = 1e-10


def cmd_oracle_check(args) -> int:
    ids = PROTOCOL_IDS if args.protocol in (None, "all") else (args.protocol,)
    seed = args.seed if args.seed is not None else 0
    count = args.count if args.count is not None else 5
    checks = []
    ok = True
    for pid in ids:
        spec = get_protocol(pid)
        ospec = oracle.oracle_spec(pid)
        defects = [
            oracle.unitarity_defect(oracle.cached_step_matrix(ospec, k))
            for k in range(4)
        ]
        max_delta = 0.0
        for payload in seeded_payloads(seed, count, spec.qubits):
            dense = oracle.dense_run(ospec, payload)
            sparse = run_walks(spec, payload)
            keys = set(dense.amps) | set(sparse.amps)
            delta = max(
                (abs(dense.amplitude(k) - sparse.amplitude(k)) for k in keys),
                default=0.0,
            )
            max_delta = max(max_delta, delta)
        protocol_ok = max(defects) < ORACLE_TOL and max_delta < ORACLE_TOL
        ok = ok and protocol_ok
        checks.append(
            {
                "protocol": pid,
                "unitarity_defects": defects,
                "max_state_delta": max_delta,
                "payloads": count,
                "ok": protocol_ok,
            }
        )
    report = {
        "schema": SCHEMA,
        "command": "oracle-check",
        "seed": seed,
        "tolerance": ORACLE_TOL,
        "checks": checks,
        "ok": ok,
    }
    emit(report, args)
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walkport",
        description="Simulate and verify bidirectional quantum-walk teleportation protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, protocol: bool = True):
        if protocol:
            p.add_argument("protocol", nargs="?", choices=PROTOCOL_IDS)
            p.add_argument("--protocol", dest="protocol_flag", choices=PROTOCOL_IDS)
        p.add_argument("--seed", type=int)
        p.add_argument("--count", type=int)
        p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "table-text"), default="json")

    p_run = sub.add_parser("run", help="enumerate and verify every branch")
    common(p_run)
    p_run.add_argument("--alice", help="payload amplitudes, e.g. '1,0' or '0.6:0,0:0.8'")
    p_run.add_argument("--bob")
    p_run.add_argument("--corrupt-table", help="family name to corrupt (failure injection)")
    p_run.set_defaults(func=cmd_run)

    p_equiv = sub.add_parser("equiv", help="run a cross-protocol equivalence check")
    p_equiv.add_argument("claim", choices=("two-qubit", "cycle-line"))
    common(p_equiv, protocol=False)
    p_equiv.add_argument("--corrupt-table")
    p_equiv.set_defaults(func=cmd_equiv)

    p_tables = sub.add_parser("tables", help="emit synthesized and reference tables")
    common(p_tables)
    p_tables.add_argument("--families", help="e.g. 'P3', 'P1..P15', 'Q2,Q5'")
    p_tables.set_defaults(func=cmd_tables)

    p_oracle = sub.add_parser("oracle-check", help="cross-validate against the dense oracle")
    common(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "protocol_flag", None):
        args.protocol = args.protocol_flag
    if args.command in ("run", "tables") and not args.protocol:
        parser.error(f"{args.command} needs a protocol")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WalkportError as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
