"""Frozen intermediate-state term tables for the single-qubit walk chains.

Each entry is (label, i, j): the basis label and which payload product
a_i * b_j the coefficient carries.  Prefactors are per stage: 1 after the
first two steps, 1/sqrt(2) after the third, 1/2 after the fourth.
"""

import math

# line protocol, after step 1 (4 terms)
LINE_STAGE1 = [
    ((1, 0, 0, 0, 0, 0), 0, 0),
    ((1, 0, 0, 0, 1, 0), 0, 1),
    ((-1, 0, 1, 0, 0, 0), 1, 0),
    ((-1, 0, 1, 0, 1, 0), 1, 1),
]

# after step 2 (4 terms)
LINE_STAGE2 = [
    ((1, 1, 0, 0, 0, 0), 0, 0),
    ((1, -1, 0, 0, 1, 0), 0, 1),
    ((-1, 1, 1, 0, 0, 0), 1, 0),
    ((-1, -1, 1, 0, 1, 0), 1, 1),
]

# after step 3 (8 terms, prefactor 1/sqrt(2))
LINE_STAGE3 = [
    ((1, 2, 0, 0, 0, 0), 0, 0),
    ((1, 0, 0, 1, 0, 0), 0, 0),
    ((1, 0, 0, 0, 1, 0), 0, 1),
    ((1, -2, 0, 1, 1, 0), 0, 1),
    ((-1, 2, 1, 0, 0, 0), 1, 0),
    ((-1, 0, 1, 1, 0, 0), 1, 0),
    ((-1, 0, 1, 0, 1, 0), 1, 1),
    ((-1, -2, 1, 1, 1, 0), 1, 1),
]

# after step 4 (16 terms, prefactor 1/2)
LINE_STAGE4 = [
    ((2, 2, 0, 0, 0, 0), 0, 0),
    ((0, 2, 0, 0, 0, 1), 0, 0),
    ((2, 0, 0, 1, 0, 0), 0, 0),
    ((0, 0, 0, 1, 0, 1), 0, 0),
    ((2, 0, 0, 0, 1, 0), 0, 1),
    ((0, 0, 0, 0, 1, 1), 0, 1),
    ((2, -2, 0, 1, 1, 0), 0, 1),
    ((0, -2, 0, 1, 1, 1), 0, 1),
    ((0, 2, 1, 0, 0, 0), 1, 0),
    ((-2, 2, 1, 0, 0, 1), 1, 0),
    ((0, 0, 1, 1, 0, 0), 1, 0),
    ((-2, 0, 1, 1, 0, 1), 1, 0),
    ((0, 0, 1, 0, 1, 0), 1, 1),
    ((-2, 0, 1, 0, 1, 1), 1, 1),
    ((0, -2, 1, 1, 1, 0), 1, 1),
    ((-2, -2, 1, 1, 1, 1), 1, 1),
]

# cycle protocol, final state (16 terms, prefactor 1/2): the line terms
# with positions reduced mod 4.
CYCLE_FINAL = [
    (tuple(v % 4 if k < 2 else v for k, v in enumerate(label)), i, j)
    for label, i, j in LINE_STAGE4
]

# two-step protocol with both payloads (1,0,0,0): the surviving block of
# the final state (16 terms, prefactor 1/4), layout
# (a_pos, b_pos, a_in0, a_in1, a_out0, a_out1, b_in0, b_in1, b_out0, b_out1).
TWOSTEP_BASIS_BLOCK = [
    (4, 4, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 4, 0, 0, 0, 0, 0, 0, 0, 1),
    (1, 4, 0, 0, 0, 0, 0, 0, 1, 0),
    (0, 4, 0, 0, 0, 0, 0, 0, 1, 1),
    (4, 3, 0, 0, 0, 1, 0, 0, 0, 0),
    (3, 3, 0, 0, 0, 1, 0, 0, 0, 1),
    (1, 3, 0, 0, 0, 1, 0, 0, 1, 0),
    (0, 3, 0, 0, 0, 1, 0, 0, 1, 1),
    (4, 1, 0, 0, 1, 0, 0, 0, 0, 0),
    (3, 1, 0, 0, 1, 0, 0, 0, 0, 1),
    (1, 1, 0, 0, 1, 0, 0, 0, 1, 0),
    (0, 1, 0, 0, 1, 0, 0, 0, 1, 1),
    (4, 0, 0, 0, 1, 1, 0, 0, 0, 0),
    (3, 0, 0, 0, 1, 1, 0, 0, 0, 1),
    (1, 0, 0, 0, 1, 1, 0, 0, 1, 0),
    (0, 0, 0, 0, 1, 1, 0, 0, 1, 1),
]

STAGE_PREFACTORS = (1.0, 1.0, 1.0 / math.sqrt(2.0), 0.5)


def expected_state(terms, payload, prefactor):
    """Expected amplitude map from a term table and a payload."""
    return {
        label: prefactor * payload.alice[i] * payload.bob[j]
        for label, i, j in terms
    }
