"""Closed-form Pauli expansions of single-site spin operators.

Keys are ``(s, encoding, component)``; values list ``(coefficient, string)``
with strings in the sparse text form (highest qubit first).  Repeated
strings are summed when the table is loaded.
"""

from math import sqrt

R8 = 1 / sqrt(8)
R = sqrt(1.5)
S5 = sqrt(5)

GOLDEN = {
    ("1", "std", "x"): [(R8, "X0"), (R8, "X1 X0"), (R8, "Y1 Y0"), (R8, "Z1 X0")],
    ("1", "std", "y"): [(R8, "Y0"), (-R8, "X1 Y0"), (R8, "Y1 X0"), (R8, "Z1 Y0")],
    ("1", "std", "z"): [(0.5, "Z1"), (0.5, "Z1 Z0")],
    ("3/2", "std", "x"): [(sqrt(3) / 2, "X0"), (0.5, "X1 X0"), (0.5, "Y1 Y0")],
    ("3/2", "std", "y"): [(sqrt(3) / 2, "Y0"), (-0.5, "X1 Y0"), (0.5, "Y1 X0")],
    ("3/2", "std", "z"): [(0.5, "Z0"), (1.0, "Z1")],
    ("2", "std", "x"): [
        ((1 + R) / 4, "X0"),
        (R / 4, "X1 X0"), (R / 4, "Y1 Y0"), (-R / 4, "Z1 X0"), (R / 4, "Z2 X0"),
        (0.25, "Z1 X0"), (0.25, "Z2 X0"),
        (0.25, "X2 X1 X0"), (-0.25, "X2 Y1 Y0"), (0.25, "Y2 X1 Y0"), (0.25, "Y2 Y1 X0"), (0.25, "Z2 Z1 X0"),
        (R / 4, "Z2 X1 X0"), (R / 4, "Z2 Y1 Y0"), (-R / 4, "Z2 Z1 X0"),
    ],
    ("2", "std", "y"): [
        ((1 + R) / 4, "Y0"),
        (R / 4, "Y1 X0"), (-R / 4, "X1 Y0"), (-R / 4, "Z1 Y0"), (R / 4, "Z2 Y0"),
        (0.25, "Z1 Y0"), (0.25, "Z2 Y0"),
        (0.25, "Y2 X1 X0"), (-0.25, "X2 X1 Y0"), (-0.25, "X2 Y1 X0"), (-0.25, "Y2 Y1 Y0"), (0.25, "Z2 Z1 Y0"),
        (R / 4, "Z2 Y1 X0"), (-R / 4, "Z2 X1 Y0"), (-R / 4, "Z2 Z1 Y0"),
    ],
    ("2", "std", "z"): [
        (0.25, "Z1"), (0.5, "Z2"), (-0.25, "Z1 Z0"), (0.5, "Z2 Z0"), (0.75, "Z2 Z1"), (0.25, "Z2 Z1 Z0"),
    ],
    ("5/2", "std", "x"): [
        ((3 + 2 * S5) / 8, "X0"),
        (R8, "X1 X0"), (R8, "Y1 Y0"),
        (3 / 8, "Z2 X0"), (-3 / 8, "Z1 X0"), (S5 / 4, "Z1 X0"),
        (R8, "X2 X1 X0"), (-R8, "X2 Y1 Y0"), (R8, "Y2 X1 Y0"), (R8, "Y2 Y1 X0"), (R8, "Z2 X1 X0"), (R8, "Z2 Y1 Y0"),
        (-3 / 8, "Z2 Z1 X0"),
    ],
    ("5/2", "std", "y"): [
        ((3 + 2 * S5) / 8, "Y0"),
        (R8, "Y1 X0"), (-R8, "X1 Y0"),
        (3 / 8, "Z2 Y0"), (-3 / 8, "Z1 Y0"), (S5 / 4, "Z1 Y0"),
        (-R8, "Y2 Y1 Y0"), (R8, "Y2 X1 X0"), (-R8, "X2 Y1 X0"), (-R8, "X2 X1 Y0"), (R8, "Z2 Y1 X0"), (-R8, "Z2 X1 Y0"),
        (-3 / 8, "Z2 Z1 Y0"),
    ],
    ("5/2", "std", "z"): [
        (3 / 8, "Z0"), (1.0, "Z2"), (1 / 8, "Z2 Z0"), (1 / 8, "Z1 Z0"), (1.0, "Z2 Z1"), (-1 / 8, "Z2 Z1 Z0"),
    ],
    ("1", "gray", "x"): [(R8, "X0"), (R8, "X1"), (-R8, "X1 Z0"), (R8, "Z1 X0")],
    ("1", "gray", "y"): [(R8, "Y0"), (R8, "Y1"), (-R8, "Y1 Z0"), (R8, "Z1 Y0")],
    ("1", "gray", "z"): [(0.5, "Z0"), (0.5, "Z1")],
    ("3/2", "gray", "x"): [(sqrt(3) / 2, "X0"), (0.5, "X1"), (-0.5, "X1 Z0")],
    ("3/2", "gray", "y"): [(0.5, "Y1"), (-0.5, "Y1 Z0"), (sqrt(3) / 2, "Z1 Y0")],
    ("3/2", "gray", "z"): [(1.0, "Z1"), (0.5, "Z1 Z0")],
    ("2", "gray", "x"): [
        ((1 + R) / 4, "X0"), (R / 4, "X1"), (0.25, "X2"),
        (R / 4, "Z2 X0"), (R / 4, "Z2 X1"), (-R / 4, "X1 Z0"), (-R / 4, "Z1 X0"),
        (0.25, "X2 Z0"), (0.25, "Z1 X0"), (-0.25, "X2 Z1"), (0.25, "Z2 X0"),
        (-R / 4, "Z2 X1 Z0"), (-R / 4, "Z2 Z1 X0"),
        (0.25, "Z2 Z1 X0"), (-0.25, "X2 Z1 Z0"),
    ],
    ("2", "gray", "y"): [
        ((1 - R) / 4, "Y0"), (R / 4, "Y1"), (0.25, "Y2"),
        (R / 4, "Z1 Y0"), (-R / 4, "Y1 Z0"), (-R / 4, "Z2 Y0"), (R / 4, "Z2 Y1"),
        (0.25, "Y2 Z0"), (0.25, "Z1 Y0"), (-0.25, "Y2 Z1"), (0.25, "Z2 Y0"),
        (R / 4, "Z2 Z1 Y0"), (-R / 4, "Z2 Y1 Z0"),
        (0.25, "Z2 Z1 Y0"), (-0.25, "Y2 Z1 Z0"),
    ],
    ("2", "gray", "z"): [
        (-0.25, "Z0"), (0.75, "Z1"), (0.5, "Z2"), (0.5, "Z1 Z0"), (0.25, "Z2 Z0"), (0.25, "Z2 Z1"),
    ],
    ("5/2", "gray", "x"): [
        ((2 * S5 + 3) / 8, "X0"), (R8, "X1"), (R8, "X2"),
        (R8, "Z2 X1"), (-R8, "X1 Z0"), (-R8, "X2 Z1"), (R8, "X2 Z0"),
        (3 / 8, "Z2 X0"), (-3 / 8, "Z1 X0"),
        ((2 * S5 - 3) / 8, "Z2 Z1 X0"),
        (-R8, "Z2 X1 Z0"), (-R8, "X2 Z1 Z0"),
    ],
    ("5/2", "gray", "y"): [
        ((2 * S5 - 3) / 8, "Y0"), (R8, "Y1"), (R8, "Y2"),
        (R8, "Z2 Y1"), (-R8, "Y1 Z0"), (-R8, "Y2 Z1"), (R8, "Y2 Z0"),
        (-3 / 8, "Z2 Y0"), (3 / 8, "Z1 Y0"),
        ((2 * S5 + 3) / 8, "Z2 Z1 Y0"),
        (-R8, "Z2 Y1 Z0"), (-R8, "Y2 Z1 Z0"),
    ],
    ("5/2", "gray", "z"): [
        (1 / 8, "Z0"), (1.0, "Z1"), (1.0, "Z2"), (1 / 8, "Z1 Z0"), (-1 / 8, "Z2 Z0"), (3 / 8, "Z2 Z1 Z0"),
    ],
}

# The commonly printed s = 2 Gray-code S^y carries Z2 Y0 where Z1 Y0 belongs
# (the two cancel in print).  The literal form is kept to show it fails the
# spin algebra; GOLDEN above holds the corrected term.
PRINTED_S2_GRAY_Y = [
    (t if t != (R / 4, "Z1 Y0") else (R / 4, "Z2 Y0")) for t in GOLDEN[("2", "gray", "y")]
]

# level -> bitstring for s = 5/2
CODE_TABLE = {
    "std": {0: "000", 1: "001", 2: "010", 3: "011", 4: "100", 5: "101"},
    "gray": {0: "000", 1: "001", 2: "011", 3: "010", 4: "110", 5: "111"},
}
