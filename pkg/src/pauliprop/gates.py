"""Conjugation rules mapping (gate, Pauli word) to one or two signed terms.

Convention
----------
All rules compute ``G^dag P G`` with ``G = exp(-i * theta/2 * axis)`` for the
rotation gates and the standard CNOT matrix. A circuit unitary
``U = g_m ... g_1`` therefore propagates an observable as
``U^dag O U = g_1^dag ( ... (g_m^dag O g_m) ... ) g_1``, i.e. gates are
processed in *reverse* circuit order. This convention is fixed by requiring
that ``validate_rules_against_matrices`` and the end-to-end depth-1 golden
example both pass; the statevector simulator uses the same rotation matrices
applied in forward order, so expectation values agree.

Single-qubit rules (q carries the affected letter, all other qubits pass
through unchanged):

    RX: I -> I, X -> X, Y -> cos Y - sin Z, Z -> cos Z + sin Y
    RY: I -> I, Y -> Y, X -> cos X + sin Z, Z -> cos Z - sin X
    RZ: I -> I, Z -> Z, X -> cos X - sin Y, Y -> cos Y + sin X

CNOT conjugation is a signed permutation of the 16 two-letter cases; in
symplectic form it toggles the target X bit by the control X bit and the
control Z bit by the target Z bit, picking up a -1 sign exactly for the
X(x)Z <-> -Y(x)Y pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .pauli import PauliWord, TrigKind

_AXIS_BITS = {"x": (1, 0), "y": (1, 1), "z": (0, 1)}

# Sign of the sin branch, keyed by (axis, (x_bit, z_bit) of the input letter).
_SIN_SIGN = {
    ("x", (1, 1)): -1,  # Y -> -sin Z
    ("x", (0, 1)): +1,  # Z -> +sin Y
    ("y", (1, 0)): +1,  # X -> +sin Z
    ("y", (0, 1)): -1,  # Z -> -sin X
    ("z", (1, 0)): -1,  # X -> -sin Y
    ("z", (1, 1)): +1,  # Y -> +sin X
}


@dataclass(frozen=True)
class Gate:
    """A circuit gate: a parameterized rotation or a CNOT."""

    kind: str  # "rx" | "ry" | "rz" | "cnot"
    qubit: int | None = None
    param: int | None = None
    control: int | None = None
    target: int | None = None

    def __post_init__(self):
        if self.kind in ("rx", "ry", "rz"):
            if self.qubit is None or self.qubit < 0:
                raise ValidationError(f"rotation gate needs a qubit index, got {self.qubit!r}")
            if self.param is None or self.param < 0:
                raise ValidationError(f"rotation gate needs a param index, got {self.param!r}")
        elif self.kind == "cnot":
            if self.control is None or self.target is None:
                raise ValidationError("cnot gate needs control and target")
            if self.control < 0 or self.target < 0:
                raise ValidationError("cnot indices must be non-negative")
            if self.control == self.target:
                raise ValidationError("cnot control and target must differ")
        else:
            raise ValidationError(f"unknown gate kind {self.kind!r}")

    @classmethod
    def rx(cls, qubit: int, param: int) -> "Gate":
        return cls("rx", qubit=qubit, param=param)

    @classmethod
    def ry(cls, qubit: int, param: int) -> "Gate":
        return cls("ry", qubit=qubit, param=param)

    @classmethod
    def rz(cls, qubit: int, param: int) -> "Gate":
        return cls("rz", qubit=qubit, param=param)

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls("cnot", control=control, target=target)

    @property
    def is_rotation(self) -> bool:
        return self.kind != "cnot"

    @property
    def axis(self) -> str:
        if not self.is_rotation:
            raise ValidationError("cnot has no rotation axis")
        return self.kind[1]

    def max_qubit(self) -> int:
        if self.is_rotation:
            return self.qubit
        return max(self.control, self.target)


class Branch(NamedTuple):
    """One output term of a conjugation: word, optional trig factor, sign."""

    word: PauliWord
    factor: tuple[int, TrigKind] | None
    sign: int


def _cnot_images(x: int, z: int, control: int, target: int) -> tuple[int, int, int]:
    """Symplectic CNOT update; returns (x', z', sign)."""
    xc = (x >> control) & 1
    zt = (z >> target) & 1
    if not (xc or zt):
        return x, z, 1
    new_x = x ^ (xc << target)
    new_z = z ^ (zt << control)
    xt = (x >> target) & 1
    zc = (z >> control) & 1
    sign = -1 if (xc & zt & (xt ^ zc ^ 1)) else 1
    return new_x, new_z, sign


def conjugate(gate: Gate, word: PauliWord) -> tuple[Branch, ...]:
    """Conjugate one Pauli word by one gate.

    Rotations return one branch (commuting letter) or two branches each
    carrying a single trig factor; CNOT returns exactly one signed branch.
    """
    n = word.n_qubits
    if gate.max_qubit() >= n:
        raise ValidationError(f"gate {gate} out of range for {n} qubits")
    if gate.kind == "cnot":
        x, z, sign = _cnot_images(word.x_mask, word.z_mask, gate.control, gate.target)
        return (Branch(PauliWord(n, x, z), None, sign),)

    q = gate.qubit
    ax, az = _AXIS_BITS[gate.axis]
    xb = (word.x_mask >> q) & 1
    zb = (word.z_mask >> q) & 1
    if (xb | zb) == 0 or (xb, zb) == (ax, az):
        return (Branch(word, None, 1),)
    flipped = PauliWord(n, word.x_mask ^ (ax << q), word.z_mask ^ (az << q))
    sign = _SIN_SIGN[(gate.axis, (xb, zb))]
    return (
        Branch(word, (gate.param, TrigKind.COS), 1),
        Branch(flipped, (gate.param, TrigKind.SIN), sign),
    )


# -- numerical rule validation ---------------------------------------------

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_CNOT_MAT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    a = _PAULI_MATS[axis.upper()]
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * a


def word_matrix(word: PauliWord) -> np.ndarray:
    """Dense matrix of a word; qubit 0 is the leftmost kron factor."""
    mat = np.array([[1.0 + 0j]])
    for q in range(word.n_qubits):
        mat = np.kron(mat, _PAULI_MATS[word.letter(q)])
    return mat


@dataclass
class ValidationReport:
    cases_checked: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def _branch_value(branches, theta_by_param, n) -> np.ndarray:
    total = np.zeros((2**n, 2**n), dtype=complex)
    for word, factor, sign in branches:
        value = float(sign)
        if factor is not None:
            pid, kind = factor
            theta = theta_by_param[pid]
            value *= np.cos(theta) if kind == TrigKind.COS else np.sin(theta)
        total += value * word_matrix(word)
    return total


def validate_rules_against_matrices(n_angles: int = 20, seed: int = 7, atol: float = 1e-12) -> ValidationReport:
    """Check every rule against explicit matrix conjugation.

    For each gate variant and every 1- or 2-letter input word, numerically
    computes ``G^dag P G`` at random angles and compares it with the symbolic
    branch expansion. Failures are reported, not raised.
    """
    rng = np.random.default_rng(seed)
    failures: list[str] = []
    checked = 0

    letters = "IXYZ"
    angles = rng.uniform(0.0, 2 * np.pi, size=n_angles)
    for axis in "xyz":
        gate = Gate("r" + axis, qubit=0, param=0)
        for letter in letters:
            word = PauliWord.from_string(letter)
            branches = conjugate(gate, word)
            for theta in angles:
                g = rotation_matrix(axis, theta)
                numeric = g.conj().T @ _PAULI_MATS[letter] @ g
                symbolic = _branch_value(branches, {0: theta}, 1)
                checked += 1
                if np.max(np.abs(numeric - symbolic)) > atol:
                    failures.append(f"r{axis} on {letter} at theta={theta:.6f}")
                    break

    gate = Gate.cnot(0, 1)
    for a in letters:
        for b in letters:
            word = PauliWord.from_string(a + b)
            branches = conjugate(gate, word)
            numeric = _CNOT_MAT.conj().T @ word_matrix(word) @ _CNOT_MAT
            symbolic = _branch_value(branches, {}, 2)
            checked += 1
            if np.max(np.abs(numeric - symbolic)) > atol:
                failures.append(f"cnot on {a}{b}")

    return ValidationReport(cases_checked=checked, failures=failures)
