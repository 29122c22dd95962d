"""Ansatz builders and the ANNNI spin chain with its observable split.

The energy combination follows the dense-matrix construction of the
Hamiltonian

    H(kappa, h) = -J sum_i ( X_i X_{i+1} - kappa X_i X_{i+2} + h Z_i )

with J = 1, i.e. ``E = -<O1> + kappa <O2> - h <O3>`` for
O1 = sum X_i X_{i+1}, O2 = sum X_i X_{i+2}, O3 = sum Z_i. The sign of the
kappa and h pieces is unit-tested against the dense matrix rather than
chosen by hand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError
from .gates import Gate
from .pauli import PauliWord

PauliSum = list[tuple[float, PauliWord]]


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a contiguous parameter space."""

    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("circuit needs at least one qubit")
        params = set()
        for gate in self.gates:
            if gate.max_qubit() >= self.n_qubits:
                raise ValidationError(f"gate {gate} out of range for n={self.n_qubits}")
            if gate.is_rotation:
                params.add(gate.param)
        if params and params != set(range(max(params) + 1)):
            raise ValidationError("param ids must form a contiguous range starting at 0")
        object.__setattr__(self, "_n_params", len(params) and max(params) + 1)

    @property
    def n_params(self) -> int:
        return self._n_params

    # -- circuit JSON (see the CLI CircuitFile schema) ---------------------

    def to_json(self) -> dict:
        gates = []
        for g in self.gates:
            if g.is_rotation:
                gates.append({"type": g.kind, "qubit": g.qubit, "param": g.param})
            else:
                gates.append({"type": "cnot", "control": g.control, "target": g.target})
        return {"n_qubits": self.n_qubits, "n_params": self.n_params, "gates": gates}

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, data: dict) -> "Circuit":
        for fld in ("n_qubits", "gates"):
            if fld not in data:
                raise ValidationError(f"circuit JSON missing field {fld!r}")
        gates = []
        for i, rec in enumerate(data["gates"]):
            kind = rec.get("type")
            if kind in ("rx", "ry", "rz"):
                gates.append(Gate(kind, qubit=rec.get("qubit"), param=rec.get("param")))
            elif kind == "cnot":
                gates.append(Gate.cnot(rec.get("control"), rec.get("target")))
            else:
                raise ValidationError(f"gate {i}: unknown gate type {kind!r}")
        circuit = cls(data["n_qubits"], tuple(gates))
        if "n_params" in data and data["n_params"] != circuit.n_params:
            raise ValidationError(
                f"circuit JSON declares n_params={data['n_params']} "
                f"but gates use {circuit.n_params}"
            )
        return circuit

    @classmethod
    def read_json(cls, path) -> "Circuit":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"malformed circuit JSON: {exc}") from None
        return cls.from_json(data)


def local_entangler(n_qubits: int, depth: int) -> Circuit:
    """Local entangler ansatz.

    Initial RY layer on all qubits, then per repetition: CNOT ladder on
    (0,1),(2,3),..., RX layer, CNOT ladder on (1,2),(3,4),..., RY layer.
    Parameter ids are assigned in gate order; odd n leaves a trailing
    unpaired qubit in each ladder. Parameter count is n * (2 * depth + 1).
    """
    if n_qubits < 2:
        raise ValidationError("local entangler needs n_qubits >= 2")
    if depth < 1:
        raise ValidationError("local entangler needs depth >= 1")
    gates: list[Gate] = []
    param = 0

    def layer(kind: str):
        nonlocal param
        for q in range(n_qubits):
            gates.append(Gate(kind, qubit=q, param=param))
            param += 1

    layer("ry")
    for _ in range(depth):
        for q in range(0, n_qubits - 1, 2):
            gates.append(Gate.cnot(q, q + 1))
        layer("rx")
        for q in range(1, n_qubits - 1, 2):
            gates.append(Gate.cnot(q, q + 1))
        layer("ry")
    return Circuit(n_qubits, tuple(gates))


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class AnnniSpec:
    """Axial next-nearest-neighbor Ising chain (J fixed to 1)."""

    n_spins: int
    boundary: Boundary = Boundary.OPEN
    j: float = 1.0

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValidationError("need at least one spin")


def _xx_words(n: int, offset: int, boundary: Boundary) -> list[PauliWord]:
    words = []
    for i in range(n):
        k = i + offset
        if k >= n:
            if boundary is Boundary.OPEN:
                continue
            k %= n
        x = (1 << i) | (1 << k)
        words.append(PauliWord(n, x, 0))
    return words


def annni_observables(spec: AnnniSpec) -> dict[str, PauliSum]:
    """The three Pauli sums that only need to be propagated once.

    o1 = sum X_i X_{i+1}, o2 = sum X_i X_{i+2}, o3 = sum Z_i. OPEN boundary
    truncates out-of-range indices, PERIODIC wraps them.
    """
    n = spec.n_spins
    o1 = [(1, w) for w in _xx_words(n, 1, spec.boundary)]
    o2 = [(1, w) for w in _xx_words(n, 2, spec.boundary)]
    o3 = [(1, PauliWord.single(n, i, "Z")) for i in range(n)]
    return {"o1": o1, "o2": o2, "o3": o3}


def combine_energy(e1: float, e2: float, e3: float, kappa: float, h: float) -> float:
    """Energy from the three component expectations (sign fixed by the dense matrix)."""
    return -e1 + kappa * e2 - h * e3


def annni_hamiltonian(spec: AnnniSpec, kappa: float, h: float) -> PauliSum:
    """Weighted Pauli list of H(kappa, h), matching combine_energy."""
    obs = annni_observables(spec)
    terms: PauliSum = []
    terms += [(-spec.j * c, w) for c, w in obs["o1"]]
    terms += [(spec.j * kappa * c, w) for c, w in obs["o2"]]
    terms += [(-spec.j * h * c, w) for c, w in obs["o3"]]
    return terms
