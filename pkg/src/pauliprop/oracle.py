"""Independent ground truth: statevector simulation and exact diagonalization.

The statevector applies the same rotation matrices exp(-i theta/2 P) used by
the gate rules, in forward circuit order, so <psi|O|psi> matches the
propagated expectation exactly. Pauli-sum application is matrix-free bit
arithmetic on amplitudes (memory O(2^n) only); the dense Hamiltonian path is
built column-wise from the same action, checked Hermitian, and solved with a
full eigensolve. The large-n path hands a matrix-free matvec to ARPACK
(Lanczos) via scipy.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ConvergenceError, ValidationError
from .models import AnnniSpec, Circuit, PauliSum, annni_hamiltonian
from .pauli import PauliWord

DENSE_QUBIT_LIMIT = 12
MAX_QUBITS = 20
_NORM_TOL = 1e-10


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    for shift in (16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def _check_norm(state: np.ndarray) -> None:
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > _NORM_TOL:
        raise ConvergenceError(f"statevector norm drifted to {norm}")


def simulate(circuit: Circuit, theta) -> np.ndarray:
    """Apply the circuit to |0...0>; index bit q is qubit q."""
    n = circuit.n_qubits
    if n > MAX_QUBITS:
        raise ValidationError(f"statevector limited to {MAX_QUBITS} qubits")
    theta = np.asarray(theta, dtype=np.float64)
    if theta.size < circuit.n_params:
        raise ValidationError(
            f"theta has {theta.size} entries, circuit needs {circuit.n_params}"
        )
    state = np.zeros(2**n, dtype=np.complex128)
    state[0] = 1.0
    idx = np.arange(2**n)
    for gate in circuit.gates:
        if gate.is_rotation:
            q = gate.qubit
            bit = 1 << q
            i0 = idx[(idx & bit) == 0]
            i1 = i0 | bit
            a0 = state[i0]
            a1 = state[i1]
            half = theta[gate.param] / 2.0
            c, s = np.cos(half), np.sin(half)
            if gate.kind == "rx":
                state[i0] = c * a0 - 1j * s * a1
                state[i1] = c * a1 - 1j * s * a0
            elif gate.kind == "ry":
                state[i0] = c * a0 - s * a1
                state[i1] = c * a1 + s * a0
            else:  # rz
                state[i0] = (c - 1j * s) * a0
                state[i1] = (c + 1j * s) * a1
        else:
            cbit = 1 << gate.control
            tbit = 1 << gate.target
            i0 = idx[((idx & cbit) != 0) & ((idx & tbit) == 0)]
            i1 = i0 | tbit
            state[i0], state[i1] = state[i1].copy(), state[i0].copy()
        _check_norm(state)
    return state


def pauli_apply(word: PauliWord, state: np.ndarray) -> np.ndarray:
    """Matrix-free P|psi>: sign from Z bits, bit flips from X bits."""
    n = word.n_qubits
    idx = np.arange(state.size)
    phase = np.where(_parity(idx & word.z_mask) == 1, -1.0, 1.0).astype(np.complex128)
    n_y = (word.x_mask & word.z_mask).bit_count()
    phase *= 1j**n_y
    out = np.empty_like(state)
    out[idx ^ word.x_mask] = phase * state
    return out


def pauli_sum_apply(terms: PauliSum, state: np.ndarray) -> np.ndarray:
    out = np.zeros_like(state)
    for coeff, word in terms:
        out += coeff * pauli_apply(word, state)
    return out


def expectation(state: np.ndarray, terms: PauliSum) -> float:
    value = np.vdot(state, pauli_sum_apply(terms, state))
    return float(value.real)


def simulate_expectation(circuit: Circuit, theta, observable: PauliSum) -> float:
    """<0|U^dag O U|0> by full statevector simulation."""
    for _, word in observable:
        if word.n_qubits != circuit.n_qubits:
            raise ValidationError("observable and circuit qubit counts differ")
    return expectation(simulate(circuit, theta), observable)


def pauli_sum_dense(terms: PauliSum, n_qubits: int) -> np.ndarray:
    """Dense matrix of a Pauli sum, assembled column-wise from its action."""
    dim = 2**n_qubits
    idx = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, word in terms:
        if word.n_qubits != n_qubits:
            raise ValidationError("word qubit count mismatch in dense build")
        phase = np.where(_parity(idx & word.z_mask) == 1, -1.0, 1.0).astype(np.complex128)
        phase *= 1j ** (word.x_mask & word.z_mask).bit_count()
        mat[idx ^ word.x_mask, idx] += coeff * phase
    return mat


def ground_energy(
    spec: AnnniSpec, kappa: float, h: float, method: str = "auto"
) -> float:
    """Minimum eigenvalue of H(kappa, h).

    Dense full eigensolve up to 12 qubits; matrix-free Lanczos (ARPACK) up
    to 20. ``method`` forces "dense" or "lanczos" for cross-checks.
    """
    n = spec.n_spins
    terms = annni_hamiltonian(spec, kappa, h)
    if method == "auto":
        method = "dense" if n <= DENSE_QUBIT_LIMIT else "lanczos"
    if method == "dense":
        if n > DENSE_QUBIT_LIMIT:
            raise ValidationError(f"dense path limited to {DENSE_QUBIT_LIMIT} qubits")
        mat = pauli_sum_dense(terms, n)
        if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ConvergenceError("Hamiltonian matrix is not Hermitian")
        return float(np.linalg.eigvalsh(mat)[0])
    if method == "lanczos":
        if n > MAX_QUBITS:
            raise ValidationError(f"iterative path limited to {MAX_QUBITS} qubits")
        dim = 2**n
        op = spla.LinearOperator(
            (dim, dim),
            matvec=lambda v: pauli_sum_apply(terms, v.astype(np.complex128)),
            dtype=np.complex128,
        )
        try:
            vals = spla.eigsh(op, k=1, which="SA", tol=1e-10, maxiter=5000,
                              return_eigenvectors=False)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"Lanczos did not converge: {exc}") from None
        return float(vals[0])
    raise ValidationError(f"unknown method {method!r}")
