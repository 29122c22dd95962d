"""Symbolic Pauli propagation with joint weight/frequency truncation."""

from .errors import ConvergenceError, PauliPropError, TermExplosionError, ValidationError
from .gates import Branch, Gate, conjugate, validate_rules_against_matrices
from .models import (
    AnnniSpec,
    Boundary,
    Circuit,
    annni_hamiltonian,
    annni_observables,
    combine_energy,
    local_entangler,
)
from .pauli import (
    MONOMIAL_ONE,
    PauliWord,
    PropagatedObservable,
    SymbolicTerm,
    TrigKind,
    TrigMonomial,
    TruncationMeta,
    merge_into,
    monomial_multiply,
    weight,
)
from .propagation import (
    ExpectationPolynomial,
    TruncationConfig,
    poly_linear_combination,
    propagate,
    term_statistics,
    trim,
)

__version__ = "0.1.0"
