"""Numeric evaluation of expectation polynomials and their gradients.

Evaluation precomputes sin/cos of every parameter once per theta and reuses
them across terms; this is the inner loop of both training and the MAE
sweeps, so the heavy lifting lives in numba kernels (see _kernels.py).
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import ValidationError
from .pauli import TrigKind
from .propagation import ExpectationPolynomial

_HALF_PI = np.pi / 2


def _compiled(poly: ExpectationPolynomial):
    """Flatten a polynomial into kernel arrays (cached on the instance)."""
    cached = getattr(poly, "_compiled_arrays", None)
    if cached is not None:
        return cached
    coeffs = np.array([c for _, c in poly.terms], dtype=np.float64)
    offs = np.zeros(len(poly.terms) + 1, dtype=np.int64)
    pids, kinds, exps = [], [], []
    for i, (mono, _) in enumerate(poly.terms):
        for pid, kind, exp in mono.factors:
            pids.append(pid)
            kinds.append(int(kind))
            exps.append(exp)
        offs[i + 1] = len(pids)
    arrays = (
        coeffs,
        offs,
        np.array(pids, dtype=np.int64),
        np.array(kinds, dtype=np.int8),
        np.array(exps, dtype=np.int64),
    )
    poly._compiled_arrays = arrays
    return arrays


def _check_theta(poly: ExpectationPolynomial, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1:
        raise ValidationError("theta must be a 1-d vector")
    if theta.size < poly.n_params:
        raise ValidationError(
            f"theta has {theta.size} entries, polynomial needs {poly.n_params}"
        )
    if not np.all(np.isfinite(theta)):
        raise ValidationError("theta entries must be finite")
    return theta


def evaluate(poly: ExpectationPolynomial, theta) -> float:
    """Sum over terms of coeff * prod(factors) at one parameter vector."""
    theta = _check_theta(poly, theta)
    if not poly.terms:
        return 0.0
    return float(_kernels.eval_single(*_compiled(poly), np.sin(theta), np.cos(theta)))


def evaluate_batch(poly: ExpectationPolynomial, thetas) -> np.ndarray:
    """Evaluate at many parameter vectors (rows); identical to per-row evaluate."""
    thetas = np.asarray(thetas, dtype=np.float64)
    if thetas.ndim != 2:
        raise ValidationError("thetas must be a 2-d array (samples x params)")
    if thetas.shape[1] < poly.n_params:
        raise ValidationError(
            f"thetas have {thetas.shape[1]} columns, polynomial needs {poly.n_params}"
        )
    out = np.zeros(thetas.shape[0], dtype=np.float64)
    if poly.terms:
        _kernels.eval_batch(*_compiled(poly), np.sin(thetas), np.cos(thetas), out)
    return out


def gradient(poly: ExpectationPolynomial, theta) -> np.ndarray:
    """Analytic gradient, term-wise differentiation; length matches theta."""
    theta = _check_theta(poly, theta)
    grad = np.zeros(theta.size, dtype=np.float64)
    if poly.terms:
        _kernels.grad_single(*_compiled(poly), np.sin(theta), np.cos(theta), grad)
    return grad


def parameter_shift(poly: ExpectationPolynomial, theta, j: int) -> float:
    """Parameter-shift derivative (L(theta + pi/2 e_j) - L(theta - pi/2 e_j)) / 2.

    Valid only when parameter j carries total trig exponent <= 1 in every
    monomial (single-use parameter); otherwise the simple two-point rule does
    not hold and a ValidationError is raised.
    """
    theta = _check_theta(poly, theta)
    if not 0 <= j < theta.size:
        raise ValidationError(f"parameter index {j} out of range")
    for mono, _ in poly.terms:
        if mono.exponent_of(j) > 1:
            raise ValidationError(
                f"parameter {j} appears with total exponent > 1; "
                "two-point parameter-shift rule does not apply"
            )
    plus = theta.copy()
    plus[j] += _HALF_PI
    minus = theta.copy()
    minus[j] -= _HALF_PI
    return (evaluate(poly, plus) - evaluate(poly, minus)) / 2.0


def finite_difference_gradient(poly: ExpectationPolynomial, theta, h: float = 1e-5) -> np.ndarray:
    """Central finite differences; the slow cross-check for the analytic path."""
    theta = _check_theta(poly, theta)
    grad = np.zeros(theta.size, dtype=np.float64)
    for j in range(theta.size):
        plus = theta.copy()
        plus[j] += h
        minus = theta.copy()
        minus[j] -= h
        grad[j] = (evaluate(poly, plus) - evaluate(poly, minus)) / (2 * h)
    return grad


def mean_abs_term_values(poly_arrays, sin_m, cos_m) -> np.ndarray:
    """Per-term mean |coeff * prod(factors)| over sampled parameters."""
    coeffs = poly_arrays[0]
    out = np.zeros(coeffs.shape[0], dtype=np.float64)
    if coeffs.size:
        _kernels.eval_term_abs_batch(*poly_arrays, sin_m, cos_m, out)
    return out
