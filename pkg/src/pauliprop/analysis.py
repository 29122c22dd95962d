"""Truncation-error analysis: empirical sweeps, the closed-form bound, decay
fits, high-frequency variance checks, and gradient tails."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import calculus
from .errors import ValidationError
from .models import Circuit, PauliSum
from .oracle import MAX_QUBITS, expectation, simulate
from .pauli import PropagatedObservable
from .propagation import TruncationConfig, propagate, trim


@dataclass(frozen=True)
class BoundParams:
    """Decay constants of the weight-frequency assumption, |c| <= C0 a^w b^nu."""

    c0: float
    alpha: float
    beta: float
    n_qubits: int
    n_params: int

    def __post_init__(self):
        if self.c0 <= 0:
            raise ValidationError("C0 must be positive")
        if not (0 < self.alpha < 1) or not (0 < self.beta < 1):
            raise ValidationError("alpha and beta must lie in (0, 1)")

    @property
    def a(self) -> float:
        return 3 * self.n_qubits * self.alpha

    @property
    def b(self) -> float:
        return 2 * self.n_params * self.beta


def truncation_bound(bp: BoundParams, w_cut: int, nu_cut: int) -> float:
    """Closed-form worst-case truncation error, C0 (A^{w+1} + B^{nu+1}) / ((1-A)(1-B)).

    Valid only when A = 3 n alpha < 1 and B = 2 P beta < 1 (the decay must
    dominate the combinatorial growth); otherwise a ValidationError is raised.
    """
    a, b = bp.a, bp.b
    if a >= 1 or b >= 1:
        raise ValidationError(
            f"bound requires A < 1 and B < 1, got A={a:.6g}, B={b:.6g}"
        )
    return bp.c0 * (a ** (w_cut + 1) + b ** (nu_cut + 1)) / ((1 - a) * (1 - b))


@dataclass
class MaeCell:
    w_cut: int | None
    nu_cut: int | None
    mae: float
    stderr: float
    bound: float | None = None


@dataclass
class MaeSweepResult:
    cells: list[MaeCell]
    n_samples: int
    seed: int


def mae_sweep(
    circuit: Circuit,
    observable: PauliSum,
    w_cuts,
    nu_cuts,
    n_samples: int,
    seed: int,
    bound_params: BoundParams | None = None,
    max_terms: int = 50_000_000,
) -> MaeSweepResult:
    """Mean absolute surrogate error per cutoff pair against the statevector.

    One shared theta sample set (uniform on [0, 2 pi]^P) is used across all
    grid cells for comparability. ``None`` in a cutoff list means unlimited.
    """
    if circuit.n_qubits > MAX_QUBITS:
        raise ValidationError("circuit too large for the statevector reference")
    int_obs = [(int(c), w) for c, w in observable]
    if any(c != ci for (c, _), (ci, _) in zip(observable, int_obs)):
        raise ValidationError("mae_sweep expects integer observable coefficients")
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0.0, 2 * np.pi, size=(n_samples, circuit.n_params))

    exact = np.empty(n_samples)
    for s in range(n_samples):
        exact[s] = expectation(simulate(circuit, thetas[s]), observable)

    cells = []
    for w_cut in w_cuts:
        for nu_cut in nu_cuts:
            cfg = TruncationConfig(w_cut=w_cut, nu_cut=nu_cut, max_terms=max_terms)
            poly = trim(propagate(int_obs, circuit, cfg), n_params=circuit.n_params)
            approx = calculus.evaluate_batch(poly, thetas)
            err = np.abs(exact - approx)
            mae = float(err.mean())
            stderr = float(err.std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0
            bound = None
            if bound_params is not None and w_cut is not None and nu_cut is not None:
                try:
                    bound = truncation_bound(bound_params, w_cut, nu_cut)
                except ValidationError:
                    bound = None
            cells.append(MaeCell(w_cut, nu_cut, mae, stderr, bound))
    return MaeSweepResult(cells=cells, n_samples=n_samples, seed=seed)


@dataclass
class DecayFit:
    """Raw fitted decay constants; they may fall outside the bound's domain
    (alpha or beta >= 1), in which case ``params`` raises."""

    c0: float
    alpha: float
    beta: float
    n_qubits: int
    n_params: int
    residual: float  # rms residual of the log-linear fit
    group_means: dict[tuple[int, int], float]  # (weight, frequency) -> mean |c|

    @property
    def params(self) -> BoundParams:
        return BoundParams(
            c0=self.c0, alpha=self.alpha, beta=self.beta,
            n_qubits=self.n_qubits, n_params=self.n_params,
        )


def fit_decay_constants(po: PropagatedObservable, n_samples: int, seed: int) -> DecayFit:
    """Fit mean |c_j(theta)| ~ C0 alpha^w beta^nu by least squares on group means.

    The decay assumption is stated as a sup over theta; a single raw monomial
    always has sup 1, so the operative proxy here is the mean absolute
    coefficient over sampled theta, grouped by (weight, frequency).
    """
    n_params = 0
    for (_, mono), _ in po.terms.items():
        for pid, _, _ in mono.factors:
            n_params = max(n_params, pid + 1)
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0.0, 2 * np.pi, size=(n_samples, max(n_params, 1)))
    sin_m, cos_m = np.sin(thetas), np.cos(thetas)

    terms = list(po.terms.items())
    coeffs = np.array([float(c) for _, c in terms])
    offs = np.zeros(len(terms) + 1, dtype=np.int64)
    pids, kinds, exps = [], [], []
    for i, ((_, mono), _) in enumerate(terms):
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
    means = calculus.mean_abs_term_values(arrays, sin_m, cos_m)

    groups: dict[tuple[int, int], list[float]] = {}
    for ((word, mono), _), value in zip(terms, means):
        groups.setdefault((word.weight, mono.frequency), []).append(value)
    group_means = {k: float(np.mean(v)) for k, v in groups.items()}
    if len(group_means) < 2:
        raise ValidationError("need at least two (weight, frequency) classes to fit")

    keys = sorted(group_means)
    y = np.log([group_means[k] for k in keys])
    design = np.array([[1.0, w, nu] for w, nu in keys])
    sol, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ sol - y) ** 2)))
    c0, alpha, beta = np.exp(sol)
    return DecayFit(
        c0=float(c0),
        alpha=float(alpha),
        beta=float(beta),
        n_qubits=po.n_qubits,
        n_params=n_params,
        residual=residual,
        group_means=group_means,
    )


def frequency_variance_check(nu_max: int, n_samples: int, seed: int) -> list[tuple[int, float, float, float]]:
    """Monte Carlo E[prod f_i^2] vs the 2^-nu law; rows (nu, estimate, expected, stderr)."""
    rng = np.random.default_rng(seed)
    rows = [(0, 1.0, 1.0, 0.0)]
    for nu in range(1, nu_max + 1):
        thetas = rng.uniform(0.0, 2 * np.pi, size=(n_samples, nu))
        use_cos = rng.integers(0, 2, size=(n_samples, nu)).astype(bool)
        factors = np.where(use_cos, np.cos(thetas), np.sin(thetas))
        products = np.prod(factors**2, axis=1)
        est = float(products.mean())
        stderr = float(products.std(ddof=1) / np.sqrt(n_samples))
        rows.append((nu, est, 0.5**nu, stderr))
    return rows


def gradient_tail_check(
    circuit: Circuit,
    observable: PauliSum,
    thetas,
    w_cuts,
    nu_cuts,
    max_terms: int = 50_000_000,
) -> list[tuple[int | None, int | None, float]]:
    """Max gradient deviation of the truncated surrogate per cutoff pair.

    The exact gradient comes from the untruncated polynomial; rows are
    (w_cut, nu_cut, max over samples and components of |grad diff|).
    """
    if circuit.n_qubits > MAX_QUBITS:
        raise ValidationError("circuit too large for the reference propagation")
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    int_obs = [(int(c), w) for c, w in observable]
    exact_poly = trim(
        propagate(int_obs, circuit, TruncationConfig(max_terms=max_terms)),
        n_params=circuit.n_params,
    )
    exact_grads = np.array([calculus.gradient(exact_poly, t) for t in thetas])
    rows = []
    for w_cut in w_cuts:
        for nu_cut in nu_cuts:
            cfg = TruncationConfig(w_cut=w_cut, nu_cut=nu_cut, max_terms=max_terms)
            poly = trim(propagate(int_obs, circuit, cfg), n_params=circuit.n_params)
            grads = np.array([calculus.gradient(poly, t) for t in thetas])
            rows.append((w_cut, nu_cut, float(np.max(np.abs(grads - exact_grads)))))
    return rows
