"""Adam descent on the truncated surrogate energy; VQE loop and sweeps."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import calculus, oracle
from .errors import ValidationError
from .models import (
    AnnniSpec,
    Boundary,
    annni_hamiltonian,
    annni_observables,
    combine_energy,
    local_entangler,
)
from .propagation import ExpectationPolynomial, TruncationConfig, propagate, trim


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_steps: int = 1000
    seed: int = 0
    init_scale: float = 0.1  # stddev of the zero-mean normal initialization
    grad_tol: float | None = 1e-6

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValidationError("beta1 and beta2 must lie in (0, 1)")
        if self.max_steps < 1:
            raise ValidationError("max_steps must be >= 1")


@dataclass
class TrainTrace:
    steps: list[tuple[int, float, float]] = field(default_factory=list)  # (step, energy, |grad|)
    final_theta: np.ndarray | None = None
    wall_time: float = 0.0

    @property
    def final_energy(self) -> float:
        return self.steps[-1][1]


def vqe_train(
    polys: tuple[ExpectationPolynomial, ExpectationPolynomial, ExpectationPolynomial],
    kappa: float,
    h: float,
    cfg: AdamConfig,
) -> TrainTrace:
    """Minimize the combined surrogate energy with Adam.

    The loss is combine_energy of the three component polynomials; the
    gradient is the matching combination of component gradients. Bitwise
    deterministic for a fixed seed and config.
    """
    p1, p2, p3 = polys
    n_params = {p.n_params for p in polys}
    if len(n_params) != 1:
        raise ValidationError(f"polynomials disagree on n_params: {sorted(n_params)}")
    n_params = n_params.pop()

    rng = np.random.default_rng(cfg.seed)
    theta = rng.normal(0.0, cfg.init_scale, size=n_params)
    m = np.zeros(n_params)
    v = np.zeros(n_params)
    trace = TrainTrace()
    start = time.perf_counter()

    for step in range(1, cfg.max_steps + 1):
        energy = combine_energy(
            calculus.evaluate(p1, theta),
            calculus.evaluate(p2, theta),
            calculus.evaluate(p3, theta),
            kappa,
            h,
        )
        grad = combine_energy(
            calculus.gradient(p1, theta),
            calculus.gradient(p2, theta),
            calculus.gradient(p3, theta),
            kappa,
            h,
        )
        grad_norm = float(np.linalg.norm(grad))
        trace.steps.append((step, energy, grad_norm))
        if cfg.grad_tol is not None and grad_norm < cfg.grad_tol:
            break
        m = cfg.beta1 * m + (1 - cfg.beta1) * grad
        v = cfg.beta2 * v + (1 - cfg.beta2) * grad * grad
        m_hat = m / (1 - cfg.beta1**step)
        v_hat = v / (1 - cfg.beta2**step)
        theta = theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)

    trace.final_theta = theta
    trace.wall_time = time.perf_counter() - start
    return trace


def finetune(
    circuit,
    theta0,
    spec: AnnniSpec,
    kappa: float,
    h: float,
    cfg: AdamConfig,
) -> TrainTrace:
    """Refine pre-trained parameters against the untruncated energy.

    Adam on the exact statevector expectation, with gradients from the
    parameter-shift rule (E(theta + pi/2 e_i) - E(theta - pi/2 e_i)) / 2.
    This is the stage that follows surrogate pre-training: every evaluation
    goes through the oracle, never the truncated polynomials, so it is the
    classical stand-in for on-device refinement. cfg.seed and cfg.init_scale
    are unused; the start point is theta0.
    """
    hamiltonian = annni_hamiltonian(spec, kappa, h)

    def energy_at(theta):
        return oracle.simulate_expectation(circuit, theta, hamiltonian)

    theta = np.array(theta0, dtype=np.float64)
    if theta.size != circuit.n_params:
        raise ValidationError(
            f"theta0 has {theta.size} entries, circuit needs {circuit.n_params}"
        )
    m = np.zeros(theta.size)
    v = np.zeros(theta.size)
    trace = TrainTrace()
    start = time.perf_counter()
    shift = np.pi / 2.0

    for step in range(1, cfg.max_steps + 1):
        energy = energy_at(theta)
        grad = np.empty(theta.size)
        for i in range(theta.size):
            bumped = theta.copy()
            bumped[i] = theta[i] + shift
            plus = energy_at(bumped)
            bumped[i] = theta[i] - shift
            minus = energy_at(bumped)
            grad[i] = 0.5 * (plus - minus)
        grad_norm = float(np.linalg.norm(grad))
        trace.steps.append((step, energy, grad_norm))
        if cfg.grad_tol is not None and grad_norm < cfg.grad_tol:
            break
        m = cfg.beta1 * m + (1 - cfg.beta1) * grad
        v = cfg.beta2 * v + (1 - cfg.beta2) * grad * grad
        m_hat = m / (1 - cfg.beta1**step)
        v_hat = v / (1 - cfg.beta2**step)
        theta = theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)

    trace.final_theta = theta
    trace.wall_time = time.perf_counter() - start
    return trace


def propagate_annni_surrogates(
    n: int,
    depth: int,
    cuts: TruncationConfig,
    boundary: Boundary = Boundary.OPEN,
):
    """Propagate O1, O2, O3 once for a local-entangler ansatz; returns
    (circuit, (p1, p2, p3))."""
    circuit = local_entangler(n, depth)
    obs = annni_observables(AnnniSpec(n, boundary))
    polys = tuple(
        trim(propagate(obs[name], circuit, cuts), n_params=circuit.n_params)
        for name in ("o1", "o2", "o3")
    )
    return circuit, polys


@dataclass
class SweepPoint:
    kappa: float
    h: float
    e_vqe_surrogate: float
    e_vqe_true: float | None
    e_exact: float | None
    rel_error: float | None
    seed: int


def true_energy(circuit, theta, spec: AnnniSpec, kappa: float, h: float) -> float:
    """Statevector energy of the trained parameters (no truncation)."""
    return oracle.simulate_expectation(circuit, theta, annni_hamiltonian(spec, kappa, h))


def phase_diagram_sweep(
    n: int,
    depth: int,
    kappa_grid,
    h_grid,
    cfg: AdamConfig,
    cuts: TruncationConfig,
    boundary: Boundary = Boundary.OPEN,
    oracle_limit: int = oracle.MAX_QUBITS,
    finetune_cfg: AdamConfig | None = None,
) -> list[SweepPoint]:
    """Train a fresh VQE per grid point; exact reference where the oracle applies.

    The three observables are propagated once and reused for every (kappa, h).
    Each point trains from a seeded init with seed = cfg.seed + grid index.
    With ``finetune_cfg``, each pre-trained point is refined with
    parameter-shift Adam on the statevector energy (requires the oracle, so
    n must be within its reach); e_vqe_true then reports the refined energy
    while e_vqe_surrogate still reports the pre-training optimum.
    """
    kappa_grid = list(kappa_grid)
    h_grid = list(h_grid)
    if not kappa_grid or not h_grid:
        raise ValidationError("grids must be non-empty")
    if finetune_cfg is not None and n > oracle.MAX_QUBITS:
        raise ValidationError(
            f"fine-tuning needs the statevector oracle (n <= {oracle.MAX_QUBITS})"
        )
    circuit, polys = propagate_annni_surrogates(n, depth, cuts, boundary)
    spec = AnnniSpec(n, boundary)
    points = []
    for index, (kappa, h) in enumerate(
        (k, hh) for k in kappa_grid for hh in h_grid
    ):
        seed = cfg.seed + index
        trace = vqe_train(polys, kappa, h, AdamConfig(
            learning_rate=cfg.learning_rate,
            beta1=cfg.beta1,
            beta2=cfg.beta2,
            epsilon=cfg.epsilon,
            max_steps=cfg.max_steps,
            seed=seed,
            init_scale=cfg.init_scale,
            grad_tol=cfg.grad_tol,
        ))
        theta = trace.final_theta
        if finetune_cfg is not None:
            theta = finetune(circuit, theta, spec, kappa, h, finetune_cfg).final_theta
        e_true = e_exact = rel = None
        if n <= oracle.MAX_QUBITS:
            e_true = true_energy(circuit, theta, spec, kappa, h)
        if n <= oracle_limit and n <= oracle.MAX_QUBITS:
            e_exact = oracle.ground_energy(spec, kappa, h)
            if e_exact != 0.0 and e_true is not None:
                rel = abs(e_true - e_exact) / abs(e_exact)
        points.append(SweepPoint(kappa, h, trace.final_energy, e_true, e_exact, rel, seed))
    return points
