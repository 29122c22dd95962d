import numpy as np
import pytest

from pauliprop import AnnniSpec, ValidationError
from pauliprop import oracle
from pauliprop.optimizer import (
    AdamConfig,
    finetune,
    phase_diagram_sweep,
    propagate_annni_surrogates,
    true_energy,
    vqe_train,
)
from pauliprop.propagation import TruncationConfig


@pytest.fixture(scope="module")
def small_surrogates():
    return propagate_annni_surrogates(4, 2, TruncationConfig())


class TestVqeTrain:
    def test_energy_decreases(self, small_surrogates):
        _, polys = small_surrogates
        trace = vqe_train(polys, 0.2, 0.4, AdamConfig(max_steps=400))
        first = trace.steps[0][1]
        assert trace.final_energy < first
        assert len(trace.final_theta) == polys[0].n_params

    def test_deterministic(self, small_surrogates):
        _, polys = small_surrogates
        cfg = AdamConfig(max_steps=50, seed=123)
        t1 = vqe_train(polys, 0.5, 0.5, cfg)
        t2 = vqe_train(polys, 0.5, 0.5, cfg)
        assert np.array_equal(t1.final_theta, t2.final_theta)
        assert t1.steps == t2.steps

    def test_seed_changes_init(self, small_surrogates):
        _, polys = small_surrogates
        t1 = vqe_train(polys, 0.5, 0.5, AdamConfig(max_steps=5, seed=0))
        t2 = vqe_train(polys, 0.5, 0.5, AdamConfig(max_steps=5, seed=1))
        assert not np.array_equal(t1.final_theta, t2.final_theta)

    def test_grad_tol_early_stop(self, small_surrogates):
        _, polys = small_surrogates
        trace = vqe_train(polys, 0.2, 0.4, AdamConfig(max_steps=10000, grad_tol=1e-2))
        assert len(trace.steps) < 10000
        assert trace.steps[-1][2] < 1e-2

    def test_close_to_ground_state(self, small_surrogates):
        circuit, polys = small_surrogates
        spec = AnnniSpec(4)
        trace = vqe_train(polys, 0.2, 0.4, AdamConfig(max_steps=1000))
        e_true = true_energy(circuit, trace.final_theta, spec, 0.2, 0.4)
        e0 = oracle.ground_energy(spec, 0.2, 0.4)
        assert abs(e_true - e0) / abs(e0) < 0.05

    def test_variational_lower_bound(self, small_surrogates):
        # a statevector energy can never undershoot the exact ground energy
        circuit, polys = small_surrogates
        spec = AnnniSpec(4)
        for seed, (kappa, h) in enumerate([(0.0, 0.3), (0.4, 0.8), (0.9, 0.1)]):
            trace = vqe_train(polys, kappa, h, AdamConfig(max_steps=300, seed=seed))
            e_true = true_energy(circuit, trace.final_theta, spec, kappa, h)
            e0 = oracle.ground_energy(spec, kappa, h)
            assert e_true >= e0 - 1e-9

    def test_mismatched_polys_rejected(self, small_surrogates):
        _, polys = small_surrogates
        other = propagate_annni_surrogates(4, 1, TruncationConfig())[1]
        with pytest.raises(ValidationError):
            vqe_train((polys[0], polys[1], other[2]), 0.2, 0.4, AdamConfig())

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            AdamConfig(learning_rate=0.0)
        with pytest.raises(ValidationError):
            AdamConfig(beta1=1.0)
        with pytest.raises(ValidationError):
            AdamConfig(max_steps=0)


@pytest.fixture(scope="module")
def truncated():
    # deliberately coarse cutoffs so the surrogate optimum is inexact
    return propagate_annni_surrogates(4, 2, TruncationConfig(w_cut=2, nu_cut=6))


class TestFinetune:
    """Parameter-shift refinement on the statevector after pre-training."""

    def test_improves_on_pretrained(self, truncated):
        circuit, polys = truncated
        spec = AnnniSpec(4)
        kappa, h = 0.4, 0.6
        pre = vqe_train(polys, kappa, h, AdamConfig(max_steps=400))
        e_pre = true_energy(circuit, pre.final_theta, spec, kappa, h)
        ft = finetune(circuit, pre.final_theta, spec, kappa, h,
                      AdamConfig(max_steps=150))
        e_post = true_energy(circuit, ft.final_theta, spec, kappa, h)
        e0 = oracle.ground_energy(spec, kappa, h)
        assert e_post < e_pre
        assert e_post >= e0 - 1e-9
        assert abs(e_post - e0) / abs(e0) < abs(e_pre - e0) / abs(e0)

    def test_gradient_is_parameter_shift(self, truncated):
        # one finetune step from theta0 must move against the parameter-shift
        # gradient of the exact energy, which in turn matches finite differences
        from pauliprop.models import annni_hamiltonian

        circuit, _ = truncated
        spec = AnnniSpec(4)
        hamiltonian = annni_hamiltonian(spec, 0.3, 0.5)
        rng = np.random.default_rng(7)
        theta0 = rng.normal(0.0, 0.5, circuit.n_params)

        def energy(t):
            return oracle.simulate_expectation(circuit, t, hamiltonian)

        eps = 1e-6
        for i in (0, circuit.n_params // 2, circuit.n_params - 1):
            e = np.zeros(circuit.n_params)
            e[i] = 1.0
            fd = (energy(theta0 + eps * e) - energy(theta0 - eps * e)) / (2 * eps)
            ps = 0.5 * (
                energy(theta0 + np.pi / 2 * e) - energy(theta0 - np.pi / 2 * e)
            )
            assert abs(fd - ps) < 1e-7

        ft = finetune(circuit, theta0, spec, 0.3, 0.5, AdamConfig(max_steps=1))
        grad = np.array([
            0.5 * (energy(theta0 + np.pi / 2 * np.eye(circuit.n_params)[i])
                   - energy(theta0 - np.pi / 2 * np.eye(circuit.n_params)[i]))
            for i in range(circuit.n_params)
        ])
        assert ft.steps[0][2] == pytest.approx(float(np.linalg.norm(grad)), abs=1e-12)

    def test_deterministic(self, truncated):
        circuit, polys = truncated
        spec = AnnniSpec(4)
        theta0 = vqe_train(polys, 0.2, 0.4, AdamConfig(max_steps=50)).final_theta
        cfg = AdamConfig(max_steps=20)
        t1 = finetune(circuit, theta0, spec, 0.2, 0.4, cfg)
        t2 = finetune(circuit, theta0, spec, 0.2, 0.4, cfg)
        assert np.array_equal(t1.final_theta, t2.final_theta)
        assert t1.steps == t2.steps

    def test_wrong_theta_size_rejected(self, truncated):
        circuit, _ = truncated
        with pytest.raises(ValidationError):
            finetune(circuit, np.zeros(3), AnnniSpec(4), 0.2, 0.4,
                     AdamConfig(max_steps=1))


class TestPhaseDiagramSweep:
    def test_grid_and_seeds(self):
        points = phase_diagram_sweep(
            4, 1, [0.0, 0.5], [0.3], AdamConfig(max_steps=60), TruncationConfig()
        )
        assert [(p.kappa, p.h) for p in points] == [(0.0, 0.3), (0.5, 0.3)]
        assert [p.seed for p in points] == [0, 1]
        for p in points:
            assert p.e_exact is not None
            assert p.e_vqe_true is not None
            assert p.e_vqe_true >= p.e_exact - 1e-9

    def test_empty_grid_rejected(self):
        with pytest.raises(ValidationError):
            phase_diagram_sweep(4, 1, [], [0.3], AdamConfig(), TruncationConfig())

    def test_finetune_stage_tightens_points(self):
        coarse = TruncationConfig(w_cut=2, nu_cut=6)
        plain = phase_diagram_sweep(
            4, 2, [0.4], [0.6], AdamConfig(max_steps=300), coarse
        )
        refined = phase_diagram_sweep(
            4, 2, [0.4], [0.6], AdamConfig(max_steps=300), coarse,
            finetune_cfg=AdamConfig(max_steps=150),
        )
        assert refined[0].rel_error < plain[0].rel_error
        # the surrogate optimum is untouched by the refinement stage
        assert refined[0].e_vqe_surrogate == plain[0].e_vqe_surrogate
