import numpy as np
import pytest

from pauliprop import (
    Circuit,
    Gate,
    PauliWord,
    TermExplosionError,
    TrigMonomial,
    ValidationError,
    local_entangler,
    propagate,
    term_statistics,
    trim,
)
from pauliprop.propagation import TruncationConfig, poly_linear_combination

Z0_4 = [(1, PauliWord.from_string("ZIII"))]

# depth-1, 4-qubit local entangler acting on Z0, no truncation: the full
# backward expansion has exactly these eight terms.
GOLDEN = {
    ("XIII", ((0, "sin", 1), (4, "cos", 1), (8, "cos", 1))): -1,
    ("XXII", ((0, "cos", 1), (1, "cos", 1), (8, "sin", 1))): -1,
    ("XZII", ((0, "cos", 1), (1, "sin", 1), (8, "sin", 1))): -1,
    ("YXII", ((1, "cos", 1), (4, "sin", 1), (8, "cos", 1))): 1,
    ("YZII", ((1, "sin", 1), (4, "sin", 1), (8, "cos", 1))): 1,
    ("ZIII", ((0, "cos", 1), (4, "cos", 1), (8, "cos", 1))): 1,
    ("ZXII", ((0, "sin", 1), (1, "cos", 1), (8, "sin", 1))): -1,
    ("ZZII", ((0, "sin", 1), (1, "sin", 1), (8, "sin", 1))): -1,
}


def as_comparable(po):
    return {
        (t.word.to_string(), tuple((p, k.label, e) for p, k, e in t.monomial.factors)): t.coeff
        for t in po.sorted_terms()
    }


def random_circuit(rng, n, depth):
    gates = []
    param = 0
    for _ in range(depth):
        for q in range(n):
            kind = rng.choice(["rx", "ry", "rz"])
            gates.append(Gate(kind, qubit=q, param=param))
            param += 1
        for q in range(n - 1):
            if rng.random() < 0.5:
                gates.append(Gate.cnot(q, q + 1))
    return Circuit(n, tuple(gates))


class TestGolden:
    def test_depth1_exact_terms(self):
        po = propagate(Z0_4, local_entangler(4, 1))
        assert as_comparable(po) == GOLDEN
        assert po.meta.discarded_by_weight == 0
        assert po.meta.discarded_by_frequency == 0

    def test_depth1_trimmed_polynomial(self):
        poly = trim(propagate(Z0_4, local_entangler(4, 1)))
        # <Z0> = -sin t8 sin t1 sin t0 + cos t8 cos t4 cos t0
        expected = {
            TrigMonomial.from_json([[0, "sin", 1], [1, "sin", 1], [8, "sin", 1]]): -1,
            TrigMonomial.from_json([[0, "cos", 1], [4, "cos", 1], [8, "cos", 1]]): 1,
        }
        assert dict(poly.terms) == expected

    def test_depth1_histograms(self):
        stats = term_statistics(propagate(Z0_4, local_entangler(4, 1)))
        assert stats.weight_histogram == {1: 2, 2: 6}
        assert stats.freq_histogram == {3: 8}
        assert stats.surviving_weight_histogram == {1: 1, 2: 1}
        assert stats.surviving_freq_histogram == {3: 2}


class TestTruncation:
    def test_weight_cut_drops_terms(self):
        po = propagate(Z0_4, local_entangler(4, 1), TruncationConfig(w_cut=1))
        assert all(t.word.weight <= 1 for t in po)
        assert po.meta.discarded_by_weight > 0

    def test_frequency_cut_drops_terms(self):
        po = propagate(Z0_4, local_entangler(4, 1), TruncationConfig(nu_cut=2))
        # every branch of the depth-1 expansion has frequency 3
        assert len(po) == 0
        assert po.meta.discarded_by_frequency > 0

    def test_cut_at_threshold_survives(self):
        full = propagate(Z0_4, local_entangler(4, 1))
        at = propagate(Z0_4, local_entangler(4, 1), TruncationConfig(w_cut=2, nu_cut=3))
        assert as_comparable(at) == as_comparable(full)

    def test_soundness_at_loose_cutoffs(self):
        # w_cut = n and nu_cut = number of rotations can never bind
        rng = np.random.default_rng(5)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            c = random_circuit(rng, n, int(rng.integers(1, 4)))
            obs = [(1, PauliWord.single(n, int(rng.integers(n)), "Z"))]
            full = propagate(obs, c)
            capped = propagate(obs, c, TruncationConfig(w_cut=n, nu_cut=c.n_params))
            assert as_comparable(capped) == as_comparable(full)

    def test_term_count_monotone_in_cuts(self):
        c = local_entangler(6, 2)
        obs = [(1, PauliWord.single(6, 0, "Z"))]
        sizes = [
            len(propagate(obs, c, TruncationConfig(w_cut=w, nu_cut=8)))
            for w in (1, 2, 3, 4, 5, 6)
        ]
        assert sizes == sorted(sizes)

    def test_explosion_guard(self):
        with pytest.raises(TermExplosionError):
            propagate(
                [(1, PauliWord.single(8, 0, "Z"))],
                local_entangler(8, 2),
                TruncationConfig(max_terms=10),
            )

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            TruncationConfig(w_cut=0)
        with pytest.raises(ValidationError):
            TruncationConfig(nu_cut=-1)
        with pytest.raises(ValidationError):
            TruncationConfig(max_terms=0)

    def test_observable_validation(self):
        c = local_entangler(4, 1)
        with pytest.raises(ValidationError):
            propagate([(1, PauliWord.from_string("ZZ"))], c)
        with pytest.raises(ValidationError):
            propagate([(0.5, PauliWord.from_string("ZIII"))], c)


class TestTrim:
    def test_keeps_only_x_free_words(self):
        po = propagate(Z0_4, local_entangler(4, 2))
        poly = trim(po)
        survivors = {t.word for t in po if t.word.x_mask == 0}
        assert len(poly.terms) == sum(
            1 for t in po.sorted_terms() if t.word.x_mask == 0
        )
        assert all(w.x_mask == 0 for w in survivors)

    def test_explicit_n_params(self):
        poly = trim(propagate(Z0_4, local_entangler(4, 1)), n_params=12)
        assert poly.n_params == 12

    def test_inferred_n_params(self):
        poly = trim(propagate(Z0_4, local_entangler(4, 1)))
        assert poly.n_params == 9  # highest surviving param id is 8

    def test_idempotent_meta(self):
        po = propagate(Z0_4, local_entangler(4, 1), TruncationConfig(w_cut=2))
        poly = trim(po)
        assert poly.meta.w_cut == 2
        assert poly.meta.discarded_by_weight == po.meta.discarded_by_weight


class TestLinearCombination:
    def test_merges_and_cancels(self):
        p1 = trim(propagate(Z0_4, local_entangler(4, 1)))
        combo = poly_linear_combination([(2, p1), (-2, p1)])
        assert combo.terms == ()
        combo = poly_linear_combination([(3, p1)])
        assert {m: c for m, c in combo.terms} == {m: 3 * c for m, c in p1.terms}

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            poly_linear_combination([])
