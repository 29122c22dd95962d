import pytest

from pauliprop import (
    MONOMIAL_ONE,
    PauliWord,
    PropagatedObservable,
    TrigKind,
    TrigMonomial,
    TruncationMeta,
    ValidationError,
    monomial_multiply,
    weight,
)


class TestPauliWord:
    def test_string_round_trip(self):
        for s in ("I", "X", "Y", "Z", "IXYZ", "ZZZZZ", "IXIXI"):
            assert PauliWord.from_string(s).to_string() == s

    def test_bit_layout(self):
        w = PauliWord.from_string("XYZI")
        # qubit 0 is the leftmost letter
        assert w.x_mask == 0b011
        assert w.z_mask == 0b110
        assert w.letter(0) == "X"
        assert w.letter(2) == "Z"

    def test_weight(self):
        assert weight(PauliWord.from_string("IIII")) == 0
        assert weight(PauliWord.from_string("XIYZ")) == 3
        assert PauliWord.from_string("YYYY").weight == 4

    def test_single(self):
        w = PauliWord.single(5, 3, "Y")
        assert w.to_string() == "IIIYI"
        with pytest.raises(ValidationError):
            PauliWord.single(3, 3, "X")

    def test_invalid_letter(self):
        with pytest.raises(ValidationError):
            PauliWord.from_string("XQ")

    def test_lowercase_accepted(self):
        assert PauliWord.from_string("xyz") == PauliWord.from_string("XYZ")


class TestTrigMonomial:
    def test_empty_is_one(self):
        assert MONOMIAL_ONE.frequency == 0
        assert MONOMIAL_ONE.factors == ()

    def test_times_sorted_and_frequency(self):
        m = MONOMIAL_ONE.times(3, TrigKind.SIN).times(0, TrigKind.COS)
        m = m.times(3, TrigKind.SIN)
        assert m.frequency == 3
        assert m.factors == (
            (0, TrigKind.COS, 1),
            (3, TrigKind.SIN, 2),
        )

    def test_multiply_helper(self):
        m = monomial_multiply(MONOMIAL_ONE, 2, TrigKind.COS)
        assert m.factors == ((2, TrigKind.COS, 1),)

    def test_sin_sorts_before_cos_same_param(self):
        a = MONOMIAL_ONE.times(1, TrigKind.COS).times(1, TrigKind.SIN)
        b = MONOMIAL_ONE.times(1, TrigKind.SIN).times(1, TrigKind.COS)
        assert a == b
        assert a.factors == ((1, TrigKind.SIN, 1), (1, TrigKind.COS, 1))

    def test_exponent_of(self):
        m = TrigMonomial.from_factors(
            [(0, TrigKind.SIN, 2), (0, TrigKind.COS, 1), (4, TrigKind.COS, 3)]
        )
        assert m.exponent_of(0) == 3
        assert m.exponent_of(4) == 3
        assert m.exponent_of(7) == 0
        assert m.frequency == 6

    def test_json_round_trip(self):
        m = TrigMonomial.from_factors([(1, TrigKind.SIN, 1), (5, TrigKind.COS, 2)])
        assert TrigMonomial.from_json(m.to_json()) == m
        assert TrigMonomial.from_json([]) == MONOMIAL_ONE

    def test_json_rejects_noncanonical(self):
        with pytest.raises(ValidationError):
            TrigMonomial.from_json([[3, "cos", 1], [1, "sin", 1]])
        with pytest.raises(ValidationError):
            TrigMonomial.from_json([[1, "sin", 1], [1, "sin", 2]])
        with pytest.raises(ValidationError):
            TrigMonomial.from_json([[1, "tan", 1]])
        with pytest.raises(ValidationError):
            TrigMonomial.from_json([[1, "cos", 0]])


class TestPropagatedObservable:
    def test_merge_and_cancel(self):
        po = PropagatedObservable(2)
        w = PauliWord.from_string("XZ")
        po.add(w, MONOMIAL_ONE, 2)
        po.add(w, MONOMIAL_ONE, 3)
        assert po.terms[(w, MONOMIAL_ONE)] == 5
        po.add(w, MONOMIAL_ONE, -5)
        assert len(po) == 0

    def test_zero_coeff_ignored(self):
        po = PropagatedObservable(1)
        po.add(PauliWord.from_string("Z"), MONOMIAL_ONE, 0)
        assert len(po) == 0

    def test_qubit_mismatch(self):
        po = PropagatedObservable(2)
        with pytest.raises(ValidationError):
            po.add(PauliWord.from_string("Z"), MONOMIAL_ONE, 1)

    def test_combine_partition_independence(self):
        words = [PauliWord.from_string(s) for s in ("XI", "IZ", "YY")]
        monos = [MONOMIAL_ONE, MONOMIAL_ONE.times(0, TrigKind.SIN)]
        terms = [(w, m, c) for c, w in enumerate(words, 1) for m in monos]

        whole = PropagatedObservable(2)
        for w, m, c in terms:
            whole.add(w, m, c)

        left = PropagatedObservable(2)
        right = PropagatedObservable(2)
        for i, (w, m, c) in enumerate(terms):
            (left if i % 2 else right).add(w, m, c)
        left.combine(right)
        assert left == whole

    def test_jsonl_round_trip(self, tmp_path):
        po = PropagatedObservable(3, TruncationMeta(w_cut=2, discarded_by_weight=7))
        po.add(PauliWord.from_string("ZII"), MONOMIAL_ONE, 4)
        po.add(
            PauliWord.from_string("XYI"),
            TrigMonomial.from_factors([(2, TrigKind.SIN, 1)]),
            -1,
        )
        path = tmp_path / "po.jsonl"
        po.write_jsonl(path)
        back = PropagatedObservable.read_jsonl(path)
        assert back == po
        assert back.meta == po.meta

    def test_jsonl_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("not json\n")
        with pytest.raises(ValidationError):
            PropagatedObservable.read_jsonl(path)
        path.write_text('{"n_qubits": 2}\n{"pauli": "XI"}\n')
        with pytest.raises(ValidationError):
            PropagatedObservable.read_jsonl(path)

    def test_sorted_terms_canonical(self):
        po = PropagatedObservable(1)
        po.add(PauliWord.from_string("Z"), MONOMIAL_ONE.times(1, TrigKind.COS), 1)
        po.add(PauliWord.from_string("X"), MONOMIAL_ONE, 1)
        po.add(PauliWord.from_string("Z"), MONOMIAL_ONE, 1)
        order = [(t.word.to_string(), t.monomial.codes) for t in po.sorted_terms()]
        assert order == sorted(order)
