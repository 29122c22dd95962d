"""Core value types: Pauli words, trigonometric monomials, symbolic terms.

A Pauli word on n qubits is stored as a pair of bitmasks: bit q of
``x_mask``/``z_mask`` records whether qubit q carries an X/Z component.
Per qubit: (x, z) = (0,0) -> I, (1,0) -> X, (1,1) -> Y, (0,1) -> Z.
This makes the weight a single popcount and hashing cheap.

Coefficient monomials are canonical products sin^a(theta_i) cos^b(theta_j)
stored as a sorted tuple of (param_id, kind, exponent) factors. The empty
monomial represents the constant 1.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, asdict
from enum import IntEnum
from itertools import groupby
from typing import Iterable, Iterator, NamedTuple

from .errors import ValidationError

# Propagation through the supported gate set only produces +-1 branches, so
# merged integer coefficients stay small; anything near 2^31 means a bug.
COEFF_LIMIT = 1 << 31

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


class TrigKind(IntEnum):
    SIN = 0
    COS = 1

    @property
    def label(self) -> str:
        return "sin" if self is TrigKind.SIN else "cos"

    @classmethod
    def from_label(cls, label: str) -> "TrigKind":
        if label == "sin":
            return cls.SIN
        if label == "cos":
            return cls.COS
        raise ValidationError(f"unknown trig kind {label!r}")


class PauliWord(NamedTuple):
    """An n-qubit tensor product of {I, X, Y, Z} as paired bitmasks."""

    n_qubits: int
    x_mask: int
    z_mask: int

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliWord":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_string(cls, letters: str) -> "PauliWord":
        """Parse a letter string; qubit 0 is the leftmost letter."""
        x = z = 0
        for q, ch in enumerate(letters):
            try:
                xb, zb = _LETTER_BITS[ch.upper()]
            except KeyError:
                raise ValidationError(f"invalid Pauli letter {ch!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(len(letters), x, z)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliWord":
        if not 0 <= qubit < n_qubits:
            raise ValidationError(f"qubit {qubit} out of range for n={n_qubits}")
        xb, zb = _LETTER_BITS[letter.upper()]
        return cls(n_qubits, xb << qubit, zb << qubit)

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[((self.x_mask >> qubit) & 1, (self.z_mask >> qubit) & 1)]

    def to_string(self) -> str:
        return "".join(self.letter(q) for q in range(self.n_qubits))

    @property
    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()


def weight(word: PauliWord) -> int:
    """Number of non-identity letters in the word."""
    return word.weight


class TrigMonomial(NamedTuple):
    """Canonical product of sin/cos factors with positive integer exponents.

    Internally a sorted flat tuple of factor codes ``param_id * 2 + kind``
    where a repeated code encodes its exponent; flat integer tuples keep
    hashing and insertion cheap in the propagation hot loop. The ``factors``
    view yields the canonical sorted (param_id, kind, exponent) triples; the
    frequency is the total number of trig factors, counting exponents.
    """

    codes: tuple[int, ...] = ()

    @property
    def frequency(self) -> int:
        return len(self.codes)

    @property
    def factors(self) -> tuple[tuple[int, TrigKind, int], ...]:
        return tuple(
            (code >> 1, TrigKind(code & 1), len(list(group)))
            for code, group in groupby(self.codes)
        )

    @classmethod
    def from_factors(cls, factors: Iterable[tuple[int, TrigKind, int]]) -> "TrigMonomial":
        codes: list[int] = []
        for pid, kind, exp in factors:
            codes.extend([pid * 2 + int(kind)] * exp)
        return cls(tuple(sorted(codes)))

    def times(self, param_id: int, kind: TrigKind) -> "TrigMonomial":
        code = param_id * 2 + int(kind)
        i = bisect_left(self.codes, code)
        return TrigMonomial(self.codes[:i] + (code,) + self.codes[i:])

    def exponent_of(self, param_id: int) -> int:
        """Total exponent (sin + cos) carried by one parameter."""
        return sum(1 for code in self.codes if code >> 1 == param_id)

    def to_json(self) -> list[list]:
        return [[pid, kind.label, exp] for pid, kind, exp in self.factors]

    @classmethod
    def from_json(cls, data: Iterable) -> "TrigMonomial":
        factors = []
        for entry in data:
            pid, label, exp = entry
            if not isinstance(pid, int) or not isinstance(exp, int) or exp < 1:
                raise ValidationError(f"invalid monomial factor {entry!r}")
            factors.append((pid, TrigKind.from_label(label), exp))
        if factors != sorted(factors, key=lambda f: (f[0], f[1])):
            raise ValidationError("monomial factors not in canonical order")
        keys = [(f[0], f[1]) for f in factors]
        if len(set(keys)) != len(keys):
            raise ValidationError("duplicate monomial factor keys")
        return cls.from_factors(factors)


MONOMIAL_ONE = TrigMonomial(())


def monomial_multiply(m: TrigMonomial, param_id: int, kind: TrigKind) -> TrigMonomial:
    """Multiply a monomial by sin(theta_i) or cos(theta_i); frequency rises by 1."""
    return m.times(param_id, kind)


class SymbolicTerm(NamedTuple):
    word: PauliWord
    monomial: TrigMonomial
    coeff: int


@dataclass
class TruncationMeta:
    """Bookkeeping carried by a propagated observable."""

    w_cut: int | None = None
    nu_cut: int | None = None
    discarded_by_weight: int = 0
    discarded_by_frequency: int = 0
    gate_count_processed: int = 0

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "TruncationMeta":
        return cls(**data)


def _check_coeff(coeff: int) -> None:
    if not -COEFF_LIMIT < coeff < COEFF_LIMIT:
        raise OverflowError(f"merged coefficient {coeff} exceeds the +-2^31 guard")


class PropagatedObservable:
    """Merged map (PauliWord, TrigMonomial) -> integer coefficient.

    Single-writer mutable; ``combine`` merges partial maps built on disjoint
    term partitions with exact integer arithmetic, so results are identical
    regardless of partitioning.
    """

    __slots__ = ("n_qubits", "terms", "meta")

    def __init__(self, n_qubits: int, meta: TruncationMeta | None = None):
        self.n_qubits = n_qubits
        self.terms: dict[tuple[PauliWord, TrigMonomial], int] = {}
        self.meta = meta if meta is not None else TruncationMeta()

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PropagatedObservable):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self.terms == other.terms

    def add(self, word: PauliWord, monomial: TrigMonomial, coeff: int) -> None:
        """Merge one term; like keys sum exactly, zero sums are removed."""
        if word.n_qubits != self.n_qubits:
            raise ValidationError(
                f"term acts on {word.n_qubits} qubits, observable on {self.n_qubits}"
            )
        if coeff == 0:
            return
        key = (word, monomial)
        total = self.terms.get(key, 0) + coeff
        if total == 0:
            del self.terms[key]
        else:
            _check_coeff(total)
            self.terms[key] = total

    def combine(self, other: "PropagatedObservable") -> None:
        if other.n_qubits != self.n_qubits:
            raise ValidationError("qubit count mismatch in combine")
        for (word, mono), coeff in other.terms.items():
            self.add(word, mono, coeff)

    def sorted_terms(self) -> list[SymbolicTerm]:
        """Terms in canonical order (letter string, then monomial)."""
        items = sorted(
            self.terms.items(), key=lambda kv: (kv[0][0].to_string(), kv[0][1].codes)
        )
        return [SymbolicTerm(w, m, c) for (w, m), c in items]

    def __iter__(self) -> Iterator[SymbolicTerm]:
        return iter(self.sorted_terms())

    # -- JSON Lines serialization ------------------------------------------

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            header = {"n_qubits": self.n_qubits, "meta": self.meta.to_json()}
            fh.write(json.dumps(header) + "\n")
            for term in self.sorted_terms():
                fh.write(
                    json.dumps(
                        {
                            "pauli": term.word.to_string(),
                            "monomial": term.monomial.to_json(),
                            "coeff": term.coeff,
                        }
                    )
                    + "\n"
                )

    @classmethod
    def read_jsonl(cls, path) -> "PropagatedObservable":
        with open(path) as fh:
            try:
                header = json.loads(fh.readline())
            except json.JSONDecodeError as exc:
                raise ValidationError(f"malformed JSONL header: {exc}") from None
            if "n_qubits" not in header:
                raise ValidationError("JSONL header missing field 'n_qubits'")
            meta = TruncationMeta.from_json(header.get("meta", {}))
            po = cls(header["n_qubits"], meta)
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(f"malformed JSONL line {lineno}: {exc}") from None
                for fld in ("pauli", "monomial", "coeff"):
                    if fld not in rec:
                        raise ValidationError(f"line {lineno} missing field {fld!r}")
                word = PauliWord.from_string(rec["pauli"])
                mono = TrigMonomial.from_json(rec["monomial"])
                if not isinstance(rec["coeff"], int):
                    raise ValidationError(f"line {lineno}: coeff must be an integer")
                po.add(word, mono, rec["coeff"])
            return po


def merge_into(acc: PropagatedObservable, term: SymbolicTerm) -> PropagatedObservable:
    """Merge one symbolic term into an accumulator (exact cancellation)."""
    acc.add(term.word, term.monomial, term.coeff)
    return acc
