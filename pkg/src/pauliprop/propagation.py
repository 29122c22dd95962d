"""Backward propagation of observables with joint weight/frequency truncation.

Gates are processed in reverse circuit order (each application conjugates by
one more gate of U^dag O U). Truncation is applied immediately after each
gate application, not as a final filter: a branch whose word weight strictly
exceeds ``w_cut`` or whose monomial frequency strictly exceeds ``nu_cut`` is
deleted on the spot and prevented from branching further. A term sitting
exactly at a cutoff survives.

The hot loop works on raw (x_mask, z_mask, factor-tuple) keys; results are
wrapped into the public value types only once at the end. Integer merging is
exact, so the final map is independent of iteration order and of any
partitioning of the term map.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from bisect import bisect_left

from .errors import TermExplosionError, ValidationError
from .models import Circuit
from .pauli import (
    COEFF_LIMIT,
    PauliWord,
    PropagatedObservable,
    TrigKind,
    TrigMonomial,
    TruncationMeta,
)

_SIN = int(TrigKind.SIN)
_COS = int(TrigKind.COS)

# (x_bit, z_bit) of the rotation axis and sin-branch signs per input letter,
# keyed by axis; see gates.py for the table these encode.
_AXIS_BITS = {"x": (1, 0), "y": (1, 1), "z": (0, 1)}
_SIN_SIGNS = {
    "x": {(1, 1): -1, (0, 1): +1},
    "y": {(1, 0): +1, (0, 1): -1},
    "z": {(1, 0): -1, (1, 1): +1},
}


@dataclass(frozen=True)
class TruncationConfig:
    """Joint truncation thresholds plus a term-count safety cap."""

    w_cut: int | None = None
    nu_cut: int | None = None
    max_terms: int = 50_000_000

    def __post_init__(self):
        if self.w_cut is not None and self.w_cut < 1:
            raise ValidationError("w_cut must be >= 1 when finite")
        if self.nu_cut is not None and self.nu_cut < 0:
            raise ValidationError("nu_cut must be >= 0 when finite")
        if self.max_terms < 1:
            raise ValidationError("max_terms must be >= 1")


def _merge(out: dict, key, coeff: int) -> None:
    prev = out.get(key)
    if prev is None:
        out[key] = coeff
    else:
        total = prev + coeff
        if total:
            if not -COEFF_LIMIT < total < COEFF_LIMIT:
                raise OverflowError(f"coefficient {total} exceeds the +-2^31 guard")
            out[key] = total
        else:
            del out[key]


def propagate(
    observable: Iterable[tuple[int, PauliWord]],
    circuit: Circuit,
    cfg: TruncationConfig | None = None,
) -> PropagatedObservable:
    """Propagate a Pauli-sum observable through a circuit, O -> U^dag O U.

    ``observable`` is a list of (integer coefficient, PauliWord) pairs sharing
    the circuit's qubit count. Raises TermExplosionError if the merged term
    count ever exceeds ``cfg.max_terms``.
    """
    if cfg is None:
        cfg = TruncationConfig()
    n = circuit.n_qubits
    w_cut, nu_cut, max_terms = cfg.w_cut, cfg.nu_cut, cfg.max_terms
    meta = TruncationMeta(w_cut=w_cut, nu_cut=nu_cut)

    terms: dict[tuple[int, int, tuple], int] = {}
    for coeff, word in observable:
        if word.n_qubits != n:
            raise ValidationError(
                f"observable word on {word.n_qubits} qubits, circuit on {n}"
            )
        if not isinstance(coeff, int):
            raise ValidationError("observable coefficients must be integers")
        if w_cut is not None and word.weight > w_cut:
            meta.discarded_by_weight += 1
            continue
        _merge(terms, (word.x_mask, word.z_mask, ()), coeff)

    for gate in reversed(circuit.gates):
        out: dict = {}
        out_get = out.get
        if gate.is_rotation:
            q = gate.qubit
            sin_code = gate.param * 2 + _SIN
            cos_code = gate.param * 2 + _COS
            ax, az = _AXIS_BITS[gate.axis]
            signs = _SIN_SIGNS[gate.axis]
            xflip, zflip = ax << q, az << q
            for key, coeff in terms.items():
                x, z, fac = key
                xb = (x >> q) & 1
                zb = (z >> q) & 1
                if (xb | zb) == 0 or (xb == ax and zb == az):
                    prev = out_get(key)
                    if prev is None:
                        out[key] = coeff
                    else:
                        total = prev + coeff
                        if total:
                            out[key] = total
                        else:
                            del out[key]
                    continue
                # both branches gain one frequency; check the cutoff once
                if nu_cut is not None and len(fac) >= nu_cut:
                    meta.discarded_by_frequency += 2
                    continue
                i = bisect_left(fac, cos_code)
                ckey = (x, z, fac[:i] + (cos_code,) + fac[i:])
                prev = out_get(ckey)
                if prev is None:
                    out[ckey] = coeff
                else:
                    total = prev + coeff
                    if total:
                        out[ckey] = total
                    else:
                        del out[ckey]
                scoeff = coeff if signs[(xb, zb)] > 0 else -coeff
                i = bisect_left(fac, sin_code)
                skey = (x ^ xflip, z ^ zflip, fac[:i] + (sin_code,) + fac[i:])
                prev = out_get(skey)
                if prev is None:
                    out[skey] = scoeff
                else:
                    total = prev + scoeff
                    if total:
                        out[skey] = total
                    else:
                        del out[skey]
        else:
            c, t = gate.control, gate.target
            for key, coeff in terms.items():
                x, z, fac = key
                xc = (x >> c) & 1
                zt = (z >> t) & 1
                if xc | zt:
                    new_x = x ^ (xc << t)
                    new_z = z ^ (zt << c)
                    if w_cut is not None and (new_x | new_z).bit_count() > w_cut:
                        meta.discarded_by_weight += 1
                        continue
                    if xc and zt and (((x >> t) ^ (z >> c) ^ 1) & 1):
                        coeff = -coeff
                    key = (new_x, new_z, fac)
                prev = out_get(key)
                if prev is None:
                    out[key] = coeff
                else:
                    total = prev + coeff
                    if total:
                        out[key] = total
                    else:
                        del out[key]
        terms = out
        meta.gate_count_processed += 1
        if len(terms) > max_terms:
            raise TermExplosionError(
                f"term count {len(terms)} exceeds max_terms={max_terms} "
                f"after {meta.gate_count_processed} gates"
            )
        if terms and max(map(abs, terms.values())) >= COEFF_LIMIT:
            raise OverflowError("merged coefficient exceeds the +-2^31 guard")

    po = PropagatedObservable(n, meta)
    po.terms = {
        (PauliWord(n, x, z), TrigMonomial(fac)): coeff
        for (x, z, fac), coeff in terms.items()
    }
    return po


@dataclass
class ExpectationPolynomial:
    """Trimmed observable: a plain trigonometric polynomial of the parameters.

    Only Z/I words contribute after projecting on |0...0>, each with
    <0|Z|0> = +1, so every term is just (monomial, integer coefficient).
    Terms are kept in canonical sorted order for reproducible summation.
    """

    n_params: int
    terms: tuple[tuple[TrigMonomial, int], ...]
    meta: TruncationMeta

    def __post_init__(self):
        self.terms = tuple(sorted(self.terms, key=lambda tc: tc[0].codes))

    @property
    def coeff_abs_sum(self) -> int:
        return sum(abs(c) for _, c in self.terms)


def trim(po: PropagatedObservable, n_params: int | None = None) -> ExpectationPolynomial:
    """Project on |0>^n: keep exactly the x_mask = 0 words, coefficients unchanged."""
    kept = [
        (mono, coeff) for (word, mono), coeff in po.terms.items() if word.x_mask == 0
    ]
    if n_params is None:
        n_params = 0
        for mono, _ in kept:
            for pid, _, _ in mono.factors:
                if pid + 1 > n_params:
                    n_params = pid + 1
    return ExpectationPolynomial(n_params=n_params, terms=tuple(kept), meta=replace(po.meta))


def poly_linear_combination(
    pairs: Sequence[tuple[int, ExpectationPolynomial]],
) -> ExpectationPolynomial:
    """Exact integer-weighted sum of polynomials (like monomials merged)."""
    if not pairs:
        raise ValidationError("need at least one polynomial")
    acc: dict[TrigMonomial, int] = {}
    for scale, poly in pairs:
        for mono, coeff in poly.terms:
            total = acc.get(mono, 0) + scale * coeff
            if total:
                acc[mono] = total
            elif mono in acc:
                del acc[mono]
    n_params = max(p.n_params for _, p in pairs)
    return ExpectationPolynomial(
        n_params=n_params, terms=tuple(acc.items()), meta=TruncationMeta()
    )


@dataclass
class TermStatistics:
    weight_histogram: dict[int, int]
    freq_histogram: dict[int, int]
    surviving_weight_histogram: dict[int, int]
    surviving_freq_histogram: dict[int, int]


def term_statistics(po: PropagatedObservable) -> TermStatistics:
    """Weight/frequency histograms; 'surviving' counts only x_mask = 0 terms."""
    wh: dict[int, int] = {}
    fh: dict[int, int] = {}
    swh: dict[int, int] = {}
    sfh: dict[int, int] = {}
    for (word, mono), _ in po.terms.items():
        w = word.weight
        nu = mono.frequency
        wh[w] = wh.get(w, 0) + 1
        fh[nu] = fh.get(nu, 0) + 1
        if word.x_mask == 0:
            swh[w] = swh.get(w, 0) + 1
            sfh[nu] = sfh.get(nu, 0) + 1
    return TermStatistics(wh, fh, swh, sfh)
