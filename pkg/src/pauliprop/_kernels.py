"""Numba kernels for polynomial evaluation and differentiation.

Polynomials arrive flattened: per-term coefficients plus a CSR-style factor
list (offsets into parallel param-id / kind / exponent arrays). Kind 1 is
cosine, kind 0 is sine. Summation order is the canonical term order, so
serial results are bit-reproducible; the batch kernel parallelizes over
samples only, which leaves each per-sample sum identical to a serial run.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def eval_single(coeffs, offs, pids, kinds, exps, sin_t, cos_t):
    total = 0.0
    for t in range(coeffs.shape[0]):
        v = coeffs[t]
        for k in range(offs[t], offs[t + 1]):
            base = cos_t[pids[k]] if kinds[k] == 1 else sin_t[pids[k]]
            v *= base ** exps[k]
        total += v
    return total


@njit(cache=True, parallel=True)
def eval_batch(coeffs, offs, pids, kinds, exps, sin_m, cos_m, out):
    for s in prange(sin_m.shape[0]):
        total = 0.0
        for t in range(coeffs.shape[0]):
            v = coeffs[t]
            for k in range(offs[t], offs[t + 1]):
                base = cos_m[s, pids[k]] if kinds[k] == 1 else sin_m[s, pids[k]]
                v *= base ** exps[k]
            total += v
        out[s] = total


@njit(cache=True)
def grad_single(coeffs, offs, pids, kinds, exps, sin_t, cos_t, grad):
    # Per-term prefix/suffix products give every "product excluding factor k"
    # in O(#factors), avoiding division (sin/cos may vanish).
    grad[:] = 0.0
    scratch_vals = np.empty(64)
    scratch_pre = np.empty(64)
    for t in range(coeffs.shape[0]):
        lo = offs[t]
        m = offs[t + 1] - lo
        if m == 0:
            continue
        vals = scratch_vals if m <= 64 else np.empty(m)
        pre = scratch_pre if m <= 64 else np.empty(m)
        running = 1.0
        for i in range(m):
            k = lo + i
            p = pids[k]
            base = cos_t[p] if kinds[k] == 1 else sin_t[p]
            vals[i] = base ** exps[k]
            pre[i] = running
            running *= vals[i]
        suf = 1.0
        for i in range(m - 1, -1, -1):
            k = lo + i
            p = pids[k]
            e = exps[k]
            if kinds[k] == 1:
                dval = -e * cos_t[p] ** (e - 1) * sin_t[p]
            else:
                dval = e * sin_t[p] ** (e - 1) * cos_t[p]
            grad[p] += coeffs[t] * pre[i] * suf * dval
            suf *= vals[i]


@njit(cache=True)
def eval_term_abs_batch(coeffs, offs, pids, kinds, exps, sin_m, cos_m, out):
    """Mean over samples of |term value|, one entry per term."""
    n_samples = sin_m.shape[0]
    for t in range(coeffs.shape[0]):
        acc = 0.0
        for s in range(n_samples):
            v = coeffs[t]
            for k in range(offs[t], offs[t + 1]):
                base = cos_m[s, pids[k]] if kinds[k] == 1 else sin_m[s, pids[k]]
                v *= base ** exps[k]
            acc += abs(v)
        out[t] = acc / n_samples
