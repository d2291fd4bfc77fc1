"""Compiled Milnor product used by the algebra table.

Results are packed keys: entry ``n`` of the output sequence occupies bits
``8(n-1) .. 8n-1``, which is exact for degrees below 256.
"""

from __future__ import annotations

import numpy as np
from numba import njit

KEY_BITS = 8


@njit(cache=True)
def product_keys(r, s):
    """Packed keys of all Milnor matrices contributing to ``Sq(r) Sq(s)`` (with repeats)."""
    k = r.shape[0]
    m = s.shape[0]
    npos = k * m
    pi = np.empty(npos, np.int64)
    pj = np.empty(npos, np.int64)
    p = 0
    for i in range(1, k + 1):
        for j in range(m, 0, -1):
            pi[p] = i
            pj[p] = j
            p += 1
    vals = np.full(npos, -1, np.int64)
    diag = np.zeros(k + m + 1, np.int64)
    rem = r.copy()
    col = s.copy()
    x0 = np.zeros(k + 1, np.int64)
    out = []
    p = 0
    while p >= 0:
        if p == npos:
            ok = True
            for j in range(1, m + 1):
                if diag[j] & col[j - 1]:
                    ok = False
                    break
            if ok:
                key = 0
                for n in range(1, k + m + 1):
                    tn = diag[n]
                    if n <= m:
                        tn |= col[n - 1]
                    key |= tn << (KEY_BITS * (n - 1))
                out.append(key)
            p -= 1
            continue
        i = pi[p]
        j = pj[p]
        n = i + j
        v = vals[p]
        if v >= 0:
            if j == 1:
                diag[i] ^= x0[i]
            diag[n] ^= v
            rem[i - 1] += v << j
            col[j - 1] += v
        v += 1
        cap = min(rem[i - 1] >> j, col[j - 1])
        found = False
        while v <= cap:
            if diag[n] & v == 0:
                if j == 1:
                    x = rem[i - 1] - (v << 1)
                    if diag[i] & x == 0:
                        diag[n] |= v
                        rem[i - 1] -= v << j
                        col[j - 1] -= v
                        x0[i] = x
                        diag[i] |= x
                        found = True
                        break
                else:
                    diag[n] |= v
                    rem[i - 1] -= v << j
                    col[j - 1] -= v
                    found = True
                    break
            v += 1
        if found:
            vals[p] = v
            p += 1
        else:
            vals[p] = -1
            p -= 1
    res = np.empty(len(out), np.int64)
    for q in range(len(out)):
        res[q] = out[q]
    return res


def pack(seq) -> int:
    key = 0
    for n, t in enumerate(seq):
        key |= t << (KEY_BITS * n)
    return key


@njit(cache=True)
def product_indices(r, s, sorted_keys, positions):
    """Basis indices (in the target degree) of ``Sq(r) Sq(s)``, odd multiplicities only."""
    keys = np.sort(product_keys(r, s))
    out = []
    q = 0
    n = keys.shape[0]
    while q < n:
        e = q
        while e < n and keys[e] == keys[q]:
            e += 1
        if (e - q) & 1:
            out.append(positions[np.searchsorted(sorted_keys, keys[q])])
        q = e
    res = np.empty(len(out), np.int64)
    for i in range(len(out)):
        res[i] = out[i]
    return res
