"""Pure-Python DRESS iteration; the fallback when the compiled core is unavailable.

Operation-for-operation twin of ``_ckernel``. ``math.fsum`` is correctly
rounded, which is what makes results independent of summation order and
identical to the compiled path.
"""
from __future__ import annotations

import math

import numpy as np


def _lists(st):
    cached = getattr(st, "_pylists", None)
    if cached is None:
        cached = tuple(
            getattr(st, name).tolist()
            for name in ("eu", "ev", "vptr", "vedge", "tptr", "tue", "tve", "tx")
        )
        st._pylists = cached
    return cached


def _step(st, mask, d, loops):
    eu, ev, vptr, vedge, tptr, tue, tve, tx = _lists(st)
    fsum, sqrt = math.fsum, math.sqrt
    d_out = list(d)
    loops_out = list(loops)
    norms = [0.0] * st.n
    delta = 0.0
    for u in range(st.n):
        if mask[u]:
            continue
        terms = [loops[u]]
        for p in range(vptr[u], vptr[u + 1]):
            e = vedge[p]
            if not (mask[eu[e]] or mask[ev[e]]):
                terms.append(d[e])
        s = fsum(terms)
        norms[u] = s  # squared norm, see the compiled kernel
        val = (2.0 * s) / sqrt(s * s)
        loops_out[u] = val
        if abs(val - loops[u]) > delta:
            delta = abs(val - loops[u])
    for e in range(st.m):
        u, v = eu[e], ev[e]
        if mask[u] or mask[v]:
            continue
        de = d[e]
        terms = [loops[u], de, de, loops[v]]
        for p in range(tptr[e], tptr[e + 1]):
            if not mask[tx[p]]:
                terms.append(d[tue[p]])
                terms.append(d[tve[p]])
        val = fsum(terms) / sqrt(norms[u] * norms[v])
        d_out[e] = val
        if abs(val - de) > delta:
            delta = abs(val - de)
    return d_out, loops_out, delta


def step(st, mask, d, loops):
    """One synchronous update; returns ``(d_new, loops_new, max_change)``."""
    d_out, loops_out, delta = _step(
        st, np.asarray(mask, dtype=np.uint8).tolist(),
        np.asarray(d, dtype=np.float64).tolist(),
        np.asarray(loops, dtype=np.float64).tolist(),
    )
    return np.array(d_out, dtype=np.float64), np.array(loops_out, dtype=np.float64), delta


def run(st, mask, d, loops, eps, max_iter):
    """Iterate until the max change drops below ``eps``; see ``_ckernel.run``."""
    mask = np.asarray(mask, dtype=np.uint8).tolist()
    d = np.asarray(d, dtype=np.float64).tolist()
    loops = np.asarray(loops, dtype=np.float64).tolist()
    it = 0
    delta = 0.0
    while it < max_iter:
        d, loops, delta = _step(st, mask, d, loops)
        it += 1
        if delta < eps:
            break
    return np.array(d, dtype=np.float64), np.array(loops, dtype=np.float64), it, delta
