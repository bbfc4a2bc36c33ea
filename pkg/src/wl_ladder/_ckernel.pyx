# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled DRESS iteration over a masked parent graph.

Arithmetic mirrors ``_pykernel`` operation for operation: every sum is
correctly rounded (the ``math.fsum`` algorithm), so both backends return
bit-identical values.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int32_t i32
ctypedef cnp.uint8_t u8


cdef double exact_sum(const double* xs, int count, double* partials) noexcept nogil:
    # Shewchuk partials followed by the half-even correction used by math.fsum;
    # inputs are finite, so no special-value handling.
    cdef int i, j, k, np_ = 0
    cdef double x, y, t, hi, lo, yr
    for i in range(count):
        x = xs[i]
        k = 0
        for j in range(np_):
            y = partials[j]
            if fabs(x) < fabs(y):
                t = x
                x = y
                y = t
            hi = x + y
            lo = y - (hi - x)
            if lo != 0.0:
                partials[k] = lo
                k += 1
            x = hi
        np_ = k + 1
        partials[k] = x
    if np_ == 0:
        return 0.0
    np_ -= 1
    hi = partials[np_]
    lo = 0.0
    while np_ > 0:
        x = hi
        np_ -= 1
        y = partials[np_]
        hi = x + y
        yr = hi - x
        lo = y - yr
        if lo != 0.0:
            break
    if np_ > 0 and ((lo < 0.0 and partials[np_ - 1] < 0.0) or (lo > 0.0 and partials[np_ - 1] > 0.0)):
        y = lo * 2.0
        x = hi + y
        yr = x - hi
        if y == yr:
            hi = x
    return hi


cdef double _step(int n, int m,
                  const i32* eu, const i32* ev,
                  const i32* vptr, const i32* vedge,
                  const i32* tptr, const i32* tue, const i32* tve, const i32* tx,
                  const u8* mask,
                  const double* d, const double* loops,
                  double* d_out, double* loops_out,
                  double* norms, double* buf, double* partials) noexcept nogil:
    cdef int u, v, e, p, c, x
    cdef double s, val, delta = 0.0
    for u in range(n):
        if mask[u]:
            continue
        c = 0
        buf[c] = loops[u]
        c += 1
        for p in range(vptr[u], vptr[u + 1]):
            e = vedge[p]
            if mask[eu[e]] or mask[ev[e]]:
                continue
            buf[c] = d[e]
            c += 1
        s = exact_sum(buf, c, partials)
        # squared norm; sqrt(a * b) keeps closed twins at exactly 2
        norms[u] = s
        val = (2.0 * s) / sqrt(s * s)
        loops_out[u] = val
        if fabs(val - loops[u]) > delta:
            delta = fabs(val - loops[u])
    for e in range(m):
        u = eu[e]
        v = ev[e]
        if mask[u] or mask[v]:
            continue
        buf[0] = loops[u]
        buf[1] = d[e]
        buf[2] = d[e]
        buf[3] = loops[v]
        c = 4
        for p in range(tptr[e], tptr[e + 1]):
            x = tx[p]
            if mask[x]:
                continue
            buf[c] = d[tue[p]]
            buf[c + 1] = d[tve[p]]
            c += 2
        s = exact_sum(buf, c, partials)
        val = s / sqrt(norms[u] * norms[v])
        d_out[e] = val
        if fabs(val - d[e]) > delta:
            delta = fabs(val - d[e])
    return delta


cdef class _Buffers:
    """Pointers into the structure arrays plus scratch space for one call."""
    cdef int n, m, cap
    cdef object keep
    cdef const i32* eu
    cdef const i32* ev
    cdef const i32* vptr
    cdef const i32* vedge
    cdef const i32* tptr
    cdef const i32* tue
    cdef const i32* tve
    cdef const i32* tx
    cdef double* norms
    cdef double* buf
    cdef double* partials

    def __cinit__(self, st):
        self.n = st.n
        self.m = st.m
        self.cap = st.buffer_size
        # one padding slot keeps every pointer valid for empty arrays
        arrs = [np.ascontiguousarray(np.append(getattr(st, name), 0), dtype=np.int32)
                for name in ("eu", "ev", "vptr", "vedge", "tptr", "tue", "tve", "tx")]
        self.keep = arrs
        self.eu = <const i32*> cnp.PyArray_DATA(arrs[0])
        self.ev = <const i32*> cnp.PyArray_DATA(arrs[1])
        self.vptr = <const i32*> cnp.PyArray_DATA(arrs[2])
        self.vedge = <const i32*> cnp.PyArray_DATA(arrs[3])
        self.tptr = <const i32*> cnp.PyArray_DATA(arrs[4])
        self.tue = <const i32*> cnp.PyArray_DATA(arrs[5])
        self.tve = <const i32*> cnp.PyArray_DATA(arrs[6])
        self.tx = <const i32*> cnp.PyArray_DATA(arrs[7])
        self.norms = <double*> malloc((self.n + 1) * sizeof(double))
        self.buf = <double*> malloc((self.cap + 1) * sizeof(double))
        self.partials = <double*> malloc((self.cap + 2) * sizeof(double))
        if self.norms == NULL or self.buf == NULL or self.partials == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.norms)
        free(self.buf)
        free(self.partials)


def _bufs(st):
    b = getattr(st, "_cbuffers", None)
    if b is None:
        b = _Buffers(st)
        st._cbuffers = b
    return b


def _padded(arr, dtype):
    return np.ascontiguousarray(np.append(arr, np.zeros(1, dtype=dtype)), dtype=dtype)


def step(st, mask, d, loops):
    """One synchronous update; returns ``(d_new, loops_new, max_change)``."""
    cdef _Buffers b = _bufs(st)
    mk = _padded(mask, np.uint8)
    din = _padded(d, np.float64)
    lin = _padded(loops, np.float64)
    dout = din.copy()
    lout = lin.copy()
    cdef double delta
    delta = _step(b.n, b.m, b.eu, b.ev, b.vptr, b.vedge, b.tptr, b.tue, b.tve, b.tx,
                  <const u8*> cnp.PyArray_DATA(mk),
                  <const double*> cnp.PyArray_DATA(din), <const double*> cnp.PyArray_DATA(lin),
                  <double*> cnp.PyArray_DATA(dout), <double*> cnp.PyArray_DATA(lout),
                  b.norms, b.buf, b.partials)
    return dout[:b.m].copy(), lout[:b.n].copy(), delta


def run(st, mask, d, loops, double eps, int max_iter):
    """Iterate from ``(d, loops)`` until the max change drops below ``eps``.

    Returns ``(d, loops, iterations, final_delta)`` holding the last iterate.
    """
    cdef _Buffers b = _bufs(st)
    mk = _padded(mask, np.uint8)
    da = _padded(d, np.float64)
    la = _padded(loops, np.float64)
    db = da.copy()
    lb = la.copy()
    cdef const u8* mp = <const u8*> cnp.PyArray_DATA(mk)
    cdef double* pa_d = <double*> cnp.PyArray_DATA(da)
    cdef double* pa_l = <double*> cnp.PyArray_DATA(la)
    cdef double* pb_d = <double*> cnp.PyArray_DATA(db)
    cdef double* pb_l = <double*> cnp.PyArray_DATA(lb)
    cdef double* tmp
    cdef int it = 0
    cdef double delta = 0.0
    with nogil:
        while it < max_iter:
            delta = _step(b.n, b.m, b.eu, b.ev, b.vptr, b.vedge, b.tptr, b.tue, b.tve, b.tx,
                          mp, pa_d, pa_l, pb_d, pb_l, b.norms, b.buf, b.partials)
            it += 1
            tmp = pa_d
            pa_d = pb_d
            pb_d = tmp
            tmp = pa_l
            pa_l = pb_l
            pb_l = tmp
            if delta < eps:
                break
    if it % 2 == 1:
        da, la = db, lb
    return da[:b.m].copy(), la[:b.n].copy(), it, delta
