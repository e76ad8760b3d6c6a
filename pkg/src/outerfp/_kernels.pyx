# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled ball kernels; same API and semantics as ``_kernels_py``."""
from libc.stdlib cimport malloc, realloc, free


cdef class Context:
    cdef public list initial, gtab, goff, gord, gid, elen
    cdef public long base
    cdef long[:] _initial, _gtab, _goff, _gord, _gid, _elen

    def __init__(self, initial, gtab, goff, gord, gid, elen, base):
        import array
        self.initial = list(initial)
        self.gtab = list(gtab)
        self.goff = list(goff)
        self.gord = list(gord)
        self.gid = list(gid)
        self.elen = list(elen)
        self.base = base
        self._initial = array.array("l", self.initial)
        self._gtab = array.array("l", self.gtab)
        self._goff = array.array("l", self.goff)
        self._gord = array.array("l", self.gord)
        self._gid = array.array("l", self.gid)
        self._elen = array.array("l", self.elen or [0])


cdef struct Stack:
    long *data
    Py_ssize_t n
    Py_ssize_t cap


cdef inline int _push(Stack *s, long x) except -1:
    cdef long *p
    if s.n == s.cap:
        s.cap = s.cap * 2 + 16
        p = <long *> realloc(s.data, s.cap * sizeof(long))
        if p == NULL:
            raise MemoryError()
        s.data = p
    s.data[s.n] = x
    s.n += 1
    return 0


cdef int _act_into(Context ctx, long[:] loop, long[:] label, Py_ssize_t lo, Py_ssize_t hi, Stack *s) except -1:
    cdef Py_ssize_t i
    cdef long v, e, d
    s.n = 0
    for i in range(loop.shape[0]):
        _push(s, loop[i])
    if s.n == 1:
        v = ctx.base
    else:
        v = ctx._initial[s.data[s.n - 2] ^ 1]
    s.data[s.n - 1] = ctx._gtab[ctx._goff[v] + s.data[s.n - 1] * ctx._gord[v] + label[lo]]
    i = lo + 1
    while i < hi:
        e = label[i]
        d = label[i + 1]
        if s.n >= 3 and s.data[s.n - 2] == (e ^ 1) and s.data[s.n - 1] == ctx._gid[v]:
            s.n -= 2
            if s.n == 1:
                v = ctx.base
            else:
                v = ctx._initial[s.data[s.n - 2] ^ 1]
            s.data[s.n - 1] = ctx._gtab[ctx._goff[v] + s.data[s.n - 1] * ctx._gord[v] + d]
        else:
            _push(s, e)
            _push(s, d)
            v = ctx._initial[e ^ 1]
        i += 2
    s.data[s.n - 1] = ctx._gid[v]
    return 0


def _as_long(seq):
    import array
    return array.array("l", seq)


def act(Context ctx, loop, label):
    cdef Stack s
    cdef long[:] lp = _as_long(loop)
    cdef long[:] lb = _as_long(label)
    s.data = NULL
    s.n = 0
    s.cap = 0
    try:
        _act_into(ctx, lp, lb, 0, lb.shape[0], &s)
        return tuple([s.data[i] for i in range(s.n)])
    finally:
        free(s.data)


def displacements(Context ctx, loop, flat, offsets):
    cdef Stack s
    cdef long[:] lp = _as_long(loop)
    cdef long[:] fl = _as_long(flat)
    cdef long[:] off = _as_long(offsets)
    cdef Py_ssize_t k, lo, hi, j, t, n
    cdef long dist, depth
    cdef long[:] elen = ctx._elen
    nlab = off.shape[0] - 1
    dists = [0] * nlab
    depths = [0] * nlab
    s.data = NULL
    s.n = 0
    s.cap = 0
    try:
        for k in range(nlab):
            lo = off[k]
            hi = off[k + 1]
            _act_into(ctx, lp, fl, lo, hi, &s)
            n = s.n
            j = 0
            while j + 1 < n and lo + j + 1 < hi and s.data[j] == fl[lo + j] and s.data[j + 1] == fl[lo + j + 1]:
                j += 2
            dist = 0
            depth = 0
            t = 1
            while t < n:
                depth += elen[s.data[t]]
                if t > j:
                    dist += elen[s.data[t]]
                t += 2
            t = lo + j + 1
            while t < hi:
                dist += elen[fl[t]]
                t += 2
            dists[k] = dist
            depths[k] = depth
        return dists, depths
    finally:
        free(s.data)
