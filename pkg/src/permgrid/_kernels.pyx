# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled containment kernels; mirrors ``_kernels_py`` exactly."""

from libc.stdlib cimport malloc, free


cdef void _anchors(long *pat, int k, int *lo, int *hi):
    cdef int j, jj, best_lo, best_hi
    for j in range(k):
        best_lo = -1
        best_hi = -1
        for jj in range(j):
            if pat[jj] < pat[j]:
                if best_lo < 0 or pat[jj] > pat[best_lo]:
                    best_lo = jj
            elif best_hi < 0 or pat[jj] < pat[best_hi]:
                best_hi = jj
        lo[j] = best_lo
        hi[j] = best_hi


cdef bint _search(long *host, int n, int k, int *lo, int *hi,
                  long *chosen, int *pos, bint pin_last) nogil:
    cdef int j = 0, start = 0, stop, i, last = n - 1
    cdef long low, high, v
    if k == 0:
        return True
    if k > n:
        return False
    while True:
        if pin_last and j == k - 1:
            stop = n
            if start < last:
                start = last
        else:
            stop = n - (k - 1 - j)
        low = chosen[lo[j]] if lo[j] >= 0 else 0
        high = chosen[hi[j]] if hi[j] >= 0 else (<long>1 << 62)
        i = start
        while i < stop:
            v = host[i]
            if low < v and v < high:
                break
            i += 1
        if i < stop:
            chosen[j] = host[i]
            pos[j] = i
            if j == k - 1:
                return True
            j += 1
            start = i + 1
        else:
            j -= 1
            if j < 0:
                return False
            start = pos[j] + 1


cdef class _Pattern:
    cdef long *values
    cdef int *lo
    cdef int *hi
    cdef long *chosen
    cdef int *pos
    cdef int k

    def __cinit__(self, pattern):
        cdef int j
        self.k = len(pattern)
        size = self.k if self.k > 0 else 1
        self.values = <long *>malloc(size * sizeof(long))
        self.lo = <int *>malloc(size * sizeof(int))
        self.hi = <int *>malloc(size * sizeof(int))
        self.chosen = <long *>malloc(size * sizeof(long))
        self.pos = <int *>malloc(size * sizeof(int))
        if not (self.values and self.lo and self.hi and self.chosen and self.pos):
            raise MemoryError()
        for j in range(self.k):
            self.values[j] = pattern[j]
        _anchors(self.values, self.k, self.lo, self.hi)

    def __dealloc__(self):
        free(self.values)
        free(self.lo)
        free(self.hi)
        free(self.chosen)
        free(self.pos)

    cdef bint search(self, long *host, int n, bint pin_last):
        return _search(host, n, self.k, self.lo, self.hi, self.chosen, self.pos, pin_last)


cdef bint _run(host, pattern, bint pin_last) except -1:
    cdef int n = len(host), i
    cdef _Pattern pat = _Pattern(pattern)
    cdef long *buf = <long *>malloc((n if n > 0 else 1) * sizeof(long))
    if not buf:
        raise MemoryError()
    try:
        for i in range(n):
            buf[i] = host[i]
        return pat.search(buf, n, pin_last)
    finally:
        free(buf)


def contains(host, pattern):
    """True iff some subsequence of ``host`` is order-isomorphic to ``pattern``."""
    return _run(host, pattern, False)


def contains_ending_last(host, pattern):
    """Containment restricted to occurrences using the last entry of ``host``."""
    return _run(host, pattern, True)


def extend_level(parents, patterns):
    """Children of each parent obtained by appending a new last value, pruned on a pattern hit."""
    cdef list pats = [_Pattern(p) for p in patterns]
    cdef list out = []
    cdef _Pattern pat
    cdef int m, v, i, x
    cdef long buf[256]
    cdef bint hit
    for parent in parents:
        m = len(parent) + 1
        if m > 256:
            raise ValueError("permutation too long for the extension kernel")
        for v in range(1, m + 1):
            for i in range(m - 1):
                x = parent[i]
                buf[i] = x + 1 if x >= v else x
            buf[m - 1] = v
            hit = False
            for pat in pats:
                if pat.k <= m and pat.search(buf, m, True):
                    hit = True
                    break
            if not hit:
                out.append(tuple([buf[i] for i in range(m)]))
    return out
