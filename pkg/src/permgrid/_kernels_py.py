"""Pure-Python containment kernels.

Same algorithm and signatures as the compiled ``_kernels`` extension; used
whenever the extension is not built.
"""

from __future__ import annotations


def _anchors(pattern):
    # For pattern letter j, the earlier letters holding the nearest smaller and
    # nearest larger values; checking only these two keeps the embedding
    # order-isomorphic.
    k = len(pattern)
    lo = [-1] * k
    hi = [-1] * k
    for j in range(k):
        best_lo = best_hi = -1
        for jj in range(j):
            if pattern[jj] < pattern[j]:
                if best_lo < 0 or pattern[jj] > pattern[best_lo]:
                    best_lo = jj
            elif best_hi < 0 or pattern[jj] < pattern[best_hi]:
                best_hi = jj
        lo[j] = best_lo
        hi[j] = best_hi
    return lo, hi


def _search(host, k, lo, hi, pin_last):
    n = len(host)
    if k == 0:
        return True
    if k > n:
        return False
    chosen = [0] * k  # host values placed so far
    pos = [0] * k
    j = 0
    start = 0
    last = n - 1
    while True:
        # the last pattern letter may be pinned to the last host position
        if pin_last and j == k - 1:
            stop = n
            if start < last:
                start = last
        else:
            # room is left for the remaining letters either way
            stop = n - (k - 1 - j)
        lo_j = lo[j]
        hi_j = hi[j]
        low = chosen[lo_j] if lo_j >= 0 else 0
        high = chosen[hi_j] if hi_j >= 0 else 1 << 62
        i = start
        while i < stop:
            v = host[i]
            if low < v < high:
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


def contains(host, pattern):
    """True iff some subsequence of ``host`` is order-isomorphic to ``pattern``."""
    lo, hi = _anchors(pattern)
    return _search(tuple(host), len(pattern), lo, hi, False)


def contains_ending_last(host, pattern):
    """Containment restricted to occurrences using the last entry of ``host``."""
    lo, hi = _anchors(pattern)
    return _search(tuple(host), len(pattern), lo, hi, True)


def extend_level(parents, patterns):
    """Children of each parent obtained by appending a new last value.

    A child is kept when no pattern occurs through its last entry; since every
    parent already avoids the patterns this is exactly avoidance of the child.
    """
    prepared = [(len(p), *_anchors(p)) for p in patterns]
    out = []
    for parent in parents:
        m = len(parent) + 1
        for v in range(1, m + 1):
            child = tuple(x + 1 if x >= v else x for x in parent) + (v,)
            for k, lo, hi in prepared:
                if k <= m and _search(child, k, lo, hi, True):
                    break
            else:
                out.append(child)
    return out
