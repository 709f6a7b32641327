# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contract as ``mwmsr._pykernels``.

Masks are limited to 63 bits (hitting sets) or 64 bits (packings, tables).
"""

from array import array

from libc.stdlib cimport free, malloc
from libc.stdint cimport int64_t, uint8_t, uint64_t


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_clzll(unsigned long long) nogil


cdef inline int _top(uint64_t x) nogil:
    return 63 - __builtin_clzll(x)


cdef uint64_t* _to_c(object seq, Py_ssize_t* n_out) except NULL:
    cdef Py_ssize_t n = len(seq), k
    cdef uint64_t* buf = <uint64_t*> malloc((n + 1) * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    for k in range(n):
        buf[k] = seq[k]
    n_out[0] = n
    return buf


cdef int64_t _hit(const uint64_t* masks, Py_ssize_t n, int start, int k, uint64_t chosen) nogil:
    cdef Py_ssize_t t
    cdef int bound = 64, b, top
    cdef uint64_t uni = 0
    cdef int64_t found
    for t in range(n):
        if masks[t] & chosen == 0:
            uni |= masks[t]
            top = _top(masks[t])
            if top < bound:
                bound = top
    if uni == 0:
        return <int64_t> chosen
    if k == 0:
        return -1
    for b in range(start, bound + 1):
        if (uni >> b) & 1 == 0:
            continue
        found = _hit(masks, n, b + 1, k - 1, chosen | ((<uint64_t> 1) << b))
        if found >= 0:
            return found
    return -1


cdef int64_t _min_hit(const uint64_t* masks, Py_ssize_t n, int limit) nogil:
    cdef Py_ssize_t t
    cdef int k
    cdef int64_t found
    if n == 0:
        return 0
    for t in range(n):
        if masks[t] == 0:
            return -1
    if limit > n:
        limit = <int> n
    for k in range(limit + 1):
        found = _hit(masks, n, 0, k, 0)
        if found >= 0:
            return found
    return -1


def min_hitting_set(masks, int limit):
    cdef Py_ssize_t n
    cdef uint64_t* buf = _to_c(masks, &n)
    cdef int64_t res
    try:
        with nogil:
            res = _min_hit(buf, n, limit)
    finally:
        free(buf)
    return res


def longest_prefix_within(masks, int limit):
    cdef Py_ssize_t n, lo = 0, hi, mid
    cdef uint64_t* buf = _to_c(masks, &n)
    try:
        hi = n
        with nogil:
            while lo < hi:
                mid = (lo + hi + 1) // 2
                if _min_hit(buf, mid, limit) >= 0:
                    lo = mid
                else:
                    hi = mid - 1
    finally:
        free(buf)
    return lo


cdef int _pack(const uint64_t* c, int n, int idx, uint64_t used, int count, int cap, int best) nogil:
    cdef int j
    if count > best:
        best = count
    if best >= cap:
        return best
    for j in range(idx, n):
        if count + (n - j) <= best:
            break
        if c[j] & used == 0:
            best = _pack(c, n, j + 1, used | c[j], count + 1, cap, best)
            if best >= cap:
                return best
    return best


def max_disjoint(masks, int cap):
    cdef Py_ssize_t n
    cdef uint64_t* buf = _to_c(masks, &n)
    cdef int res
    try:
        with nogil:
            res = _pack(buf, <int> n, 0, 0, 0, cap, 0)
    finally:
        free(buf)
    return min(res, cap)


def z_table(int m, dest_paths, int r):
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << m
    cdef Py_ssize_t s_mask, total = 0, k, p
    cdef int i, ncand, widest = 0
    cdef uint64_t z, rest, low, outside
    out = array("Q", bytes(8 * size))
    cdef uint64_t[::1] table = out
    if r <= 0:
        for s_mask in range(size):
            table[s_mask] = s_mask
        return out
    for i in range(m):
        total += len(dest_paths[i])
        if len(dest_paths[i]) > widest:
            widest = len(dest_paths[i])
    cdef int* offsets = <int*> malloc((m + 1) * sizeof(int))
    cdef uint64_t* srcs = <uint64_t*> malloc((total + 1) * sizeof(uint64_t))
    cdef uint64_t* inners = <uint64_t*> malloc((total + 1) * sizeof(uint64_t))
    cdef uint64_t* cands = <uint64_t*> malloc((widest + 1) * sizeof(uint64_t))
    if offsets == NULL or srcs == NULL or inners == NULL or cands == NULL:
        free(offsets); free(srcs); free(inners); free(cands)
        raise MemoryError()
    try:
        k = 0
        for i in range(m):
            offsets[i] = <int> k
            for src, inner in dest_paths[i]:
                srcs[k] = src
                inners[k] = inner
                k += 1
        offsets[m] = <int> k
        with nogil:
            for s_mask in range(1, size):
                z = 0
                rest = <uint64_t> s_mask
                outside = ~(<uint64_t> s_mask)
                while rest:
                    low = rest & (~rest + 1)
                    rest ^= low
                    i = _top(low)
                    ncand = 0
                    for p in range(offsets[i], offsets[i + 1]):
                        if srcs[p] & <uint64_t> s_mask == 0 and inners[p] & outside == 0:
                            cands[ncand] = srcs[p] | inners[p]
                            ncand += 1
                    if ncand >= r and _pack(cands, ncand, 0, 0, 0, r, 0) >= r:
                        z |= low
                table[s_mask] = z
    finally:
        free(offsets); free(srcs); free(inners); free(cands)
    return out


def first_violation(table_obj, int m, int s):
    cdef const uint64_t[::1] table = table_obj
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << m
    cdef uint64_t full = <uint64_t> (size - 1)
    cdef Py_ssize_t t, mask, v1, v2
    cdef int b, c1
    cdef uint64_t bit
    cdef int* best = <int*> malloc(size * sizeof(int))
    if best == NULL:
        raise MemoryError()
    cdef Py_ssize_t r1 = 0, r2 = 0
    try:
        with nogil:
            best[0] = 1 << 30
            for t in range(1, size):
                if table[t] != <uint64_t> t:
                    best[t] = __builtin_popcountll(table[t])
                else:
                    best[t] = 1 << 30
            for b in range(m):
                bit = (<uint64_t> 1) << b
                for mask in range(size):
                    if <uint64_t> mask & bit and best[<uint64_t> mask ^ bit] < best[mask]:
                        best[mask] = best[<uint64_t> mask ^ bit]
            for v1 in range(1, size):
                if table[v1] == <uint64_t> v1:
                    continue
                c1 = __builtin_popcountll(table[v1])
                if c1 + best[full ^ <uint64_t> v1] >= s:
                    continue
                for v2 in range(1, size):
                    if v2 & v1 or table[v2] == <uint64_t> v2:
                        continue
                    if c1 + __builtin_popcountll(table[v2]) < s:
                        r1 = v1
                        r2 = v2
                        break
                if r1:
                    break
    finally:
        free(best)
    if r1:
        return r1, r2
    return None
